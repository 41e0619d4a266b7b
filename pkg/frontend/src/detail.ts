/** Detail panel: one document's text plus its related papers and suggested terms. */

import type { DocDetail, RelatedDoc, TermSuggestion } from "./types.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderDetail(
  container: HTMLElement,
  doc: DocDetail,
  related: RelatedDoc[],
  terms: TermSuggestion[],
  handlers: {
    onFollowTerm: (term: string) => void;
    onOpenDoc: (docId: string) => void;
  },
): void {
  container.textContent = "";
  container.appendChild(el("h2", "detail-title", doc.title));
  container.appendChild(el("p", "detail-meta", `${doc.venue} ${doc.year}`));
  container.appendChild(el("p", "detail-abstract", doc.abstract));

  const termsBlock = el("div", "detail-terms");
  termsBlock.appendChild(el("h3", "", "Suggested terms"));
  for (const suggestion of terms) {
    const chip = el("button", "term-chip", suggestion.term);
    chip.dataset.term = suggestion.term;
    chip.addEventListener("click", () => handlers.onFollowTerm(suggestion.term));
    termsBlock.appendChild(chip);
  }
  container.appendChild(termsBlock);

  const relatedBlock = el("div", "detail-related");
  relatedBlock.appendChild(el("h3", "", "Related papers"));
  const list = el("ul", "related-list");
  for (const paper of related) {
    const item = el("li", "related-item");
    const link = el("button", "related-link", paper.title);
    link.dataset.docId = paper.doc_id;
    link.addEventListener("click", () => handlers.onOpenDoc(paper.doc_id));
    item.appendChild(link);
    item.appendChild(el("span", "related-meta", ` ${paper.venue} ${paper.year}`));
    list.appendChild(item);
  }
  relatedBlock.appendChild(list);
  container.appendChild(relatedBlock);
}

export function clearDetail(container: HTMLElement): void {
  container.textContent = "";
  container.appendChild(el("p", "detail-empty", "Click a point to inspect a paper."));
}
