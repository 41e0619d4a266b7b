/** Breadcrumb trail of followed terms, plus the results list they produced. */

import type { SearchHit } from "./types.js";

export function renderBreadcrumbs(container: HTMLElement, trail: string[]): void {
  container.textContent = "";
  trail.forEach((term, index) => {
    if (index > 0) {
      const sep = document.createElement("span");
      sep.className = "crumb-sep";
      sep.textContent = " › ";
      container.appendChild(sep);
    }
    const crumb = document.createElement("span");
    crumb.className = "crumb";
    crumb.textContent = term;
    container.appendChild(crumb);
  });
}

export function renderResults(
  container: HTMLElement,
  results: SearchHit[],
  trail: string[],
  onOpenDoc: (docId: string) => void,
): void {
  container.textContent = "";
  if (trail.length > 0 && results.length === 0) {
    const empty = document.createElement("p");
    empty.className = "results-empty";
    empty.textContent = "No documents match this term.";
    container.appendChild(empty);
    return;
  }
  const list = document.createElement("ul");
  list.className = "results-list";
  for (const hit of results) {
    const item = document.createElement("li");
    const link = document.createElement("button");
    link.className = "result-link";
    link.dataset.docId = hit.doc_id;
    link.textContent = hit.title;
    link.addEventListener("click", () => onOpenDoc(hit.doc_id));
    item.appendChild(link);
    const meta = document.createElement("span");
    meta.className = "result-meta";
    meta.textContent = ` ${hit.venue} ${hit.year} (${hit.match_count})`;
    item.appendChild(meta);
    list.appendChild(item);
  }
  container.appendChild(list);
}
