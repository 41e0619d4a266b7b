/**
 * Application shell: builds the DOM, owns the ViewState, and wires the
 * scatter plot, detail panel, search box, and breadcrumb trail together.
 *
 * All state changes flow through the pure reducer in state.ts; this module
 * only performs fetches and re-renders. Detail and search requests carry an
 * AbortController that is cancelled when a newer interaction supersedes
 * them, so stale responses never overwrite fresh state.
 */

import { ApiClient } from "./api.js";
import { renderBreadcrumbs, renderResults } from "./breadcrumbs.js";
import { clearDetail, renderDetail } from "./detail.js";
import { ScatterPlot } from "./scatter.js";
import { initialState, update } from "./state.js";
import type { UiEvent, ViewState } from "./state.js";
import type { Filters, Point } from "./types.js";

const LAYOUT = `
  <header class="topbar">
    <h1>Corpus Explorer</h1>
    <form id="search-form">
      <input id="search-input" type="search" placeholder="Search title + abstract" />
      <button type="submit">Search</button>
    </form>
    <button id="back-button" disabled>Back</button>
  </header>
  <div id="error-banner" class="error-banner" hidden></div>
  <div class="columns">
    <aside class="sidebar">
      <section id="filters">
        <h3>Venues</h3>
        <div id="venue-boxes"></div>
        <h3>Years</h3>
        <label>from <input id="year-from" type="number" /></label>
        <label>to <input id="year-to" type="number" /></label>
      </section>
      <section>
        <h3>Trail</h3>
        <nav id="breadcrumbs" class="breadcrumbs"></nav>
        <div id="results"></div>
      </section>
    </aside>
    <main class="plot-area">
      <canvas id="scatter" width="900" height="600"></canvas>
      <div id="legend" class="legend"></div>
    </main>
    <section id="detail" class="detail"></section>
  </div>
`;

export class App {
  state: ViewState = initialState();
  readonly scatter: ScatterPlot;
  readonly events: UiEvent[] = [];
  private points: Point[] = [];
  private detailAbort: AbortController | null = null;
  private searchAbort: AbortController | null = null;

  constructor(
    readonly root: HTMLElement,
    readonly api: ApiClient,
    options: { ctx?: CanvasRenderingContext2D | null } = {},
  ) {
    root.innerHTML = LAYOUT;
    const canvas = this.element<HTMLCanvasElement>("#scatter");
    this.scatter = new ScatterPlot(canvas, options.ctx);
    this.scatter.onSelect = (docId) => void this.selectDoc(docId);
    this.element<HTMLFormElement>("#search-form").addEventListener("submit", (event) => {
      event.preventDefault();
      const query = this.element<HTMLInputElement>("#search-input").value.trim();
      if (query) void this.runSearch(query, "search-submitted");
    });
    this.element<HTMLButtonElement>("#back-button").addEventListener("click", () => {
      this.dispatch({ kind: "back" });
    });
    for (const id of ["#year-from", "#year-to"]) {
      this.element<HTMLInputElement>(id).addEventListener("change", () => {
        this.filtersFromControls();
      });
    }
    clearDetail(this.element("#detail"));
  }

  element<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  /** Load every point once and build the venue filter controls. */
  async start(): Promise<void> {
    try {
      this.points = await this.api.points();
    } catch (err) {
      this.dispatch({ kind: "fetch-failed", message: `could not load corpus points: ${String(err)}` });
      return;
    }
    this.scatter.setPoints(this.points);
    this.buildVenueBoxes();
    this.renderLegend();
  }

  private buildVenueBoxes(): void {
    const box = this.element("#venue-boxes");
    box.textContent = "";
    for (const venue of this.scatter.venues()) {
      const label = document.createElement("label");
      label.className = "venue-box";
      const input = document.createElement("input");
      input.type = "checkbox";
      input.checked = true;
      input.dataset.venue = venue;
      input.addEventListener("change", () => this.filtersFromControls());
      label.appendChild(input);
      label.appendChild(document.createTextNode(venue));
      box.appendChild(label);
    }
  }

  private renderLegend(): void {
    const legend = this.element("#legend");
    legend.textContent = "";
    for (const [venue, color] of this.scatter.palette.entries()) {
      const item = document.createElement("span");
      item.className = "legend-item";
      const swatch = document.createElement("span");
      swatch.className = "legend-swatch";
      swatch.style.background = color;
      item.appendChild(swatch);
      item.appendChild(document.createTextNode(venue));
      legend.appendChild(item);
    }
  }

  private filtersFromControls(): void {
    const checked = [...this.root.querySelectorAll<HTMLInputElement>("#venue-boxes input")]
      .filter((input) => input.checked)
      .map((input) => input.dataset.venue as string);
    const all = checked.length === this.scatter.venues().length;
    const yearFrom = this.element<HTMLInputElement>("#year-from").value;
    const yearTo = this.element<HTMLInputElement>("#year-to").value;
    const filters: Filters = {
      venues: all ? null : checked,
      yearFrom: yearFrom ? Number(yearFrom) : null,
      yearTo: yearTo ? Number(yearTo) : null,
    };
    this.dispatch({ kind: "filters-changed", filters });
  }

  dispatch(event: UiEvent): void {
    this.events.push(event);
    this.state = update(this.state, event);
    this.render(event);
  }

  private render(event: UiEvent): void {
    const banner = this.element("#error-banner");
    banner.hidden = this.state.error === null;
    banner.textContent = this.state.error ?? "";

    this.element<HTMLButtonElement>("#back-button").disabled = this.state.history.length === 0;
    renderBreadcrumbs(this.element("#breadcrumbs"), this.state.trail);
    renderResults(this.element("#results"), this.state.results, this.state.trail, (docId) =>
      void this.selectDoc(docId),
    );

    if (event.kind === "filters-changed") {
      this.scatter.setFilters(this.state.filters);
    }
    if (event.kind === "back") {
      this.scatter.setFilters(this.state.filters);
      if (this.state.selectedDoc === null) {
        clearDetail(this.element("#detail"));
      } else {
        void this.loadDetail(this.state.selectedDoc);
      }
    }
  }

  async selectDoc(docId: string): Promise<void> {
    this.dispatch({ kind: "doc-selected", docId });
    await this.loadDetail(docId);
  }

  private async loadDetail(docId: string): Promise<void> {
    this.detailAbort?.abort();
    const abort = new AbortController();
    this.detailAbort = abort;
    try {
      const [doc, related, terms] = await Promise.all([
        this.api.doc(docId, abort.signal),
        this.api.related(docId, 10, abort.signal),
        this.api.terms(docId, 10, 8, abort.signal),
      ]);
      if (abort.signal.aborted) return;
      renderDetail(this.element("#detail"), doc, related, terms, {
        onFollowTerm: (term) => void this.runSearch(term, "term-followed"),
        onOpenDoc: (id) => void this.selectDoc(id),
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      this.dispatch({ kind: "fetch-failed", message: `could not load document: ${String(err)}` });
    }
  }

  async runSearch(term: string, kind: "term-followed" | "search-submitted"): Promise<void> {
    this.searchAbort?.abort();
    const abort = new AbortController();
    this.searchAbort = abort;
    try {
      const results = await this.api.search(term, abort.signal);
      if (abort.signal.aborted) return;
      if (kind === "term-followed") {
        this.dispatch({ kind, term, results });
      } else {
        this.dispatch({ kind, query: term, results });
      }
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      this.dispatch({ kind: "fetch-failed", message: `search failed: ${String(err)}` });
    }
  }
}

export async function bootstrap(
  root: HTMLElement,
  api: ApiClient = new ApiClient(),
  options: { ctx?: CanvasRenderingContext2D | null } = {},
): Promise<App> {
  const app = new App(root, api, options);
  await app.start();
  return app;
}
