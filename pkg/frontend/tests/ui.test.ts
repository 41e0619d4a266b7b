/**
 * Interaction-loop contract against recorded fixture-service traffic:
 * scatter renders, point click opens the right detail, following a suggested
 * term issues a /api/search round trip and grows the breadcrumb trail, and
 * back restores the prior ViewState exactly.
 */

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { bootstrap } from "../src/app.js";
import type { App } from "../src/app.js";
import { snapshot } from "../src/state.js";
import type { Point, TermSuggestion } from "../src/types.js";
import {
  assertOnlyDocumentedRequests,
  fakeContext,
  fixtureFetch,
  loadRecording,
} from "./helpers.js";

const recording = loadRecording();
const points = recording.entries[0].body as Point[];
const clickedDoc = recording.clicked_doc;
const detailBody = recording.entries[1].body as { title: string; abstract: string };
const termsBody = recording.entries[3].body as TermSuggestion[];
const topTerm = termsBody[0].term;

async function mount(): Promise<{ app: App; counters: ReturnType<typeof fakeContext>["counters"] }> {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  const api = new ApiClient("", fixtureFetch(recording));
  const { ctx, counters } = fakeContext();
  const app = await bootstrap(root, api, { ctx });
  return { app, counters };
}

async function clickPoint(app: App, docId: string): Promise<void> {
  const point = points.find((p) => p.doc_id === docId);
  expect(point).toBeDefined();
  const { sx, sy } = app.scatter.toScreen(point as Point);
  const canvas = app.element<HTMLCanvasElement>("#scatter");
  canvas.dispatchEvent(new MouseEvent("click", { clientX: sx, clientY: sy, bubbles: true }));
  await vi.waitFor(() => {
    expect(app.element("#detail").textContent).toContain(detailBody.title);
  });
}

describe("explorer interaction loop", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders every fixture point in the scatter, batched by venue", async () => {
    const { app, counters } = await mount();
    expect(counters.fillRect).toBe(points.length);
    // one fillStyle assignment per venue, not per point
    expect(counters.fillStyles.length).toBe(new Set(points.map((p) => p.venue)).size);
    expect(app.scatter.visibleCount()).toBe(points.length);
  });

  it("click on a point opens that document's detail panel", async () => {
    const { app } = await mount();
    await clickPoint(app, clickedDoc);
    expect(app.state.selectedDoc).toBe(clickedDoc);
    const detail = app.element("#detail");
    expect(detail.textContent).toContain(detailBody.title);
    expect(detail.textContent).toContain(detailBody.abstract);
    expect(detail.querySelectorAll(".term-chip").length).toBe(termsBody.length);
  });

  it("following a suggested term issues a search round trip and appends to the trail", async () => {
    const { app } = await mount();
    await clickPoint(app, clickedDoc);
    const chip = app.element("#detail").querySelector(".term-chip") as HTMLButtonElement;
    expect(chip.textContent).toBe(topTerm);
    chip.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await vi.waitFor(() => {
      expect(app.state.trail).toEqual([topTerm]);
    });
    const searchCalls = app.api.log.filter((path) => path.startsWith("/api/search?"));
    expect(searchCalls.length).toBe(1);
    expect(decodeURIComponent(searchCalls[0])).toContain(`q=${topTerm}`);
    expect(app.element("#breadcrumbs").textContent).toContain(topTerm);
    expect(app.element("#results").querySelectorAll(".result-link").length).toBeGreaterThan(0);
  });

  it("follow then back restores the prior ViewState exactly", async () => {
    const { app } = await mount();
    await clickPoint(app, clickedDoc);
    const before = snapshot(app.state);
    const chip = app.element("#detail").querySelector(".term-chip") as HTMLButtonElement;
    chip.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await vi.waitFor(() => expect(app.state.trail).toEqual([topTerm]));
    expect(snapshot(app.state)).not.toEqual(before);

    app.element<HTMLButtonElement>("#back-button").dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    await vi.waitFor(() => expect(app.state.trail).toEqual([]));
    expect(snapshot(app.state)).toEqual(before);
    expect(app.state.history).toHaveLength(0);
  });

  it("issues only documented /api/* requests during the whole loop", async () => {
    const { app } = await mount();
    await clickPoint(app, clickedDoc);
    const chip = app.element("#detail").querySelector(".term-chip") as HTMLButtonElement;
    chip.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await vi.waitFor(() => expect(app.state.trail).toEqual([topTerm]));
    expect(app.api.log.length).toBeGreaterThanOrEqual(5);
    assertOnlyDocumentedRequests(app.api.log);
  });

  it("venue filter hides other venues' points", async () => {
    const { app } = await mount();
    const boxes = [...app.root.querySelectorAll<HTMLInputElement>("#venue-boxes input")];
    expect(boxes.length).toBeGreaterThan(1);
    for (const box of boxes.slice(1)) {
      box.checked = false;
      box.dispatchEvent(new Event("change", { bubbles: true }));
    }
    const keptVenue = boxes[0].dataset.venue;
    const expected = points.filter((p) => p.venue === keptVenue).length;
    expect(app.scatter.visibleCount()).toBe(expected);
    expect(app.state.filters.venues).toEqual([keptVenue]);
  });

  it("shows an error banner when the points fetch fails", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app") as HTMLElement;
    const api = new ApiClient("", async () => {
      throw new Error("connection refused");
    });
    const { ctx } = fakeContext();
    const app = await bootstrap(root, api, { ctx });
    const banner = app.element("#error-banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("could not load corpus points");
  });
});
