/**
 * ViewState and its pure reducer.
 *
 * Every transition is a pure function of (state, event), so replaying an
 * event log reproduces any screen. The breadcrumb trail grows only when a
 * suggested term is followed or a search is issued; those two events push a
 * snapshot so that back-navigation pops exactly one entry and restores the
 * prior state field-for-field.
 */

import type { Filters, SearchHit } from "./types.js";
import { ALL_FILTERS } from "./types.js";

export interface ViewState {
  filters: Filters;
  selectedDoc: string | null;
  trail: string[];
  results: SearchHit[];
  error: string | null;
  history: Snapshot[];
}

export type Snapshot = Omit<ViewState, "history">;

export type UiEvent =
  | { kind: "filters-changed"; filters: Filters }
  | { kind: "doc-selected"; docId: string | null }
  | { kind: "term-followed"; term: string; results: SearchHit[] }
  | { kind: "search-submitted"; query: string; results: SearchHit[] }
  | { kind: "back" }
  | { kind: "fetch-failed"; message: string }
  | { kind: "error-dismissed" };

export function initialState(): ViewState {
  return {
    filters: ALL_FILTERS,
    selectedDoc: null,
    trail: [],
    results: [],
    error: null,
    history: [],
  };
}

export function snapshot(state: ViewState): Snapshot {
  const { history: _history, ...rest } = state;
  return {
    ...rest,
    trail: [...state.trail],
    results: [...state.results],
    filters: { ...state.filters, venues: state.filters.venues && [...state.filters.venues] },
  };
}

export function update(state: ViewState, event: UiEvent): ViewState {
  switch (event.kind) {
    case "filters-changed":
      return { ...state, filters: event.filters };
    case "doc-selected":
      return { ...state, selectedDoc: event.docId };
    case "term-followed":
    case "search-submitted": {
      const term = event.kind === "term-followed" ? event.term : event.query;
      return {
        ...state,
        history: [...state.history, snapshot(state)],
        trail: [...state.trail, term],
        results: event.results,
        error: null,
      };
    }
    case "back": {
      const prior = state.history[state.history.length - 1];
      if (prior === undefined) return state;
      return { ...prior, history: state.history.slice(0, -1) };
    }
    case "fetch-failed":
      return { ...state, error: event.message };
    case "error-dismissed":
      return { ...state, error: null };
  }
}

export function replay(events: UiEvent[], start: ViewState = initialState()): ViewState {
  return events.reduce(update, start);
}
