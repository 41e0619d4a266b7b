/** Payload shapes of the corpus service API (see docs/api-schema.json in the repo root). */

export interface Point {
  doc_id: string;
  x: number;
  y: number;
  venue: string;
  year: number;
}

export interface DocDetail {
  doc_id: string;
  external_ids: Record<string, string>;
  title: string;
  abstract: string;
  venue: string;
  year: number;
}

export interface RelatedDoc {
  doc_id: string;
  title: string;
  venue: string;
  year: number;
  similarity: number;
}

export interface TermSuggestion {
  term: string;
  neighborhood_freq: number;
  corpus_rate: number;
  score: number;
}

export interface SearchHit {
  doc_id: string;
  title: string;
  venue: string;
  year: number;
  match_count: number;
}

export interface Filters {
  venues: string[] | null; // null = all venues
  yearFrom: number | null;
  yearTo: number | null;
}

export const ALL_FILTERS: Filters = { venues: null, yearFrom: null, yearTo: null };
