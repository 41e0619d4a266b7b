/**
 * Fixed venue color palette (Okabe-Ito), chosen for colorblind safety.
 * Venues are assigned colors by first appearance so a corpus renders the
 * same way every session.
 */

const OKABE_ITO = [
  "#E69F00",
  "#56B4E9",
  "#009E73",
  "#F0E442",
  "#0072B2",
  "#D55E00",
  "#CC79A7",
  "#999999",
  "#000000",
];

export class VenuePalette {
  private assigned = new Map<string, string>();

  color(venue: string): string {
    let color = this.assigned.get(venue);
    if (color === undefined) {
      color = OKABE_ITO[this.assigned.size % OKABE_ITO.length];
      this.assigned.set(venue, color);
    }
    return color;
  }

  entries(): Array<[string, string]> {
    return [...this.assigned.entries()];
  }
}
