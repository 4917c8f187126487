/** Deterministic label colors: a stable string hash into a 12-color
 * palette, so a label renders identically across sentences and sessions. */

export const PALETTE = [
  "#e6194b", "#3cb44b", "#b8860b", "#4363d8", "#f58231", "#911eb4",
  "#0e7490", "#c2185b", "#556b2f", "#7f5539", "#2f6f4f", "#5b5ea6",
] as const;

export function hashLabel(label: string): number {
  // FNV-1a, 32-bit
  let h = 0x811c9dc5;
  for (let i = 0; i < label.length; i++) {
    h ^= label.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h;
}

export function colorForLabel(label: string): string {
  return PALETTE[hashLabel(label) % PALETTE.length];
}
