/** IOB2 span grouping with the conlleval repair rules.
 *
 * Mirrors the server-side span extraction exactly (shared test vectors
 * pin both sides): B-x opens a span; an I-x after O, start-of-sentence or
 * a different type is repaired to open one; spans close before O, before
 * any B- and at type changes.
 */

export interface Span {
  start: number; // token index, inclusive
  end: number;   // token index, inclusive
  label: string; // base label without the B-/I- prefix
}

export function extractSpans(labels: string[]): Span[] {
  const spans: Span[] = [];
  let openStart: number | null = null;
  let openLabel: string | null = null;

  const close = (end: number) => {
    if (openStart !== null && openLabel !== null) {
      spans.push({ start: openStart, end, label: openLabel });
      openStart = null;
      openLabel = null;
    }
  };

  labels.forEach((lab, i) => {
    if (lab === "O") {
      close(i - 1);
    } else if (lab.startsWith("B-")) {
      close(i - 1);
      openStart = i;
      openLabel = lab.slice(2);
    } else if (lab.startsWith("I-")) {
      const kind = lab.slice(2);
      if (openLabel !== kind) {
        close(i - 1);
        openStart = i;
        openLabel = kind;
      }
    } else {
      throw new Error(`not an IOB2 label: ${lab}`);
    }
  });
  close(labels.length - 1);
  return spans;
}

/** Map each token index to the span covering it (or null). */
export function spanByToken(labels: string[]): (Span | null)[] {
  const cover: (Span | null)[] = new Array(labels.length).fill(null);
  for (const span of extractSpans(labels)) {
    for (let i = span.start; i <= span.end; i++) cover[i] = span;
  }
  return cover;
}
