import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { extractSpans, spanByToken } from "../src/spans";

interface Vector {
  labels: string[];
  spans: [number, number, string][];
}

const vectorsPath = fileURLToPath(
  new URL("../../tests/data/iob_span_vectors.json", import.meta.url),
);
const vectors: Vector[] = JSON.parse(readFileSync(vectorsPath, "utf-8"));

describe("extractSpans", () => {
  it("agrees with the evaluation module on every shared vector", () => {
    expect(vectors.length).toBeGreaterThanOrEqual(25);
    for (const { labels, spans } of vectors) {
      const got = extractSpans(labels).map((s) => [s.start, s.end, s.label]);
      expect(got, labels.join(" ")).toEqual(spans);
    }
  });

  it("repairs an I- start into a new span", () => {
    expect(extractSpans(["I-PER", "I-PER", "B-PER"])).toEqual([
      { start: 0, end: 1, label: "PER" },
      { start: 2, end: 2, label: "PER" },
    ]);
  });

  it("rejects non-IOB labels", () => {
    expect(() => extractSpans(["Q-PER"])).toThrow(/not an IOB2 label/);
  });
});

describe("spanByToken", () => {
  it("covers every token of a span with the same object", () => {
    const cover = spanByToken(["B-PER", "I-PER", "O"]);
    expect(cover[0]).toBe(cover[1]);
    expect(cover[0]).toEqual({ start: 0, end: 1, label: "PER" });
    expect(cover[2]).toBeNull();
  });
});
