import { describe, expect, it } from "vitest";

import { colorForLabel, PALETTE } from "../src/colors";

describe("colorForLabel", () => {
  it("is deterministic", () => {
    for (const label of ["PER", "LOC", "NP", "VP", "N", "Np"]) {
      expect(colorForLabel(label)).toBe(colorForLabel(label));
    }
  });

  it("always picks from the 12-color palette", () => {
    const labels = ["PER", "LOC", "ORG", "MISC", "NP", "VP", "PP", "AP",
                    "QP", "RP", "N", "V", "CH", "Np", "Vy"];
    for (const label of labels) {
      expect(PALETTE).toContain(colorForLabel(label));
    }
    expect(PALETTE).toHaveLength(12);
  });
});
