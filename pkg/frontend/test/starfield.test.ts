import { describe, expect, it } from "vitest";

import { luminosityToBrightness } from "../src/starfield.js";
import { pictogramAction } from "../src/pictograms.js";
import { initialState } from "../src/state.js";

describe("luminosity to brightness", () => {
  it("is monotone over the whole range", () => {
    let previous = -1;
    for (let l = 0; l <= 1.0001; l += 0.01) {
      const b = luminosityToBrightness(l);
      expect(b).toBeGreaterThan(previous);
      previous = b;
    }
  });

  it("maps idle 0.1 to dim and 1.0 to full", () => {
    const idle = luminosityToBrightness(0.1);
    const full = luminosityToBrightness(1.0);
    expect(full).toBe(1.0);
    expect(idle).toBeLessThan(0.3);
    expect(idle).toBeGreaterThan(0.0);
  });

  it("clamps out-of-range input", () => {
    expect(luminosityToBrightness(-2)).toBe(luminosityToBrightness(0));
    expect(luminosityToBrightness(7)).toBe(1.0);
  });
});

describe("pictogram actions", () => {
  it("empty slot opens the load flow", () => {
    expect(pictogramAction(initialState(), "bison")).toEqual({ kind: "load" });
  });

  it("loaded slot triggers, playing slot stops", () => {
    const state = { ...initialState(), slots: { bison: "loaded" as const, boar: "playing" as const } };
    expect(pictogramAction(state, "bison")).toEqual({
      kind: "send",
      message: { op: "trigger_sample", slot: "bison" },
    });
    expect(pictogramAction(state, "boar")).toEqual({
      kind: "send",
      message: { op: "stop_sample", slot: "boar" },
    });
  });
});
