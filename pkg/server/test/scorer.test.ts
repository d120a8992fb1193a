import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import { describe, expect, it } from "vitest";

import { additiveScorer, parseAdditiveSpec, ScoreError, uniformScorer } from "../src/scorer";

const SPEC_TEXT = readFileSync(resolve(import.meta.dirname, "../fixtures/additive_spec.json"), "utf-8");

describe("uniformScorer", () => {
  it("scores every step at log(1/V) for every context", () => {
    const scorer = uniformScorer(100);
    const rows = scorer.score([["a"], [], ["b", "c"]], ["x", "y"]);
    expect(rows).toEqual([
      [Math.log(1 / 100), Math.log(1 / 100)],
      [Math.log(1 / 100), Math.log(1 / 100)],
      [Math.log(1 / 100), Math.log(1 / 100)],
    ]);
    expect(scorer.normalized).toBe(true);
    expect(scorer.model).toBe("uniform-100");
  });

  it("rejects an empty response", () => {
    expect(() => uniformScorer(10).score([["a"]], [])).toThrow(ScoreError);
    expect(() => uniformScorer(10).score([["a"]], [])).toThrow("segment");
  });

  it("rejects a non-positive vocabulary", () => {
    expect(() => uniformScorer(0)).toThrow(ScoreError);
    expect(() => uniformScorer(2.5)).toThrow(ScoreError);
  });
});

describe("additiveScorer", () => {
  const scorer = additiveScorer(parseAdditiveSpec(SPEC_TEXT));
  const response = ["y0", "y1", "y2"];

  it("adds kept-segment weights onto the base scores", () => {
    const rows = scorer.score(
      [["alpha", "beta", "gamma", "delta"], [], ["beta", "delta"]],
      response,
    );
    expect(rows).toEqual([
      [-1.6875, -2.75, -1.8125],
      [-2.5, -3.25, -1.75],
      [-2.4375, -2.625, -1.4375],
    ]);
  });

  it("ignores unknown segments and collapses repeats", () => {
    const [plain] = scorer.score([["alpha"]], response);
    const [noisy] = scorer.score([["alpha", "alpha", "zeta"]], response);
    expect(noisy).toEqual(plain);
    expect(plain).toEqual([-1.875, -3.625, -1.625]);
  });

  it("is insensitive to context segment order", () => {
    const [forward] = scorer.score([["beta", "delta"]], response);
    const [backward] = scorer.score([["delta", "beta"]], response);
    expect(backward).toEqual(forward);
  });

  it("refuses the wrong number of response steps", () => {
    expect(() => scorer.score([["alpha"]], ["y0"])).toThrow("scores exactly 3 response steps");
  });

  it("reports the spec's own normalization flag", () => {
    expect(scorer.normalized).toBe(false);
    expect(scorer.model).toBe("additive-toy");
  });
});

describe("parseAdditiveSpec", () => {
  it("rejects ragged weight rows", () => {
    expect(() =>
      parseAdditiveSpec('{"base":[-1.0,-1.0],"weights":[[-0.5]],"segments":["a"]}'),
    ).toThrow("one entry per response step");
  });

  it("rejects a segment count that disagrees with the weights", () => {
    expect(() =>
      parseAdditiveSpec('{"base":[-1.0],"weights":[[-0.5]],"segments":["a","b"]}'),
    ).toThrow("one segment name per weight row");
  });

  it("rejects duplicate segment names", () => {
    expect(() =>
      parseAdditiveSpec('{"base":[-1.0],"weights":[[-0.25],[-0.25]],"segments":["a","a"]}'),
    ).toThrow("distinct");
  });

  it("rejects a full-input score above zero", () => {
    expect(() =>
      parseAdditiveSpec('{"base":[-1.0],"weights":[[1.5]],"segments":["a"]}'),
    ).toThrow("exceeds 0");
  });

  it("rejects non-numeric entries and broken JSON", () => {
    expect(() => parseAdditiveSpec('{"base":["x"],"weights":[],"segments":[]}')).toThrow(
      "list of numbers",
    );
    expect(() => parseAdditiveSpec("{")).toThrow("not valid JSON");
  });

  it("defaults normalized to false", () => {
    const spec = parseAdditiveSpec('{"base":[-1.0],"weights":[[-0.5]],"segments":["a"]}');
    expect(spec.normalized).toBe(false);
  });
});
