/**
 * Scoring backends for the server.
 *
 * The additive scorer consumes the same spec JSON the Python toolkit
 * writes for its additive test double and must stay bit-compatible
 * with it: for each response step j the score is base[j] plus the
 * weight of every kept segment, accumulated in increasing segment
 * order. IEEE-754 addition is order-sensitive, so that loop order is
 * part of the contract, not a style choice.
 */

const FULL_INPUT_TOL = 1e-9;

export class ScoreError extends Error {}

export interface Scorer {
  readonly normalized: boolean;
  readonly model: string;
  score(contexts: string[][], response: string[]): number[][];
}

/** Uniform distribution over a fixed vocabulary: log(1/V) per step. */
export function uniformScorer(vocab: number): Scorer {
  if (!Number.isInteger(vocab) || vocab < 1) {
    throw new ScoreError(`vocabulary size must be a positive integer, got ${vocab}`);
  }
  const logprob = Math.log(1 / vocab);
  return {
    normalized: true,
    model: `uniform-${vocab}`,
    score(contexts, response) {
      if (response.length === 0) {
        throw new ScoreError("response needs at least one segment");
      }
      return contexts.map(() => response.map(() => logprob));
    },
  };
}

export interface AdditiveSpec {
  base: number[];
  weights: number[][];
  segments: string[];
  normalized: boolean;
}

export function parseAdditiveSpec(text: string): AdditiveSpec {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    throw new ScoreError(`spec is not valid JSON: ${(err as Error).message}`);
  }
  const record = payload as Record<string, unknown>;
  const base = record.base as number[];
  const weights = record.weights as number[][];
  const segments = record.segments as string[];
  if (!Array.isArray(base) || !base.every((v) => typeof v === "number")) {
    throw new ScoreError("spec base must be a list of numbers");
  }
  if (!Array.isArray(weights) || !weights.every((row) => Array.isArray(row) && row.every((v) => typeof v === "number"))) {
    throw new ScoreError("spec weights must be a list of number rows");
  }
  if (!Array.isArray(segments) || !segments.every((v) => typeof v === "string")) {
    throw new ScoreError("spec segments must be a list of strings");
  }
  if (weights.some((row) => row.length !== base.length)) {
    throw new ScoreError("every weight row must have one entry per response step");
  }
  if (segments.length !== weights.length) {
    throw new ScoreError("one segment name per weight row required");
  }
  if (new Set(segments).size !== segments.length) {
    throw new ScoreError("segment names must be distinct");
  }
  for (let j = 0; j < base.length; j++) {
    let total = base[j];
    for (const row of weights) {
      total += row[j];
    }
    if (total > FULL_INPUT_TOL) {
      throw new ScoreError(`full-input score ${total} at step ${j} exceeds 0`);
    }
  }
  return { base, weights, segments, normalized: Boolean(record.normalized) };
}

/**
 * Additive log-score model. Segments outside the spec are ignored and
 * repeats collapse: a segment is either kept or not.
 */
export function additiveScorer(spec: AdditiveSpec): Scorer {
  const index = new Map<string, number>();
  spec.segments.forEach((name, i) => index.set(name, i));
  const m = spec.weights.length;
  const n = spec.base.length;
  return {
    normalized: spec.normalized,
    model: "additive-toy",
    score(contexts, response) {
      if (response.length !== n) {
        throw new ScoreError(`this model scores exactly ${n} response steps`);
      }
      return contexts.map((context) => {
        const kept = new Array<boolean>(m).fill(false);
        for (const segment of context) {
          const i = index.get(segment);
          if (i !== undefined) {
            kept[i] = true;
          }
        }
        const row = new Array<number>(n);
        for (let j = 0; j < n; j++) {
          let value = spec.base[j];
          for (let i = 0; i < m; i++) {
            if (kept[i]) {
              value += spec.weights[i][j];
            }
          }
          row[j] = value;
        }
        return row;
      });
    },
  };
}
