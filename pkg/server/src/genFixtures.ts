/**
 * Writes fixtures/session.ndjson: a golden transcript of one stdio
 * session against the additive scorer. Line one is the handshake,
 * then request/reply pairs covering a batch with full, empty, and
 * partial contexts, a context with segments the model does not know,
 * and a request the server must refuse in-band.
 *
 * The transcript is committed and pinned byte for byte on both sides
 * of the protocol, so it must stay canonical under every shortest
 * round-trip float formatter. The spec uses small dyadic values: their
 * decimal forms are exact, never integral, and far from the magnitudes
 * where formatters switch to exponent notation.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { resolve } from "node:path";
import { pathToFileURL } from "node:url";

import { encodeRequestLine } from "./protocol.js";
import { additiveScorer, parseAdditiveSpec } from "./scorer.js";
import { replyTo, sessionHandshake } from "./session.js";

const FIXTURES_DIR = resolve(import.meta.dirname, "..", "fixtures");
const MAX_BATCH = 64;

const RESPONSE = ["y0", "y1", "y2"];

const REQUESTS: Array<{ id: string; contexts: string[][]; response: string[] }> = [
  {
    id: "req-000001",
    contexts: [["alpha", "beta", "gamma", "delta"], [], ["beta", "delta"]],
    response: RESPONSE,
  },
  {
    id: "req-000002",
    contexts: [["alpha", "café"]],
    response: RESPONSE,
  },
  {
    id: "req-000003",
    contexts: [["alpha"]],
    response: ["y0"],
  },
];

export function buildTranscript(): string {
  const specText = readFileSync(resolve(FIXTURES_DIR, "additive_spec.json"), "utf-8");
  const scorer = additiveScorer(parseAdditiveSpec(specText));
  const lines = [sessionHandshake(scorer, MAX_BATCH)];
  for (const { id, contexts, response } of REQUESTS) {
    const requestLine = encodeRequestLine(id, contexts, response);
    lines.push(requestLine);
    lines.push(replyTo(scorer, MAX_BATCH, requestLine));
  }
  return lines.join("\n") + "\n";
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  const outPath = resolve(FIXTURES_DIR, "session.ndjson");
  writeFileSync(outPath, buildTranscript(), "utf-8");
  process.stdout.write(`wrote ${outPath}\n`);
}
