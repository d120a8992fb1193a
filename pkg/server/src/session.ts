/**
 * Pure request/reply handling, shared by the stdio loop, the fixture
 * generator, and the tests. One request line in, one reply line out;
 * no state survives between calls.
 */

import { errorLine, handshakeLine, parseRequestLine, successLine } from "./protocol.js";
import { ScoreError, Scorer } from "./scorer.js";

export const BAD_REQUEST = "bad_request";

export function sessionHandshake(scorer: Scorer, maxBatch: number): string {
  return handshakeLine(scorer.normalized, maxBatch, scorer.model);
}

export function replyTo(scorer: Scorer, maxBatch: number, requestLine: string): string {
  const parsed = parseRequestLine(requestLine);
  if (!parsed.ok) {
    return errorLine(parsed.id, BAD_REQUEST, parsed.message);
  }
  const { id, contexts, response } = parsed.request;
  if (contexts.length > maxBatch) {
    return errorLine(id, BAD_REQUEST, `batch of ${contexts.length} exceeds max_batch ${maxBatch}`);
  }
  try {
    return successLine(id, scorer.score(contexts, response));
  } catch (err) {
    if (err instanceof ScoreError) {
      return errorLine(id, BAD_REQUEST, err.message);
    }
    throw err;
  }
}
