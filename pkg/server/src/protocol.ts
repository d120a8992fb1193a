/**
 * Wire grammar for the lerg-score protocol, newline-delimited JSON.
 *
 *     handshake   {"protocol": "lerg-score", "version": 1, "normalized": <bool>, "max_batch": <int>, "model": <string>}
 *     request     {"id": <string>, "contexts": [[<string>...]...], "response": [<string>...]}
 *     reply       {"id": <string>, "logprobs": [[<float>...]...]}
 *     error reply {"id": <string>, "error": {"code": <string>, "message": <string>}}
 *
 * Every line is canonical compact JSON: no whitespace between tokens,
 * keys in the order shown above, non-ASCII characters unescaped. That
 * is exactly what JSON.stringify produces, and it matches the client's
 * encoder byte for byte, so transcripts can be compared as raw text.
 */

export const PROTOCOL_NAME = "lerg-score";
export const PROTOCOL_VERSION = 1;

export interface Handshake {
  protocol: typeof PROTOCOL_NAME;
  version: typeof PROTOCOL_VERSION;
  normalized: boolean;
  max_batch: number;
  model: string;
}

export interface ScoreRequest {
  id: string;
  contexts: string[][];
  response: string[];
}

export type ParsedRequest =
  | { ok: true; request: ScoreRequest }
  | { ok: false; id: string; message: string };

function isStringArray(value: unknown): value is string[] {
  return Array.isArray(value) && value.every((v) => typeof v === "string");
}

function isContextList(value: unknown): value is string[][] {
  return Array.isArray(value) && value.every(isStringArray);
}

/**
 * Parse one request line. Failures come back with the request id when
 * the line carried a usable one, so the error reply can still echo it.
 */
export function parseRequestLine(line: string): ParsedRequest {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch (err) {
    return { ok: false, id: "", message: `malformed request: ${(err as Error).message}` };
  }
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    return { ok: false, id: "", message: "request must be a JSON object" };
  }
  const record = payload as Record<string, unknown>;
  const id = typeof record.id === "string" ? record.id : "";
  if (typeof record.id !== "string") {
    return { ok: false, id, message: "request id must be a string" };
  }
  if (!isContextList(record.contexts)) {
    return { ok: false, id, message: "contexts must be a list of segment lists" };
  }
  if (!isStringArray(record.response)) {
    return { ok: false, id, message: "response must be a list of segments" };
  }
  return { ok: true, request: { id, contexts: record.contexts, response: record.response } };
}

export function handshakeLine(normalized: boolean, maxBatch: number, model: string): string {
  const handshake: Handshake = {
    protocol: PROTOCOL_NAME,
    version: PROTOCOL_VERSION,
    normalized,
    max_batch: maxBatch,
    model,
  };
  return JSON.stringify(handshake);
}

export function encodeRequestLine(id: string, contexts: string[][], response: string[]): string {
  return JSON.stringify({ id, contexts, response });
}

export function successLine(id: string, logprobs: number[][]): string {
  return JSON.stringify({ id, logprobs });
}

export function errorLine(id: string, code: string, message: string): string {
  return JSON.stringify({ id, error: { code, message } });
}
