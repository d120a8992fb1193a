/**
 * Stdio model server. Emits the handshake as its first stdout line,
 * then answers one request line with one reply line until stdin ends.
 * Invalid requests get in-band error replies; the process only exits
 * on end of input.
 *
 * Usage:
 *   node server.js --model uniform [--vocab N] [--max-batch N]
 *   node server.js --model additive --spec spec.json [--max-batch N]
 */

import { readFileSync } from "node:fs";
import { createInterface } from "node:readline";
import { pathToFileURL } from "node:url";

import { additiveScorer, parseAdditiveSpec, Scorer, uniformScorer } from "./scorer.js";
import { replyTo, sessionHandshake } from "./session.js";

const DEFAULT_VOCAB = 100;
const DEFAULT_MAX_BATCH = 512;

interface ServerOptions {
  model: "uniform" | "additive";
  vocab: number;
  spec?: string;
  maxBatch: number;
}

export function parseArgs(argv: string[]): ServerOptions {
  const options: ServerOptions = { model: "uniform", vocab: DEFAULT_VOCAB, maxBatch: DEFAULT_MAX_BATCH };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    switch (flag) {
      case "--model":
        if (value !== "uniform" && value !== "additive") {
          throw new Error(`unknown model ${value}`);
        }
        options.model = value;
        break;
      case "--vocab":
        options.vocab = Number(value);
        break;
      case "--spec":
        options.spec = value;
        break;
      case "--max-batch":
        options.maxBatch = Number(value);
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!Number.isInteger(options.maxBatch) || options.maxBatch < 1) {
    throw new Error("--max-batch must be a positive integer");
  }
  if (options.model === "additive" && options.spec === undefined) {
    throw new Error("--model additive needs --spec");
  }
  return options;
}

export function buildScorer(options: ServerOptions): Scorer {
  if (options.model === "additive") {
    return additiveScorer(parseAdditiveSpec(readFileSync(options.spec!, "utf-8")));
  }
  return uniformScorer(options.vocab);
}

async function main(): Promise<void> {
  let scorer: Scorer;
  let maxBatch: number;
  try {
    const options = parseArgs(process.argv.slice(2));
    scorer = buildScorer(options);
    maxBatch = options.maxBatch;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.exit(1);
  }
  process.stdout.write(sessionHandshake(scorer, maxBatch) + "\n");
  const lines = createInterface({ input: process.stdin, crlfDelay: Infinity });
  for await (const line of lines) {
    if (line.trim() === "") {
      continue;
    }
    process.stdout.write(replyTo(scorer, maxBatch, line) + "\n");
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main();
}
