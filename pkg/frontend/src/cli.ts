#!/usr/bin/env node
/** Usage:
 *   node dist/cli.js --kind nmse-vs-snr --group-by n --output fig2.svg sweep.csv [more.csv ...]
 */

import { FigureKind, FigureSpec, render } from "./render.js";

const KINDS: FigureKind[] = ["nmse-vs-snr", "nmse-vs-k", "nmse-and-iters-vs-epsilon"];

function parseArgs(argv: string[]): FigureSpec {
  let kind: FigureKind | undefined;
  let groupBy: "n" | "k" | undefined;
  let output: string | undefined;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--kind") {
      const value = argv[++i];
      if (!KINDS.includes(value as FigureKind)) {
        throw new Error(`--kind must be one of ${KINDS.join(", ")}, got "${value}"`);
      }
      kind = value as FigureKind;
    } else if (arg === "--group-by") {
      const value = argv[++i];
      if (value !== "n" && value !== "k") {
        throw new Error(`--group-by must be "n" or "k", got "${value}"`);
      }
      groupBy = value;
    } else if (arg === "--output" || arg === "-o") {
      output = argv[++i];
    } else if (arg.startsWith("-")) {
      throw new Error(`unknown option "${arg}"`);
    } else {
      inputs.push(arg);
    }
  }
  if (!kind) throw new Error("--kind is required");
  if (!output) throw new Error("--output is required");
  if (inputs.length === 0) throw new Error("at least one input CSV is required");
  return { kind, groupBy: groupBy ?? "n", output, inputs };
}

try {
  const spec = parseArgs(process.argv.slice(2));
  render(spec);
  console.log(`wrote ${spec.output}`);
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
