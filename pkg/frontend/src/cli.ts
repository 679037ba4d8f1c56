#!/usr/bin/env node
/**
 * rislink-render: draw SVG figures from rislink CSV artifacts.
 *
 * Usage:
 *   rislink-render --kind constellation --in a.csv [b.csv ...] --out fig.svg
 *   rislink-render --kind capacity      --in sweep.csv ...     --out fig.svg
 *   rislink-render --kind sep           --in sim.csv theory.csv --out fig.svg
 *
 * Nothing is written when the inputs fail validation.
 */

import { readFile, writeFile } from "fs/promises";
import path from "path";

import { parseTable } from "./csv.js";
import { NamedTable, capacityFigure, constellationFigure, sepFigure } from "./figures.js";

const KINDS = ["constellation", "capacity", "sep"] as const;
type Kind = (typeof KINDS)[number];

interface Args {
  kind: Kind;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  let kind: string | null = null;
  let out: string | null = null;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--out") out = argv[++i];
    else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
    } else throw new Error(`unknown argument: ${a}`);
  }
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (inputs.length === 0) throw new Error("at least one --in CSV is required");
  if (!out) throw new Error("--out is required");
  return { kind: kind as Kind, inputs, out };
}

export async function runCli(argv: string[]): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  try {
    const tables: NamedTable[] = [];
    for (const p of args.inputs) {
      const text = await readFile(p, "utf-8");
      tables.push({ name: path.basename(p, ".csv"), table: parseTable(text) });
    }
    const build =
      args.kind === "constellation"
        ? constellationFigure
        : args.kind === "capacity"
          ? capacityFigure
          : sepFigure;
    const { svg } = build(tables);
    await writeFile(args.out, svg, "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (e) {
    console.error(`render error: ${(e as Error).message}`);
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isMain) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
