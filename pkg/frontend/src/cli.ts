#!/usr/bin/env node
/** plots <figure-kind> --in results.csv --out fig.png
 *
 * Reads a runner result CSV and writes a figure analogue. The emitted file
 * content is SVG regardless of the output extension. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { CsvError, parseResults } from "./csv.js";
import { FIGURE_KINDS, buildFigure } from "./figures.js";
import { renderChart } from "./svg.js";

export function run(argv: string[]): number {
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  try {
    const { values, positionals } = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        out: { type: "string" },
      },
      allowPositionals: true,
    });
    kind = positionals[0];
    input = values.in;
    output = values.out;
  } catch (e) {
    console.error(`plots: ${(e as Error).message}`);
    return 1;
  }
  if (!kind || !input || !output) {
    console.error(
      `plots: usage: plots <${FIGURE_KINDS.join("|")}> --in results.csv --out fig.png`,
    );
    return 1;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (e) {
    console.error(`plots: cannot read ${input}: ${(e as Error).message}`);
    return 1;
  }
  try {
    const rows = parseResults(text);
    const svg = renderChart(buildFigure(kind, rows));
    writeFileSync(output, svg);
  } catch (e) {
    if (e instanceof CsvError) {
      console.error(`plots: ${e.message}`);
      return 1;
    }
    console.error(`plots: ${(e as Error).message}`);
    return 2;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
