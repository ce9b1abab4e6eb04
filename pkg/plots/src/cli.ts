#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { PlotKind, render } from "./render";

const argv = yargs(hideBin(process.argv))
  .usage("render --csv in.csv --kind loglog-slope [--ref-slope -6] --out fig.svg")
  .option("csv", { type: "string", demandOption: true, describe: "input CSV path" })
  .option("kind", {
    choices: ["loglog-slope", "trajectory-2d", "decay"] as const,
    demandOption: true,
  })
  .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
  .option("x-col", { type: "string", describe: "x column (kind-specific default)" })
  .option("y-col", { type: "string", describe: "y column (kind-specific default)" })
  .option("x-label", { type: "string" })
  .option("y-label", { type: "string" })
  .option("title", { type: "string" })
  .option("ref-slope", { type: "number", describe: "dashed reference slope overlay" })
  .option("sidecar", { type: "string", describe: "slope sidecar JSON (default <csv>.slope.json)" })
  .option("fit-floor", {
    type: "number",
    describe: "|y| below this is excluded from the fit (default 1e-12)",
  })
  .strict()
  .parseSync();

try {
  const result = render({
    csvPath: argv.csv,
    kind: argv.kind as PlotKind,
    outPath: argv.out,
    xCol: argv["x-col"],
    yCol: argv["y-col"],
    xLabel: argv["x-label"],
    yLabel: argv["y-label"],
    title: argv.title,
    refSlope: argv["ref-slope"],
    sidecarPath: argv.sidecar,
    fitFloor: argv["fit-floor"],
  });
  if (result.annotatedSlope !== undefined) {
    console.log(
      `wrote ${argv.out} (slope = ${result.annotatedSlope} ± ${result.annotatedStderr})`,
    );
  } else {
    console.log(`wrote ${argv.out}`);
  }
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
