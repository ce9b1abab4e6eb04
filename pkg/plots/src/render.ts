/** Figure rendering from lowsnr CSV artifacts.

Three kinds:
  loglog-slope   log-log scatter of (x, |y|) with the fitted line, the
                 slope annotated as "slope = s +/- e" (full precision in
                 a data-slope attribute), optional dashed reference slope
  trajectory-2d  a 2-D path through two selected columns
  decay          log-log decay curve with markers, optional reference slope

The only numerics performed is the least-squares line; when a
".slope.json" sidecar from the CLI is present, the recomputed slope is
cross-checked against it to 1e-9 and rendering fails on disagreement.
*/

import * as fs from "fs";

import { column, parseCsv, Table } from "./csv";
import { Fit, fitLogLog } from "./slope";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  axes,
  circles,
  document as svgDocument,
  makeScale,
  polyline,
  text,
} from "./svg";

export type PlotKind = "loglog-slope" | "trajectory-2d" | "decay";

export interface PlotSpec {
  csvPath: string;
  kind: PlotKind;
  outPath: string;
  xCol?: string;
  yCol?: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
  refSlope?: number;
  sidecarPath?: string;
  /** |y| below this is excluded from the fit (numerical noise floor of
   *  the producing pipeline; matches the expansion scan's 1e-12). */
  fitFloor?: number;
}

export interface RenderResult {
  svg: string;
  annotatedSlope?: number;
  annotatedStderr?: number;
}

const DEFAULTS: Record<PlotKind, { x: string; y: string }> = {
  "loglog-slope": { x: "sigma", y: "abs_residual" },
  "trajectory-2d": { x: "center_0_0", y: "center_0_1" },
  decay: { x: "sigma", y: "t1_norm" },
};

const SIDECAR_TOL = 1e-9;
const DEFAULT_FIT_FLOOR = 1e-12;

function loadTable(spec: PlotSpec): Table {
  const table = parseCsv(fs.readFileSync(spec.csvPath, "utf8"));
  if (table.rows.length < 2) {
    throw new Error(`need at least 2 data rows, got ${table.rows.length}`);
  }
  return table;
}

function defaultSidecar(csvPath: string): string {
  return csvPath.replace(/\.csv$/, "") + ".slope.json";
}

function checkSidecar(spec: PlotSpec, fit: Fit): void {
  const path = spec.sidecarPath ?? defaultSidecar(spec.csvPath);
  if (!fs.existsSync(path)) return;
  const sidecar = JSON.parse(fs.readFileSync(path, "utf8"));
  if (typeof sidecar.fitted_slope !== "number") return;
  const dev = Math.abs(sidecar.fitted_slope - fit.slope);
  if (dev > SIDECAR_TOL) {
    throw new Error(
      `recomputed slope ${fit.slope} disagrees with sidecar ${sidecar.fitted_slope} by ${dev}`,
    );
  }
}

function frame(): [number, number, number, number] {
  return [MARGIN.left, WIDTH - MARGIN.right, HEIGHT - MARGIN.bottom, MARGIN.top];
}

function renderLogLog(spec: PlotSpec, table: Table, annotate: boolean): RenderResult {
  const xName = spec.xCol ?? DEFAULTS[spec.kind].x;
  const yName = spec.yCol ?? DEFAULTS[spec.kind].y;
  const xsRaw = column(table, xName);
  const ysRaw = column(table, yName);
  const pairs = xsRaw
    .map((x, i) => [x, Math.abs(ysRaw[i])] as [number, number])
    .filter(([x, y]) => x > 0 && y > 0);
  if (pairs.length < 2) {
    throw new Error(`need at least 2 positive rows for a log-log plot, got ${pairs.length}`);
  }
  const [x0, x1, y0, y1] = frame();
  const xs = makeScale(pairs.map((p) => p[0]), [x0, x1], true);
  const ys = makeScale(pairs.map((p) => p[1]), [y0, y1], true);
  const pts = pairs.map(([x, y]) => [xs(x), ys(y)] as [number, number]);

  const body: string[] = [];
  body.push(
    axes(
      xs,
      ys,
      spec.xLabel ?? xName,
      spec.yLabel ?? yName,
      spec.title ?? `${yName} vs ${xName}`,
    ),
  );
  let fit: Fit | undefined;
  const floor = spec.fitFloor ?? DEFAULT_FIT_FLOOR;
  const fitPairs = annotate ? pairs.filter(([, y]) => y >= floor) : pairs;
  if (annotate) {
    if (fitPairs.length < 2) {
      throw new Error(
        `need at least 2 rows above the fit floor ${floor}, got ${fitPairs.length}`,
      );
    }
    fit = fitLogLog(fitPairs.map((p) => p[0]), fitPairs.map((p) => p[1]));
    checkSidecar(spec, fit);
  }
  if (spec.refSlope !== undefined) {
    // dashed reference through the first data point
    const [rx, ry] = pairs[0];
    const ref = pairs.map(
      ([x]) => [xs(x), ys(ry * Math.pow(x / rx, spec.refSlope!))] as [number, number],
    );
    body.push(polyline(ref, 'stroke="#888" stroke-width="1.5" stroke-dasharray="6,4"'));
    body.push(
      text(x1 - 8, y1 + 16, `reference slope ${spec.refSlope}`,
        'text-anchor="end" font-size="12" fill="#888"'),
    );
  }
  if (fit) {
    const line = fitPairs.map(
      ([x]) => [xs(x), ys(Math.exp(fit!.intercept + fit!.slope * Math.log(x)))] as [
        number,
        number,
      ],
    );
    body.push(polyline(line, 'stroke="#d62728" stroke-width="1.5"'));
  }
  body.push(polyline(pts, 'stroke="#1f77b4" stroke-width="1"'));
  const fitSet = new Set(fitPairs.map(([x, y]) => `${x},${y}`));
  const solid = pairs.filter(([x, y]) => !annotate || fitSet.has(`${x},${y}`));
  const hollow = annotate ? pairs.filter(([x, y]) => !fitSet.has(`${x},${y}`)) : [];
  body.push(circles(solid.map(([x, y]) => [xs(x), ys(y)]), 3.5, 'fill="#1f77b4"'));
  if (hollow.length > 0) {
    // below the fit floor: shown but excluded from the fitted line
    body.push(
      circles(hollow.map(([x, y]) => [xs(x), ys(y)]), 3.5,
        'fill="none" stroke="#1f77b4" stroke-width="1.2"'),
    );
  }
  let annotatedSlope: number | undefined;
  let annotatedStderr: number | undefined;
  if (fit) {
    annotatedSlope = fit.slope;
    annotatedStderr = fit.stderr;
    const label = `slope = ${fit.slope.toFixed(2)} ± ${fit.stderr.toFixed(2)}`;
    body.push(
      `<text x="${x0 + 12}" y="${y1 + 18}" font-size="14" fill="#d62728" ` +
        `data-slope="${fit.slope.toPrecision(17)}" data-stderr="${fit.stderr.toPrecision(17)}">` +
        `${label}</text>`,
    );
  }
  return { svg: svgDocument(body.join("\n")), annotatedSlope, annotatedStderr };
}

function renderTrajectory(spec: PlotSpec, table: Table): RenderResult {
  const xName = spec.xCol ?? DEFAULTS["trajectory-2d"].x;
  const yName = spec.yCol ?? DEFAULTS["trajectory-2d"].y;
  const xsRaw = column(table, xName);
  const ysRaw = column(table, yName);
  const [x0, x1, y0, y1] = frame();
  const xs = makeScale(xsRaw, [x0, x1], false);
  const ys = makeScale(ysRaw, [y0, y1], false);
  const pts = xsRaw.map((x, i) => [xs(x), ys(ysRaw[i])] as [number, number]);
  const body: string[] = [];
  body.push(
    axes(xs, ys, spec.xLabel ?? xName, spec.yLabel ?? yName, spec.title ?? "trajectory"),
  );
  body.push(polyline(pts, 'stroke="#1f77b4" stroke-width="1.5"'));
  body.push(circles(pts, 2.5, 'fill="#1f77b4"'));
  body.push(circles([pts[0]], 5, 'fill="none" stroke="#2ca02c" stroke-width="2"'));
  body.push(circles([pts[pts.length - 1]], 5, 'fill="#d62728"'));
  body.push(text(pts[0][0] + 8, pts[0][1] - 8, "start", 'font-size="12" fill="#2ca02c"'));
  body.push(
    text(pts[pts.length - 1][0] + 8, pts[pts.length - 1][1] - 8, "end",
      'font-size="12" fill="#d62728"'),
  );
  return { svg: svgDocument(body.join("\n")) };
}

export function render(spec: PlotSpec): RenderResult {
  const table = loadTable(spec);
  let result: RenderResult;
  switch (spec.kind) {
    case "loglog-slope":
      result = renderLogLog(spec, table, true);
      break;
    case "decay":
      result = renderLogLog(spec, table, false);
      break;
    case "trajectory-2d":
      result = renderTrajectory(spec, table);
      break;
    default:
      throw new Error(`unknown plot kind ${JSON.stringify(spec.kind)}`);
  }
  fs.writeFileSync(spec.outPath, result.svg);
  return result;
}
