/** Deterministic SVG building blocks (no timestamps, fixed precision). */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN: Margin = { top: 40, right: 24, bottom: 52, left: 72 };

export function fmt(v: number): string {
  // fixed decimals keep output byte-stable across platforms
  return v.toFixed(2);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
  log: boolean;
}

export function makeScale(values: number[], range: [number, number], log: boolean): Scale {
  const xs = log ? values.map(Math.abs).filter((v) => v > 0) : values;
  let lo = Math.min(...xs);
  let hi = Math.max(...xs);
  if (log) {
    lo = Math.log10(lo);
    hi = Math.log10(hi);
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;
  const f = ((v: number) => {
    const t = log ? Math.log10(Math.abs(v)) : v;
    return range[0] + ((t - lo) / (hi - lo)) * (range[1] - range[0]);
  }) as Scale;
  f.domain = [lo, hi];
  f.log = log;
  return f;
}

export function ticks(scale: Scale, count = 6): number[] {
  const [lo, hi] = scale.domain;
  if (scale.log) {
    const out: number[] = [];
    for (let e = Math.ceil(lo); e <= Math.floor(hi); e++) out.push(Math.pow(10, e));
    if (out.length >= 2) return out;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const mult = span / count / step >= 5 ? 5 : span / count / step >= 2 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) out.push(v);
  return out;
}

export function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return Math.abs(v) >= 1e4 || (Math.abs(v) < 1e-3 && v !== 0)
    ? v.toExponential(1)
    : String(Number(v.toPrecision(4)));
}

export function polyline(points: Array<[number, number]>, attrs: string): string {
  const d = points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`).join(" ");
  return `<path d="${d}" fill="none" ${attrs}/>`;
}

export function circles(points: Array<[number, number]>, r: number, attrs: string): string {
  return points
    .map(([x, y]) => `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" ${attrs}/>`)
    .join("\n");
}

export function text(x: number, y: number, content: string, attrs = ""): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" ${attrs}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function axes(
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of ticks(xs)) {
    const px = xs(t);
    parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#333"/>`);
    parts.push(
      text(px, y0 + 20, tickLabel(t, xs.log), 'text-anchor="middle" font-size="12" fill="#333"'),
    );
  }
  for (const t of ticks(ys)) {
    const py = ys(t);
    parts.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333"/>`);
    parts.push(
      text(x0 - 8, py + 4, tickLabel(t, ys.log), 'text-anchor="end" font-size="12" fill="#333"'),
    );
  }
  parts.push(
    text((x0 + x1) / 2, HEIGHT - 12, xLabel, 'text-anchor="middle" font-size="14" fill="#111"'),
  );
  parts.push(
    `<text x="16" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="14" fill="#111" transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`,
  );
  parts.push(text((x0 + x1) / 2, 22, title, 'text-anchor="middle" font-size="15" fill="#111"'));
  return parts.join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
