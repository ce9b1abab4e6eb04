/** Ordinary least squares, the only numerics this package performs. */

export interface Fit {
  slope: number;
  stderr: number;
  intercept: number;
  n: number;
}

export function leastSquares(x: number[], y: number[]): Fit {
  const n = x.length;
  if (n !== y.length) throw new Error("x and y lengths differ");
  if (n < 2) throw new Error(`need at least 2 points for a fit, got ${n}`);
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx === 0) throw new Error("all x values identical");
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let rss = 0;
  for (let i = 0; i < n; i++) {
    const r = y[i] - intercept - slope * x[i];
    rss += r * r;
  }
  const stderr = n > 2 ? Math.sqrt(rss / (n - 2) / sxx) : 0;
  return { slope, stderr, intercept, n };
}

/** Fit log|y| against log x, dropping non-positive |y| (log-undefined). */
export function fitLogLog(x: number[], y: number[]): Fit {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < x.length; i++) {
    const ay = Math.abs(y[i]);
    if (x[i] > 0 && ay > 0) {
      lx.push(Math.log(x[i]));
      ly.push(Math.log(ay));
    }
  }
  return leastSquares(lx, ly);
}
