/**
 * Periodic Gaussian-process regression over the radial extent function,
 * re-derived from the documented kernel so this package stays independent of
 * the tracker:
 *
 *   k(t, t') = signalStd^2 * exp(-2 sin^2((t-t')/2) / lengthScale^2)
 *              + meanRadiusStd^2
 *
 * The track log stores radii at N equally spaced body angles starting at 0;
 * regression against those values interpolates the contour at any angle.
 */

export interface GpParams {
  signalStd: number;
  meanRadiusStd: number;
  noiseStd: number;
  lengthScale: number;
}

export const DEFAULT_GP: GpParams = {
  signalStd: 0.01,
  meanRadiusStd: 0.005,
  noiseStd: 0.001,
  lengthScale: Math.PI / 6,
};

export function kernel(t1: number, t2: number, p: GpParams = DEFAULT_GP): number {
  const s = Math.sin((t1 - t2) / 2);
  return (
    p.signalStd * p.signalStd * Math.exp((-2 * s * s) / (p.lengthScale * p.lengthScale)) +
    p.meanRadiusStd * p.meanRadiusStd
  );
}

export function testAngles(count: number): number[] {
  return Array.from({ length: count }, (_, k) => (2 * Math.PI * k) / count);
}

/** Cholesky factorization of a symmetric positive-definite matrix. */
function cholesky(a: number[][]): number[][] {
  const n = a.length;
  const l = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    for (let j = 0; j <= i; j++) {
      let sum = a[i][j];
      for (let k = 0; k < j; k++) sum -= l[i][k] * l[j][k];
      if (i === j) {
        if (sum <= 0) throw new Error("kernel Gram matrix is not positive definite");
        l[i][i] = Math.sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return l;
}

function choleskySolve(l: number[][], b: number[]): number[] {
  const n = l.length;
  const y = new Array<number>(n).fill(0);
  for (let i = 0; i < n; i++) {
    let sum = b[i];
    for (let k = 0; k < i; k++) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  const x = new Array<number>(n).fill(0);
  for (let i = n - 1; i >= 0; i--) {
    let sum = y[i];
    for (let k = i + 1; k < n; k++) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
  return x;
}

export class RadialRegressor {
  private readonly angles: number[];
  private readonly chol: number[][];
  private readonly params: GpParams;

  constructor(numAngles: number, params: GpParams = DEFAULT_GP) {
    this.params = params;
    this.angles = testAngles(numAngles);
    const gram = this.angles.map((a) =>
      this.angles.map((b) => kernel(a, b, params) + (a === b ? params.noiseStd ** 2 : 0)),
    );
    this.chol = cholesky(gram);
  }

  /** Regression weights so that weights . radii is the radius at theta. */
  weightsAt(theta: number): number[] {
    const kvec = this.angles.map((a) => kernel(theta, a, this.params));
    return choleskySolve(this.chol, kvec);
  }

  radiusAt(theta: number, radii: number[]): number {
    const w = this.weightsAt(theta);
    let r = 0;
    for (let i = 0; i < w.length; i++) r += w[i] * radii[i];
    return r;
  }
}

/**
 * Closed contour polygon of a tracked state: radii regressed at `samples`
 * body angles, placed at the pose (x, y, heading).
 */
export function contourPolygon(
  x: number,
  y: number,
  heading: number,
  radii: number[],
  samples = 360,
  params: GpParams = DEFAULT_GP,
): [number, number][] {
  const reg = new RadialRegressor(radii.length, params);
  const pts: [number, number][] = [];
  for (let k = 0; k < samples; k++) {
    const body = (2 * Math.PI * k) / samples;
    const r = reg.radiusAt(body, radii);
    const phi = body + heading;
    pts.push([x + r * Math.cos(phi), y + r * Math.sin(phi)]);
  }
  return pts;
}
