/**
 * The pipeline's plane chart, re-derived from its documented convention:
 * plane [a,b,c,d] with unit normal; the chart's u axis is the Gram-Schmidt
 * projection of world x (world y when the normal is x-dominant) against the
 * normal with its dominant component made positive, v completes n x u, and
 * the origin is the sensor origin projected onto the plane.
 */

import { readFileSync } from "node:fs";

import { Point3 } from "./pointcloud.js";

export interface PlaneChart {
  normal: Point3;
  d: number;
  origin: Point3;
  u: Point3;
  v: Point3;
}

function scale(p: Point3, s: number): Point3 {
  return [p[0] * s, p[1] * s, p[2] * s];
}

function sub(a: Point3, b: Point3): Point3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function dot(a: Point3, b: Point3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function cross(a: Point3, b: Point3): Point3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

export function planeChart(coeffs: number[]): PlaneChart {
  if (coeffs.length !== 4) throw new Error("plane must have 4 coefficients");
  const norm = Math.hypot(coeffs[0], coeffs[1], coeffs[2]);
  if (norm === 0) throw new Error("plane normal must be nonzero");
  const normal: Point3 = [coeffs[0] / norm, coeffs[1] / norm, coeffs[2] / norm];
  const d = coeffs[3] / norm;

  let n: Point3 = normal;
  const dominant = [0, 1, 2].reduce((best, i) =>
    Math.abs(n[i]) > Math.abs(n[best]) ? i : best,
  );
  if (n[dominant] < 0) n = scale(n, -1);
  const helper: Point3 = dominant === 0 ? [0, 1, 0] : [1, 0, 0];
  const uRaw = sub(helper, scale(n, dot(helper, n)));
  const uNorm = Math.hypot(...uRaw);
  const u = scale(uRaw, 1 / uNorm);
  const v = cross(n, u);
  return { normal, d, origin: scale(normal, -d), u, v };
}

export function loadPlane(path: string): PlaneChart {
  const coeffs = JSON.parse(readFileSync(path, "utf8"));
  return planeChart(coeffs);
}

/** Orthogonally project 3D sensor-frame points into the plane chart. */
export function projectToChart(points: Point3[], chart: PlaneChart): [number, number][] {
  return points.map((p) => {
    const signed = dot(p, chart.normal) + chart.d;
    const onPlane = sub(p, scale(chart.normal, signed));
    const rel = sub(onPlane, chart.origin);
    return [dot(rel, chart.u), dot(rel, chart.v)];
  });
}
