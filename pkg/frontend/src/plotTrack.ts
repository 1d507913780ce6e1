/**
 * Trajectory figure: estimated centroid curve with GP contour snapshots at
 * evenly spaced timesteps, optional ground-truth trace and raw measurement
 * overlays.
 */

import { writeFileSync } from "node:fs";

import {
  addLayer,
  BLACK,
  BLUE,
  Figure,
  GREEN,
  LIGHT_BLUE,
  newFigure,
} from "./figure.js";
import { contourPolygon } from "./gp.js";
import { GtRecord, parseGtRecords, parseTrackRecords, TrackRecord } from "./jsonl.js";
import { loadPlane, projectToChart } from "./plane.js";
import { listFrameDir, loadFrameFile } from "./pointcloud.js";
import { renderFigure } from "./raster.js";

export interface PlotTrackOptions {
  gtPath?: string;
  snapshotCount?: number;
  /** frame directory plus plane.json enable raw measurement overlays */
  framesDir?: string;
  planePath?: string;
}

/** Evenly spaced positions over [0, n-1], distinct, in order. */
export function snapshotIndices(n: number, count: number): number[] {
  if (n <= 0 || count <= 0) return [];
  if (count === 1 || n === 1) return [0];
  const picks = new Set<number>();
  for (let k = 0; k < count; k++) {
    picks.add(Math.round((k * (n - 1)) / (count - 1)));
  }
  return [...picks].sort((a, b) => a - b);
}

export function buildTrackFigure(
  trackPath: string,
  options: PlotTrackOptions = {},
): Figure {
  const allRecords = parseTrackRecords(trackPath);
  const drawable: { record: TrackRecord; frame: number }[] = [];
  allRecords.forEach((record, frame) => {
    if (record !== null) drawable.push({ record, frame });
  });
  if (drawable.length === 0) {
    throw new Error(`${trackPath}: no records`);
  }

  const fig = newFigure();
  addLayer(fig, {
    kind: "polyline",
    role: "trajectory",
    points: drawable.map(({ record }) => [record.x, record.y]),
    color: LIGHT_BLUE,
    width: 2,
    label: "estimated trajectory",
  });

  let gt: GtRecord[] | null = null;
  if (options.gtPath) {
    gt = parseGtRecords(options.gtPath);
    addLayer(fig, {
      kind: "polyline",
      role: "gt-trajectory",
      points: gt.map((r) => [r.x, r.y]),
      color: GREEN,
      width: 1,
      label: "ground truth",
    });
  }

  const frames =
    options.framesDir && options.planePath ? listFrameDir(options.framesDir) : null;
  const chart = options.planePath && frames ? loadPlane(options.planePath) : null;

  const count = options.snapshotCount ?? 4;
  for (const si of snapshotIndices(drawable.length, count)) {
    const { record, frame } = drawable[si];
    if (frames && chart) {
      const file = frames.get(frame);
      if (file) {
        addLayer(fig, {
          kind: "scatter",
          role: "measurements",
          points: projectToChart(loadFrameFile(file), chart),
          color: BLACK,
          size: 1,
          label: "measurements",
        });
      }
    }
    addLayer(fig, {
      kind: "polyline",
      role: "contour",
      points: contourPolygon(record.x, record.y, record.psi, record.pf),
      color: BLUE,
      width: 1.5,
      dashed: true,
      closed: true,
      label: "estimated shape",
    });
    addLayer(fig, {
      kind: "scatter",
      role: "centroid",
      points: [[record.x, record.y]],
      color: BLUE,
      size: 6,
    });
  }
  return fig;
}

export function plotTrack(trackPath: string, outPath: string, options: PlotTrackOptions = {}): Figure {
  const fig = buildTrackFigure(trackPath, options);
  writeFileSync(outPath, renderFigure(fig));
  return fig;
}
