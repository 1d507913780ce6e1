/**
 * Per-frame detection scatters: every point of the frame in gray, the points
 * inside the detected bounding box highlighted in blue. One PNG per frame.
 */

import { existsSync, mkdirSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { addLayer, BLUE, Figure, GRAY, newFigure } from "./figure.js";
import { DetectionRecord, parseDetectionRecords } from "./jsonl.js";
import { loadPlane, PlaneChart, projectToChart } from "./plane.js";
import { listFrameDir, loadFrameFile, Point3 } from "./pointcloud.js";
import { renderFigure } from "./raster.js";

export interface PlotDetectionsSummary {
  written: number;
  skippedMissing: number;
  outputs: string[];
}

function insideBox(p: Point3, det: DetectionRecord): boolean {
  const b = det.bbox;
  if (!b) return false;
  for (let i = 0; i < 3; i++) {
    const axis = b.axes[i];
    const proj =
      axis[0] * (p[0] - b.center[0]) +
      axis[1] * (p[1] - b.center[1]) +
      axis[2] * (p[2] - b.center[2]);
    if (Math.abs(proj) > b.halfExtents[i] + 1e-9) return false;
  }
  return true;
}

/** Top-down scatter of one frame; chart projection when a plane is given. */
export function buildDetectionFigure(
  points: Point3[],
  det: DetectionRecord,
  chart: PlaneChart | null = null,
): Figure {
  const coords = chart
    ? projectToChart(points, chart)
    : points.map((p): [number, number] => [p[0], p[1]]);
  const target: [number, number][] = [];
  const background: [number, number][] = [];
  points.forEach((p, i) => {
    (det.detected && insideBox(p, det) ? target : background).push(coords[i]);
  });

  const fig = newFigure();
  addLayer(fig, {
    kind: "scatter",
    role: "background-points",
    points: background,
    color: GRAY,
    size: 1.5,
    label: "background",
  });
  if (target.length > 0) {
    addLayer(fig, {
      kind: "scatter",
      role: "target-points",
      points: target,
      color: BLUE,
      size: 1.5,
      label: "detected robot points",
    });
  }
  return fig;
}

export function plotDetections(
  framesDir: string,
  detectionsPath: string,
  outDir: string,
  planePath?: string,
): PlotDetectionsSummary {
  const detections = parseDetectionRecords(detectionsPath);
  const frames = listFrameDir(framesDir);
  const chart = planePath ? loadPlane(planePath) : null;
  mkdirSync(outDir, { recursive: true });

  const summary: PlotDetectionsSummary = { written: 0, skippedMissing: 0, outputs: [] };
  for (const det of detections) {
    const file = frames.get(det.frameIndex);
    if (!file || !existsSync(file)) {
      console.warn(`warning: no frame file for index ${det.frameIndex}, skipping`);
      summary.skippedMissing += 1;
      continue;
    }
    const fig = buildDetectionFigure(loadFrameFile(file), det, chart);
    const out = join(outDir, basename(file).replace(/\.(pcd|ply|csv)$/, ".png"));
    writeFileSync(out, renderFigure(fig));
    summary.written += 1;
    summary.outputs.push(out);
  }
  return summary;
}
