import { readdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it, vi } from "vitest";

import { BLUE, GRAY, layersByRole } from "../src/figure.js";
import { parseDetectionRecords } from "../src/jsonl.js";
import { buildDetectionFigure, plotDetections } from "../src/plotDetections.js";
import { loadFrameFile } from "../src/pointcloud.js";
import { csvFrame, detectionRow, tmpDir } from "./fixtures.js";

function makeRun(dir: string, frames: number, detectedMask?: boolean[]) {
  const framesDir = join(dir, "frames");
  const detections: string[] = [];
  for (let k = 0; k < frames; k++) {
    // a blob around the origin plus two far background points
    const pts = [
      [0.05, 0.02, 0.03], [-0.03, 0.01, 0.02], [0.0, -0.04, 0.05],
      [2.0, 2.0, 0.5], [-2.0, 1.0, 0.2],
    ];
    csvFrame(framesDir, k, pts);
    const detected = detectedMask ? detectedMask[k] : true;
    detections.push(detectionRow(k, detected));
  }
  const detPath = join(dir, "detections.jsonl");
  writeFileSync(detPath, detections.join("\n") + "\n");
  return { framesDir, detPath };
}

describe("buildDetectionFigure", () => {
  it("splits gray background from blue in-box points", () => {
    const dir = tmpDir();
    const { framesDir, detPath } = makeRun(dir, 1);
    const [det] = parseDetectionRecords(detPath);
    const points = loadFrameFile(join(framesDir, readdirSync(framesDir)[0]));
    const fig = buildDetectionFigure(points, det);
    const background = layersByRole(fig, "background-points");
    const target = layersByRole(fig, "target-points");
    expect(background).toHaveLength(1);
    expect(target).toHaveLength(1);
    expect(background[0].color).toEqual(GRAY);
    expect(target[0].color).toEqual(BLUE);
    expect(target[0].points).toHaveLength(3);
    expect(background[0].points).toHaveLength(2);
  });

  it("produces no highlight layer without a detection", () => {
    const dir = tmpDir();
    const { framesDir, detPath } = makeRun(dir, 1, [false]);
    const [det] = parseDetectionRecords(detPath);
    const points = loadFrameFile(join(framesDir, readdirSync(framesDir)[0]));
    const fig = buildDetectionFigure(points, det);
    expect(layersByRole(fig, "target-points")).toHaveLength(0);
    expect(layersByRole(fig, "background-points")[0].points).toHaveLength(5);
  });
});

describe("plotDetections", () => {
  it("writes one image per frame", () => {
    const dir = tmpDir();
    const { framesDir, detPath } = makeRun(dir, 6);
    const outDir = join(dir, "out");
    const summary = plotDetections(framesDir, detPath, outDir);
    expect(summary.written).toBe(6);
    expect(summary.skippedMissing).toBe(0);
    const images = readdirSync(outDir).filter((f) => f.endsWith(".png"));
    expect(images).toHaveLength(6);
    for (const image of images) {
      expect(readFileSync(join(outDir, image)).length).toBeGreaterThan(100);
    }
  });

  it("still writes an image for frames without a detection", () => {
    const dir = tmpDir();
    const { framesDir, detPath } = makeRun(dir, 3, [true, false, true]);
    const summary = plotDetections(framesDir, detPath, join(dir, "out"));
    expect(summary.written).toBe(3);
  });

  it("skips missing frame files with a warning and counts them", () => {
    const dir = tmpDir();
    const { framesDir, detPath } = makeRun(dir, 3);
    const extra = detectionRow(7, true); // no frame file with index 7
    writeFileSync(detPath, readFileSync(detPath, "utf8") + extra + "\n");
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const summary = plotDetections(framesDir, detPath, join(dir, "out"));
    expect(summary.written).toBe(3);
    expect(summary.skippedMissing).toBe(1);
    expect(warn).toHaveBeenCalledOnce();
    warn.mockRestore();
  });
});
