import { mkdirSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function tmpDir(): string {
  return mkdtempSync(join(tmpdir(), "eotrack-plots-"));
}

export interface TrackRowOptions {
  t: number;
  x: number;
  y: number;
  psi?: number;
  detected?: boolean;
}

export function trackRow({ t, x, y, psi = 0, detected = true }: TrackRowOptions): string {
  const pf = new Array(10).fill(0.18);
  const covDiag = new Array(16).fill(0.01);
  return JSON.stringify({
    t, x, y, psi, vx: 0.3, vy: 0.0, omega: 0.0,
    pf, cov_diag: covDiag, detected,
  });
}

export function preInitRow(t: number): string {
  return JSON.stringify({
    t, x: null, y: null, psi: null, vx: null, vy: null, omega: null,
    pf: null, cov_diag: null, detected: false,
  });
}

export function writeTrackFile(dir: string, lines: string[], name = "track.jsonl"): string {
  const path = join(dir, name);
  writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""));
  return path;
}

export function straightTrack(dir: string, frames = 20): string {
  const lines = [];
  for (let k = 0; k < frames; k++) {
    lines.push(trackRow({ t: k * 0.25, x: -1.5 + 0.075 * k, y: 1.7 }));
  }
  return writeTrackFile(dir, lines);
}

export function gtFile(dir: string, frames = 20): string {
  const lines = [JSON.stringify({ type: "meta", plane: [0, 0, 1, 1], robot_dims: [0.39, 0.33, 0.21] })];
  for (let k = 0; k < frames; k++) {
    lines.push(JSON.stringify({
      frame: k, t: k * 0.25, x: -1.5 + 0.075 * k, y: 1.7, psi: 0,
      vx: 0.3, vy: 0, floor_pose: [-1.5 + 0.075 * k, 1.7, 0],
      polygon: [[0, 0], [1, 0], [1, 1], [0, 1]], labels: [1, 1, 0],
    }));
  }
  const path = join(dir, "gt.jsonl");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

export function csvFrame(dir: string, index: number, points: number[][]): string {
  mkdirSync(dir, { recursive: true });
  const name = `${String(index).padStart(6, "0")}_${index * 227272727}.csv`;
  const body = "x,y,z\n" + points.map((p) => p.join(",")).join("\n") + "\n";
  const path = join(dir, name);
  writeFileSync(path, body);
  return path;
}

export function detectionRow(
  frameIndex: number,
  detected: boolean,
  center: [number, number, number] = [0, 0, 0],
  halfExtents: [number, number, number] = [0.2, 0.17, 0.1],
): string {
  return JSON.stringify({
    frame_index: frameIndex,
    detected,
    cost: detected ? 0.4 : null,
    bbox: detected
      ? {
          center,
          axes: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
          half_extents: halfExtents,
        }
      : null,
    point_count: detected ? 42 : 0,
    robot_overlap: null,
  });
}
