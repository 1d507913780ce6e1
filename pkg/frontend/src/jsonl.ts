/**
 * Parsing and validation of the run artifacts (track.jsonl, detections.jsonl,
 * gt.jsonl). Every malformed row aborts with its line number; rows from
 * before tracker initialization (all state fields null, detected false) are
 * legal and returned as null.
 */

import { readFileSync } from "node:fs";

export interface TrackRecord {
  t: number;
  x: number;
  y: number;
  psi: number;
  vx: number;
  vy: number;
  omega: number;
  pf: number[];
  covDiag: number[];
  detected: boolean;
}

export interface DetectionBox {
  center: [number, number, number];
  axes: number[][];
  halfExtents: [number, number, number];
}

export interface DetectionRecord {
  frameIndex: number;
  detected: boolean;
  cost: number | null;
  bbox: DetectionBox | null;
  pointCount: number;
}

export interface GtRecord {
  t: number;
  x: number;
  y: number;
  psi: number;
}

function rows(path: string): { line: number; value: unknown }[] {
  const text = readFileSync(path, "utf8");
  const out: { line: number; value: unknown }[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    if (!lines[i].trim()) continue;
    try {
      out.push({ line: i + 1, value: JSON.parse(lines[i]) });
    } catch (err) {
      throw new Error(`${path}:${i + 1}: malformed JSONL row: ${(err as Error).message}`);
    }
  }
  return out;
}

function finiteNumber(obj: Record<string, unknown>, field: string, where: string): number {
  const v = obj[field];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new Error(`${where}: field '${field}' must be a finite number, got ${JSON.stringify(v)}`);
  }
  return v;
}

function finiteArray(obj: Record<string, unknown>, field: string, where: string): number[] {
  const v = obj[field];
  if (!Array.isArray(v) || v.length === 0 || v.some((e) => typeof e !== "number" || !Number.isFinite(e))) {
    throw new Error(`${where}: field '${field}' must be a non-empty array of finite numbers`);
  }
  return v as number[];
}

const TRACK_STATE_FIELDS = ["x", "y", "psi", "vx", "vy", "omega", "pf", "cov_diag"] as const;

/**
 * Parse track.jsonl. Returns one entry per row: a TrackRecord, or null for
 * pre-initialization rows.
 */
export function parseTrackRecords(path: string): (TrackRecord | null)[] {
  const out: (TrackRecord | null)[] = [];
  for (const { line, value } of rows(path)) {
    const where = `${path}:${line}`;
    if (typeof value !== "object" || value === null || Array.isArray(value)) {
      throw new Error(`${where}: expected a JSON object`);
    }
    const obj = value as Record<string, unknown>;
    for (const field of ["t", "detected", ...TRACK_STATE_FIELDS]) {
      if (!(field in obj)) throw new Error(`${where}: missing field '${field}'`);
    }
    if (typeof obj.detected !== "boolean") {
      throw new Error(`${where}: field 'detected' must be a boolean`);
    }
    if (obj.x === null) {
      // pre-initialization row: every state field must be null, no detection
      if (obj.detected !== false || TRACK_STATE_FIELDS.some((f) => obj[f] !== null)) {
        throw new Error(`${where}: pre-initialization rows must have all state fields null`);
      }
      finiteNumber(obj, "t", where);
      out.push(null);
      continue;
    }
    out.push({
      t: finiteNumber(obj, "t", where),
      x: finiteNumber(obj, "x", where),
      y: finiteNumber(obj, "y", where),
      psi: finiteNumber(obj, "psi", where),
      vx: finiteNumber(obj, "vx", where),
      vy: finiteNumber(obj, "vy", where),
      omega: finiteNumber(obj, "omega", where),
      pf: finiteArray(obj, "pf", where),
      covDiag: finiteArray(obj, "cov_diag", where),
      detected: obj.detected,
    });
  }
  return out;
}

export function parseDetectionRecords(path: string): DetectionRecord[] {
  const out: DetectionRecord[] = [];
  for (const { line, value } of rows(path)) {
    const where = `${path}:${line}`;
    const obj = value as Record<string, unknown>;
    if (typeof obj !== "object" || obj === null) {
      throw new Error(`${where}: expected a JSON object`);
    }
    const detected = obj.detected;
    if (typeof detected !== "boolean") {
      throw new Error(`${where}: field 'detected' must be a boolean`);
    }
    let bbox: DetectionBox | null = null;
    if (detected) {
      const raw = obj.bbox as Record<string, unknown> | null;
      if (!raw) throw new Error(`${where}: detected rows must carry a bbox`);
      const center = finiteArray(raw, "center", where);
      const half = finiteArray(raw, "half_extents", where);
      const axes = raw.axes;
      if (
        center.length !== 3 || half.length !== 3 || !Array.isArray(axes) || axes.length !== 3
      ) {
        throw new Error(`${where}: bbox must have 3-vector center/half_extents and 3 axes`);
      }
      bbox = {
        center: center as [number, number, number],
        axes: axes as number[][],
        halfExtents: half as [number, number, number],
      };
    }
    out.push({
      frameIndex: finiteNumber(obj, "frame_index", where),
      detected,
      cost: detected ? finiteNumber(obj, "cost", where) : null,
      bbox,
      pointCount: finiteNumber(obj, "point_count", where),
    });
  }
  return out;
}

/** Parse gt.jsonl (one meta line, then per-frame rows). */
export function parseGtRecords(path: string): GtRecord[] {
  const all = rows(path);
  const out: GtRecord[] = [];
  for (const { line, value } of all) {
    const obj = value as Record<string, unknown>;
    if (obj && obj.type === "meta") continue;
    const where = `${path}:${line}`;
    out.push({
      t: finiteNumber(obj, "t", where),
      x: finiteNumber(obj, "x", where),
      y: finiteNumber(obj, "y", where),
      psi: finiteNumber(obj, "psi", where),
    });
  }
  return out;
}
