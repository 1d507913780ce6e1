/**
 * Reading the primary pipeline's frame files: ASCII PCD v0.7, ASCII PLY, and
 * x,y,z CSV, plus the <index>_<timestamp_ns>.<ext> directory convention.
 */

import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";

export type Point3 = [number, number, number];

const FRAME_FILE = /^(\d+)_(\d+)\.(pcd|ply|csv)$/;

function parseRows(lines: string[], cols: [number, number, number], path: string): Point3[] {
  const pts: Point3[] = [];
  for (const line of lines) {
    if (!line.trim()) continue;
    const parts = line.trim().split(/[\s,]+/);
    const p: Point3 = [Number(parts[cols[0]]), Number(parts[cols[1]]), Number(parts[cols[2]])];
    if (p.some((v) => !Number.isFinite(v))) {
      throw new Error(`${path}: malformed data row: ${line}`);
    }
    pts.push(p);
  }
  return pts;
}

export function loadFrameFile(path: string): Point3[] {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n");
  if (path.endsWith(".csv")) {
    const header = lines[0].split(",").map((s) => s.trim());
    if (header[0] !== "x" || header[1] !== "y" || header[2] !== "z") {
      throw new Error(`${path}: CSV must start with an x,y,z header`);
    }
    return parseRows(lines.slice(1), [0, 1, 2], path);
  }
  if (path.endsWith(".pcd")) {
    let fields: string[] = [];
    let start = -1;
    for (let i = 0; i < lines.length; i++) {
      const tok = lines[i].trim().split(/\s+/);
      if (tok[0] === "FIELDS") fields = tok.slice(1);
      if (tok[0] === "DATA") {
        if (tok[1] !== "ascii") throw new Error(`${path}: only ascii PCD is supported`);
        start = i + 1;
        break;
      }
    }
    if (start < 0) throw new Error(`${path}: missing PCD DATA header`);
    const cols: [number, number, number] = [
      fields.indexOf("x"),
      fields.indexOf("y"),
      fields.indexOf("z"),
    ];
    if (cols.some((c) => c < 0)) throw new Error(`${path}: PCD FIELDS must include x y z`);
    return parseRows(lines.slice(start), cols, path);
  }
  if (path.endsWith(".ply")) {
    const props: string[] = [];
    let inVertex = false;
    let start = -1;
    for (let i = 0; i < lines.length; i++) {
      const tok = lines[i].trim().split(/\s+/);
      if (tok[0] === "format" && tok[1] !== "ascii") {
        throw new Error(`${path}: only ascii PLY is supported`);
      }
      if (tok[0] === "element") inVertex = tok[1] === "vertex";
      if (tok[0] === "property" && inVertex) props.push(tok[tok.length - 1]);
      if (tok[0] === "end_header") {
        start = i + 1;
        break;
      }
    }
    if (start < 0) throw new Error(`${path}: missing PLY end_header`);
    const cols: [number, number, number] = [props.indexOf("x"), props.indexOf("y"), props.indexOf("z")];
    if (cols.some((c) => c < 0)) throw new Error(`${path}: PLY properties must include x y z`);
    return parseRows(lines.slice(start), cols, path);
  }
  throw new Error(`${path}: unsupported frame extension`);
}

/** Map frame index -> file path for a directory of frame files. */
export function listFrameDir(dir: string): Map<number, string> {
  const out = new Map<number, string>();
  for (const name of readdirSync(dir)) {
    const m = FRAME_FILE.exec(name);
    if (m) out.set(Number(m[1]), join(dir, name));
  }
  return out;
}
