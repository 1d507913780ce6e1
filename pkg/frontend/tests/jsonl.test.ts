import { writeFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseDetectionRecords, parseGtRecords, parseTrackRecords } from "../src/jsonl.js";
import { detectionRow, gtFile, preInitRow, tmpDir, trackRow, writeTrackFile } from "./fixtures.js";

describe("parseTrackRecords", () => {
  it("parses valid rows with field mapping", () => {
    const dir = tmpDir();
    const path = writeTrackFile(dir, [trackRow({ t: 0.5, x: 1.0, y: 2.0 })]);
    const records = parseTrackRecords(path);
    expect(records).toHaveLength(1);
    expect(records[0]).toMatchObject({ t: 0.5, x: 1.0, y: 2.0, detected: true });
    expect(records[0]?.pf).toHaveLength(10);
  });

  it("returns null entries for pre-initialization rows", () => {
    const dir = tmpDir();
    const path = writeTrackFile(dir, [preInitRow(0.25), trackRow({ t: 0.5, x: 0, y: 0 })]);
    const records = parseTrackRecords(path);
    expect(records[0]).toBeNull();
    expect(records[1]).not.toBeNull();
  });

  it("reports the line number of malformed JSON", () => {
    const dir = tmpDir();
    const path = writeTrackFile(dir, [trackRow({ t: 0, x: 0, y: 0 }), "{not json"]);
    expect(() => parseTrackRecords(path)).toThrow(/:2: malformed JSONL row/);
  });

  it("reports the line number of a missing field", () => {
    const dir = tmpDir();
    const row = JSON.parse(trackRow({ t: 0, x: 0, y: 0 }));
    delete row.psi;
    const path = writeTrackFile(dir, [JSON.stringify(row)]);
    expect(() => parseTrackRecords(path)).toThrow(/:1: missing field 'psi'/);
  });

  it("rejects non-finite values", () => {
    const dir = tmpDir();
    const row = trackRow({ t: 0, x: 0, y: 0 }).replace('"x":0', '"x":1e999');
    const path = writeTrackFile(dir, [row]);
    expect(() => parseTrackRecords(path)).toThrow(/finite/);
  });

  it("rejects half-null pre-initialization rows", () => {
    const dir = tmpDir();
    const row = JSON.parse(preInitRow(0.1));
    row.y = 3.0;
    const path = writeTrackFile(dir, [JSON.stringify(row)]);
    expect(() => parseTrackRecords(path)).toThrow(/pre-initialization/);
  });
});

describe("parseDetectionRecords", () => {
  it("parses detected and undetected rows", () => {
    const dir = tmpDir();
    const path = join(dir, "detections.jsonl");
    writeFileSync(path, [detectionRow(0, true), detectionRow(1, false)].join("\n") + "\n");
    const records = parseDetectionRecords(path);
    expect(records).toHaveLength(2);
    expect(records[0].bbox?.halfExtents).toEqual([0.2, 0.17, 0.1]);
    expect(records[1].bbox).toBeNull();
  });

  it("requires a bbox on detected rows", () => {
    const dir = tmpDir();
    const row = JSON.parse(detectionRow(0, true));
    row.bbox = null;
    const path = join(dir, "detections.jsonl");
    writeFileSync(path, JSON.stringify(row) + "\n");
    expect(() => parseDetectionRecords(path)).toThrow(/bbox/);
  });
});

describe("parseGtRecords", () => {
  it("skips the meta line and reads poses", () => {
    const dir = tmpDir();
    const path = gtFile(dir, 5);
    const records = parseGtRecords(path);
    expect(records).toHaveLength(5);
    expect(records[0].x).toBeCloseTo(-1.5);
  });
});
