#!/usr/bin/env node
/**
 * plot-track --in track.jsonl [--gt gt.jsonl] --out fig.png
 *            [--snapshots 4] [--frames dir --plane plane.json]
 */

import { parseFlags } from "./args.js";
import { plotTrack } from "./plotTrack.js";

const USAGE =
  "usage: plot-track --in track.jsonl [--gt gt.jsonl] --out fig.png " +
  "[--snapshots N] [--frames dir --plane plane.json]";

export function main(argv: string[]): number {
  let flags: Record<string, string | boolean>;
  try {
    flags = parseFlags(argv, {
      in: { required: true, hasValue: true },
      out: { required: true, hasValue: true },
      gt: { hasValue: true },
      snapshots: { hasValue: true },
      frames: { hasValue: true },
      plane: { hasValue: true },
    }, USAGE);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const fig = plotTrack(flags.in as string, flags.out as string, {
      gtPath: flags.gt as string | undefined,
      snapshotCount: flags.snapshots ? Number(flags.snapshots) : undefined,
      framesDir: flags.frames as string | undefined,
      planePath: flags.plane as string | undefined,
    });
    const contours = fig.layers.filter((l) => l.role === "contour").length;
    console.log(`wrote ${flags.out} (${contours} contour snapshots, legend: ${fig.legend.join(", ")})`);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
