#!/usr/bin/env node
/**
 * plot-detections --frames dir --in detections.jsonl --out dir
 *                 [--plane plane.json]
 */

import { parseFlags } from "./args.js";
import { plotDetections } from "./plotDetections.js";

const USAGE =
  "usage: plot-detections --frames dir --in detections.jsonl --out dir [--plane plane.json]";

export function main(argv: string[]): number {
  let flags: Record<string, string | boolean>;
  try {
    flags = parseFlags(argv, {
      frames: { required: true, hasValue: true },
      in: { required: true, hasValue: true },
      out: { required: true, hasValue: true },
      plane: { hasValue: true },
    }, USAGE);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const summary = plotDetections(
      flags.frames as string,
      flags.in as string,
      flags.out as string,
      flags.plane as string | undefined,
    );
    console.log(
      `wrote ${summary.written} image(s) to ${flags.out}` +
        (summary.skippedMissing ? `, skipped ${summary.skippedMissing} missing frame(s)` : ""),
    );
    return summary.skippedMissing > 0 ? 1 : 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
