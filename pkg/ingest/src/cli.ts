#!/usr/bin/env node
/**
 * video-ingest: convert a facial video into the trace-CSV corpus format.
 *
 *   video-ingest --video clip.avi --out traces/ [--id clip01]
 *                [--roi-policy full-face-box|lower-face-box]
 *                [--min-confidence 0.5] [--source-tag myset]
 *                [--fixed-roi x,y,w,h]
 *
 * Emits <id>.csv (trace), <id>.entry.json (manifest fragment), and
 * <id>.ingest.json (detector provenance and filled-frame flags).
 * Exit codes: 0 ok, 1 bad arguments or undecodable input, 3 video skipped
 * (insufficient face detections).
 */

import { basename } from "node:path";

import { UndecodableError } from "./avi.js";
import type { Box, RoiPolicy } from "./detect.js";
import { ingest, VideoSkippedError } from "./ingest.js";

interface Args {
  video: string;
  out: string;
  id: string;
  roiPolicy: RoiPolicy;
  minConfidence: number;
  sourceTag: string;
  fixedRoi?: Box;
}

function usageError(message: string): never {
  console.error(`video-ingest: ${message}`);
  console.error(
    "usage: video-ingest --video FILE --out DIR [--id NAME] " +
    "[--roi-policy full-face-box|lower-face-box] [--min-confidence F] " +
    "[--source-tag TAG] [--fixed-roi x,y,w,h]",
  );
  process.exit(1);
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = {
    roiPolicy: "full-face-box",
    minConfidence: 0.5,
    sourceTag: "",
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--video":
        args.video = value;
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--id":
        args.id = value;
        i++;
        break;
      case "--roi-policy":
        if (value !== "full-face-box" && value !== "lower-face-box") {
          usageError(`bad --roi-policy ${value}`);
        }
        args.roiPolicy = value;
        i++;
        break;
      case "--min-confidence": {
        const f = Number(value);
        if (!(f >= 0 && f <= 1)) usageError(`bad --min-confidence ${value}`);
        args.minConfidence = f;
        i++;
        break;
      }
      case "--source-tag":
        args.sourceTag = value;
        i++;
        break;
      case "--fixed-roi": {
        const parts = (value ?? "").split(",").map(Number);
        if (parts.length !== 4 || parts.some((p) => !Number.isFinite(p) || p < 0)) {
          usageError(`bad --fixed-roi ${value} (expected x,y,w,h)`);
        }
        args.fixedRoi = { x: parts[0], y: parts[1], w: parts[2], h: parts[3] };
        i++;
        break;
      }
      default:
        usageError(`unknown flag ${flag}`);
    }
  }
  if (!args.video || !args.out) usageError("--video and --out are required");
  if (!args.id) args.id = basename(args.video).replace(/\.[^.]+$/, "");
  return args as Args;
}

function main() {
  const args = parseArgs(process.argv.slice(2));
  try {
    const result = ingest({
      videoPath: args.video,
      outputDir: args.out,
      videoId: args.id,
      roiPolicy: args.roiPolicy,
      minFaceConfidence: args.minConfidence,
      fixedRoi: args.fixedRoi,
      sourceTag: args.sourceTag,
    });
    console.log(
      `wrote ${result.tracePath} (${result.entry.duration_s.toFixed(2)} s @ ` +
      `${result.entry.native_fps} fps, detection ${(result.detectionRate * 100).toFixed(1)}%)`,
    );
  } catch (err) {
    if (err instanceof VideoSkippedError) {
      console.error(`skipped: ${err.message}`);
      process.exit(3);
    }
    if (err instanceof UndecodableError) {
      console.error(`undecodable: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}

main();
