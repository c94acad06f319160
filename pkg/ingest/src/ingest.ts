/**
 * Ingestion pipeline: video file -> trace CSV + manifest fragment + sidecar.
 *
 * Per frame, the face is localized and the ROI's mean RGB appended to the
 * trace. Frames with no acceptable detection hold the last known ROI (or
 * are backfilled from the first detection when the video starts faceless)
 * and are listed in the sidecar. Videos detected in fewer than 80% of
 * frames are skipped outright: a trace dominated by guessed ROIs would
 * poison downstream scoring.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { decodeAvi } from "./avi.js";
import {
  applyRoiPolicy,
  clampBox,
  detectFace,
  meanRgb,
  Box,
  DETECTOR_ID,
  RoiPolicy,
} from "./detect.js";

export const MIN_DETECTION_RATE = 0.8;

export interface IngestJob {
  videoPath: string;
  outputDir: string;
  videoId: string;
  roiPolicy: RoiPolicy;
  minFaceConfidence: number;
  /** Debug mode: fixed measurement box, bypasses detection entirely. */
  fixedRoi?: Box;
  sourceTag?: string;
}

export interface IngestResult {
  entry: {
    id: string;
    trace_path: string;
    duration_s: number;
    native_fps: number;
    source_tag: string;
  };
  tracePath: string;
  sidecarPath: string;
  heldRows: number[];
  backfilledRows: number[];
  detectionRate: number;
}

export class VideoSkippedError extends Error {}

function formatNumber(x: number): string {
  // Full round-trip precision without scientific notation surprises.
  return Number.isInteger(x) ? `${x}.0` : `${x}`;
}

export function ingest(job: IngestJob): IngestResult {
  const video = decodeAvi(job.videoPath);
  const n = video.frames.length;
  if (n < 2) {
    throw new VideoSkippedError(`${job.videoPath}: fewer than 2 frames`);
  }

  const rois: (Box | null)[] = new Array(n).fill(null);
  let detected = 0;
  if (job.fixedRoi) {
    const box = clampBox(job.fixedRoi, video.width, video.height);
    rois.fill(box);
    detected = n;
  } else {
    for (let i = 0; i < n; i++) {
      const det = detectFace(video.frames[i]);
      if (det && det.confidence >= job.minFaceConfidence) {
        rois[i] = clampBox(
          applyRoiPolicy(det.box, job.roiPolicy),
          video.width,
          video.height,
        );
        detected++;
      }
    }
  }

  const detectionRate = detected / n;
  if (detectionRate < MIN_DETECTION_RATE) {
    throw new VideoSkippedError(
      `${job.videoPath}: face detected in ${(detectionRate * 100).toFixed(1)}% ` +
      `of frames (< ${MIN_DETECTION_RATE * 100}%)`,
    );
  }

  // Fill gaps: hold the last ROI; leading gaps backfill from the first hit.
  const heldRows: number[] = [];
  const backfilledRows: number[] = [];
  const firstIdx = rois.findIndex((r) => r !== null);
  for (let i = 0; i < firstIdx; i++) {
    rois[i] = rois[firstIdx];
    backfilledRows.push(i);
  }
  for (let i = firstIdx + 1; i < n; i++) {
    if (rois[i] === null) {
      rois[i] = rois[i - 1];
      heldRows.push(i);
    }
  }

  const lines = ["frame,timestamp_s,r_mean,g_mean,b_mean"];
  for (let i = 0; i < n; i++) {
    const [r, g, b] = meanRgb(video.frames[i], rois[i] as Box);
    const t = i / video.fps;
    lines.push(
      `${i},${formatNumber(t)},${formatNumber(r)},${formatNumber(g)},${formatNumber(b)}`,
    );
  }

  mkdirSync(job.outputDir, { recursive: true });
  const traceName = `${job.videoId}.csv`;
  const tracePath = join(job.outputDir, traceName);
  writeFileSync(tracePath, lines.join("\n") + "\n", "utf-8");

  const entry = {
    id: job.videoId,
    trace_path: traceName,
    duration_s: n / video.fps,
    native_fps: video.fps,
    source_tag: job.sourceTag ?? "",
  };
  writeFileSync(
    join(job.outputDir, `${job.videoId}.entry.json`),
    JSON.stringify(entry, null, 2) + "\n",
    "utf-8",
  );

  const sidecarPath = join(job.outputDir, `${job.videoId}.ingest.json`);
  writeFileSync(
    sidecarPath,
    JSON.stringify(
      {
        detector: job.fixedRoi ? "fixed-roi" : DETECTOR_ID,
        roi_policy: job.fixedRoi ? "fixed" : job.roiPolicy,
        min_face_confidence: job.minFaceConfidence,
        detection_rate: detectionRate,
        held_rows: heldRows,
        backfilled_rows: backfilledRows,
      },
      null,
      2,
    ) + "\n",
    "utf-8",
  );

  return {
    entry,
    tracePath,
    sidecarPath,
    heldRows,
    backfilledRows,
    detectionRate,
  };
}
