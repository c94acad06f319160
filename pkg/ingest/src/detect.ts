/**
 * Face localization via a classic RGB skin-color rule.
 *
 * Deterministic and dependency-free: a pixel counts as skin when it passes
 * the Peer/Kovac daylight rule (r > 95, g > 40, b > 20, max-min > 15,
 * |r-g| > 15, r > g, r > b). The face box is the bounding box of the skin
 * pixels and the confidence is their density inside that box, so a crisp
 * skin region scores near 1 and scattered false positives score low.
 */

import type { VideoFrame } from "./avi.js";

export const DETECTOR_ID = "skin-rule-v1";

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Detection {
  box: Box;
  confidence: number;
}

export type RoiPolicy = "full-face-box" | "lower-face-box";

export function isSkin(r: number, g: number, b: number): boolean {
  const max = Math.max(r, g, b);
  const min = Math.min(r, g, b);
  return (
    r > 95 && g > 40 && b > 20 && max - min > 15 &&
    Math.abs(r - g) > 15 && r > g && r > b
  );
}

/** Locate the dominant skin region in a frame; null when none exists. */
export function detectFace(frame: VideoFrame): Detection | null {
  const { data, width, height } = frame;
  let minX = width;
  let minY = height;
  let maxX = -1;
  let maxY = -1;
  let count = 0;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = (y * width + x) * 3;
      if (isSkin(data[i], data[i + 1], data[i + 2])) {
        count++;
        if (x < minX) minX = x;
        if (x > maxX) maxX = x;
        if (y < minY) minY = y;
        if (y > maxY) maxY = y;
      }
    }
  }
  if (maxX < 0) return null;
  const box = { x: minX, y: minY, w: maxX - minX + 1, h: maxY - minY + 1 };
  return { box, confidence: count / (box.w * box.h) };
}

function shrink(box: Box, fraction: number): Box {
  const dx = Math.floor(box.w * fraction);
  const dy = Math.floor(box.h * fraction);
  return {
    x: box.x + dx,
    y: box.y + dy,
    w: Math.max(1, box.w - 2 * dx),
    h: Math.max(1, box.h - 2 * dy),
  };
}

/** Map a detected face box to the measurement ROI for the chosen policy. */
export function applyRoiPolicy(box: Box, policy: RoiPolicy): Box {
  if (policy === "lower-face-box") {
    const lower = {
      x: box.x,
      y: box.y + Math.floor(box.h / 2),
      w: box.w,
      h: Math.max(1, box.h - Math.floor(box.h / 2)),
    };
    return shrink(lower, 0.1);
  }
  // full face box, shrunk 20% per side to drop hair and background
  return shrink(box, 0.2);
}

export function clampBox(box: Box, width: number, height: number): Box {
  const x = Math.min(Math.max(box.x, 0), width - 1);
  const y = Math.min(Math.max(box.y, 0), height - 1);
  return {
    x,
    y,
    w: Math.max(1, Math.min(box.w, width - x)),
    h: Math.max(1, Math.min(box.h, height - y)),
  };
}

/** Mean R, G, B over a pixel box. */
export function meanRgb(frame: VideoFrame, box: Box): [number, number, number] {
  let r = 0;
  let g = 0;
  let b = 0;
  for (let y = box.y; y < box.y + box.h; y++) {
    for (let x = box.x; x < box.x + box.w; x++) {
      const i = (y * frame.width + x) * 3;
      r += frame.data[i];
      g += frame.data[i + 1];
      b += frame.data[i + 2];
    }
  }
  const n = box.w * box.h;
  return [r / n, g / n, b / n];
}
