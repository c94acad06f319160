/**
 * Minimal decoder for uncompressed 24-bit AVI files (BI_RGB 'DIB ' video).
 *
 * This covers the raw capture format the rest of the toolchain exchanges:
 * a RIFF/AVI container whose movi chunks hold bottom-up BGR24 bitmaps with
 * 4-byte-aligned rows. Compressed codecs are out of scope and rejected as
 * undecodable.
 */

import { readFileSync } from "node:fs";

export interface VideoFrame {
  /** Row-major top-down RGB, 3 bytes per pixel. */
  data: Uint8Array;
  width: number;
  height: number;
}

export interface DecodedVideo {
  frames: VideoFrame[];
  width: number;
  height: number;
  fps: number;
  durationS: number;
}

export class UndecodableError extends Error {}

function fourcc(buf: Buffer, offset: number): string {
  return buf.toString("ascii", offset, offset + 4);
}

interface StreamFormat {
  width: number;
  height: number;
  bitCount: number;
  compression: number;
  fps: number;
  topDown: boolean;
}

function parseHeaderList(buf: Buffer, start: number, end: number): StreamFormat {
  let width = 0;
  let height = 0;
  let bitCount = 0;
  let compression = -1;
  let fps = 0;
  let usecPerFrame = 0;
  let topDown = false;

  let pos = start;
  while (pos + 8 <= end) {
    const id = fourcc(buf, pos);
    const size = buf.readUInt32LE(pos + 4);
    const body = pos + 8;
    if (id === "avih") {
      usecPerFrame = buf.readUInt32LE(body);
      width = buf.readUInt32LE(body + 32);
      height = buf.readUInt32LE(body + 36);
    } else if (id === "LIST" && fourcc(buf, body) === "strl") {
      const inner = parseStreamList(buf, body + 4, body + size);
      if (inner.fps > 0) fps = inner.fps;
      if (inner.bitCount > 0) {
        bitCount = inner.bitCount;
        compression = inner.compression;
        topDown = inner.topDown;
        if (inner.width > 0) width = inner.width;
        if (inner.height > 0) height = inner.height;
      }
    }
    pos = body + size + (size % 2);
  }
  if (fps === 0 && usecPerFrame > 0) fps = 1e6 / usecPerFrame;
  return { width, height, bitCount, compression, fps, topDown };
}

function parseStreamList(buf: Buffer, start: number, end: number): StreamFormat {
  let fps = 0;
  let isVideo = false;
  let width = 0;
  let height = 0;
  let bitCount = 0;
  let compression = -1;
  let topDown = false;

  let pos = start;
  while (pos + 8 <= end) {
    const id = fourcc(buf, pos);
    const size = buf.readUInt32LE(pos + 4);
    const body = pos + 8;
    if (id === "strh") {
      isVideo = fourcc(buf, body) === "vids";
      const scale = buf.readUInt32LE(body + 20);
      const rate = buf.readUInt32LE(body + 24);
      if (isVideo && scale > 0) fps = rate / scale;
    } else if (id === "strf" && isVideo) {
      width = buf.readInt32LE(body + 4);
      const rawHeight = buf.readInt32LE(body + 8);
      height = Math.abs(rawHeight);
      topDown = rawHeight < 0;
      bitCount = buf.readUInt16LE(body + 14);
      compression = buf.readUInt32LE(body + 16);
    }
    pos = body + size + (size % 2);
  }
  return { width, height, bitCount, compression, fps, topDown };
}

function convertFrame(
  raw: Buffer,
  width: number,
  height: number,
  topDown: boolean,
): VideoFrame {
  const rowBytes = Math.ceil((width * 3) / 4) * 4;
  const data = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    const srcRow = topDown ? y : height - 1 - y;
    const src = srcRow * rowBytes;
    const dst = y * width * 3;
    for (let x = 0; x < width; x++) {
      // BGR in the container, RGB out.
      data[dst + x * 3] = raw[src + x * 3 + 2];
      data[dst + x * 3 + 1] = raw[src + x * 3 + 1];
      data[dst + x * 3 + 2] = raw[src + x * 3];
    }
  }
  return { data, width, height };
}

/** Decode an uncompressed AVI file into RGB frames. */
export function decodeAvi(path: string): DecodedVideo {
  let buf: Buffer;
  try {
    buf = readFileSync(path);
  } catch (err) {
    throw new UndecodableError(`cannot read ${path}: ${(err as Error).message}`);
  }
  if (buf.length < 12 || fourcc(buf, 0) !== "RIFF" || fourcc(buf, 8) !== "AVI ") {
    throw new UndecodableError(`${path}: not a RIFF/AVI file`);
  }

  let format: StreamFormat | null = null;
  const frames: VideoFrame[] = [];
  let pos = 12;
  const fileEnd = Math.min(buf.length, 8 + buf.readUInt32LE(4));
  while (pos + 8 <= fileEnd) {
    const id = fourcc(buf, pos);
    const size = buf.readUInt32LE(pos + 4);
    const body = pos + 8;
    if (id === "LIST") {
      const kind = fourcc(buf, body);
      if (kind === "hdrl") {
        format = parseHeaderList(buf, body + 4, body + size);
        if (format.bitCount !== 24 || format.compression !== 0) {
          throw new UndecodableError(
            `${path}: unsupported codec (only uncompressed 24-bit RGB AVI)`,
          );
        }
      } else if (kind === "movi") {
        if (!format) throw new UndecodableError(`${path}: movi before header`);
        let cpos = body + 4;
        const cend = body + size;
        const rowBytes = Math.ceil((format.width * 3) / 4) * 4;
        const frameBytes = rowBytes * format.height;
        while (cpos + 8 <= cend) {
          const cid = fourcc(buf, cpos);
          const csize = buf.readUInt32LE(cpos + 4);
          if ((cid.endsWith("db") || cid.endsWith("dc")) && csize === frameBytes) {
            frames.push(
              convertFrame(
                buf.subarray(cpos + 8, cpos + 8 + csize),
                format.width,
                format.height,
                format.topDown,
              ),
            );
          }
          cpos += 8 + csize + (csize % 2);
        }
      }
    }
    pos = body + size + (size % 2);
  }

  if (!format || format.fps <= 0) {
    throw new UndecodableError(`${path}: missing or invalid AVI headers`);
  }
  if (frames.length === 0) {
    throw new UndecodableError(`${path}: no video frames found`);
  }
  return {
    frames,
    width: format.width,
    height: format.height,
    fps: format.fps,
    durationS: frames.length / format.fps,
  };
}
