/**
 * Test-only writer for uncompressed 24-bit AVI files.
 *
 * Frames come in as row-major top-down RGB and are stored as the container
 * expects: bottom-up BGR with rows padded to 4 bytes.
 */

import { writeFileSync } from "node:fs";

export interface RawFrame {
  data: Uint8Array; // RGB, top-down
  width: number;
  height: number;
}

function chunk(id: string, body: Buffer): Buffer {
  const header = Buffer.alloc(8);
  header.write(id, 0, "ascii");
  header.writeUInt32LE(body.length, 4);
  const pad = body.length % 2 ? Buffer.alloc(1) : Buffer.alloc(0);
  return Buffer.concat([header, body, pad]);
}

function list(kind: string, ...bodies: Buffer[]): Buffer {
  return chunk("LIST", Buffer.concat([Buffer.from(kind, "ascii"), ...bodies]));
}

function frameToDib(frame: RawFrame): Buffer {
  const rowBytes = Math.ceil((frame.width * 3) / 4) * 4;
  const out = Buffer.alloc(rowBytes * frame.height);
  for (let y = 0; y < frame.height; y++) {
    const srcRow = frame.height - 1 - y; // bottom-up
    for (let x = 0; x < frame.width; x++) {
      const src = (srcRow * frame.width + x) * 3;
      const dst = y * rowBytes + x * 3;
      out[dst] = frame.data[src + 2]; // B
      out[dst + 1] = frame.data[src + 1]; // G
      out[dst + 2] = frame.data[src]; // R
    }
  }
  return out;
}

export function writeAvi(path: string, frames: RawFrame[], fps: number): void {
  const { width, height } = frames[0];
  const rowBytes = Math.ceil((width * 3) / 4) * 4;
  const frameBytes = rowBytes * height;

  const avih = Buffer.alloc(56);
  avih.writeUInt32LE(Math.round(1e6 / fps), 0);
  avih.writeUInt32LE(frameBytes * fps, 4);
  avih.writeUInt32LE(frames.length, 16);
  avih.writeUInt32LE(1, 24);
  avih.writeUInt32LE(frameBytes, 28);
  avih.writeUInt32LE(width, 32);
  avih.writeUInt32LE(height, 36);

  const strh = Buffer.alloc(56);
  strh.write("vids", 0, "ascii");
  strh.write("DIB ", 4, "ascii");
  strh.writeUInt32LE(1, 20); // scale
  strh.writeUInt32LE(fps, 24); // rate
  strh.writeUInt32LE(frames.length, 32);
  strh.writeUInt32LE(frameBytes, 36);

  const strf = Buffer.alloc(40);
  strf.writeUInt32LE(40, 0);
  strf.writeInt32LE(width, 4);
  strf.writeInt32LE(height, 8); // positive: bottom-up
  strf.writeUInt16LE(1, 12);
  strf.writeUInt16LE(24, 14);
  strf.writeUInt32LE(0, 16); // BI_RGB
  strf.writeUInt32LE(frameBytes, 20);

  const hdrl = list(
    "hdrl",
    chunk("avih", avih),
    list("strl", chunk("strh", strh), chunk("strf", strf)),
  );
  const movi = list(
    "movi",
    ...frames.map((f) => chunk("00db", frameToDib(f))),
  );

  const riffBody = Buffer.concat([Buffer.from("AVI ", "ascii"), hdrl, movi]);
  const riff = Buffer.alloc(8);
  riff.write("RIFF", 0, "ascii");
  riff.writeUInt32LE(riffBody.length, 4);
  writeFileSync(path, Buffer.concat([riff, riffBody]));
}

/** Solid-color frame factory. */
export function solidFrame(
  width: number,
  height: number,
  rgb: [number, number, number],
): RawFrame {
  const data = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    data[i * 3] = rgb[0];
    data[i * 3 + 1] = rgb[1];
    data[i * 3 + 2] = rgb[2];
  }
  return { data, width, height };
}

/** Background frame with a filled rectangle of another color. */
export function rectFrame(
  width: number,
  height: number,
  background: [number, number, number],
  rect: { x: number; y: number; w: number; h: number },
  color: [number, number, number],
): RawFrame {
  const frame = solidFrame(width, height, background);
  for (let y = rect.y; y < rect.y + rect.h; y++) {
    for (let x = rect.x; x < rect.x + rect.w; x++) {
      const i = (y * width + x) * 3;
      frame.data[i] = color[0];
      frame.data[i + 1] = color[1];
      frame.data[i + 2] = color[2];
    }
  }
  return frame;
}
