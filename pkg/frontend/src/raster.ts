/**
 * Minimal software rasterizer and PNG writer (RGBA8, zlib via node:zlib,
 * hand-rolled CRC32). Just enough for scatter plots and polylines with an
 * equal-aspect world-to-pixel transform.
 */

import { deflateSync } from "node:zlib";

import { Color, Figure, figureBounds, Vec2 } from "./figure.js";

const WHITE: Color = { r: 255, g: 255, b: 255, a: 255 };

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background.r;
      this.data[4 * i + 1] = background.g;
      this.data[4 * i + 2] = background.b;
      this.data[4 * i + 3] = background.a;
    }
  }

  setPixel(x: number, y: number, c: Color): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = 4 * (yi * this.width + xi);
    this.data[o] = c.r;
    this.data[o + 1] = c.g;
    this.data[o + 2] = c.b;
    this.data[o + 3] = c.a;
  }

  drawDot(x: number, y: number, radius: number, c: Color): void {
    const r = Math.max(0.5, radius);
    for (let dy = -Math.ceil(r); dy <= Math.ceil(r); dy++) {
      for (let dx = -Math.ceil(r); dx <= Math.ceil(r); dx++) {
        if (dx * dx + dy * dy <= r * r) this.setPixel(x + dx, y + dy, c);
      }
    }
  }

  drawSegment(a: [number, number], b: [number, number], width: number, c: Color, dashed = false): void {
    const len = Math.hypot(b[0] - a[0], b[1] - a[1]);
    const steps = Math.max(1, Math.ceil(len * 2));
    for (let s = 0; s <= steps; s++) {
      if (dashed && Math.floor(s / 6) % 2 === 1) continue; // 3 px on, 3 px off
      const t = s / steps;
      const x = a[0] + t * (b[0] - a[0]);
      const y = a[1] + t * (b[1] - a[1]);
      if (width <= 1) this.setPixel(x, y, c);
      else this.drawDot(x, y, width / 2, c);
    }
  }
}

function crc32(buf: Uint8Array): number {
  let table = CRC_TABLE;
  let crc = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    crc = (crc >>> 8) ^ table[(crc ^ buf[i]) & 0xff];
  }
  return (crc ^ 0xffffffff) >>> 0;
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(data)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head, Buffer.from(data), crc]);
}

/** Encode an RGBA raster as a PNG buffer. */
export function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster;
  const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  ihdr[10] = 0;
  ihdr[11] = 0;
  ihdr[12] = 0;

  const stride = width * 4;
  const filtered = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    filtered[y * (stride + 1)] = 0; // filter type none
    filtered.set(data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const idat = deflateSync(filtered);

  return Buffer.concat([
    signature,
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export interface Transform {
  toPixel(p: Vec2): [number, number];
  scale: number;
}

/** Equal-aspect world-to-pixel transform fitting the bounds into the canvas. */
export function fitTransform(
  bounds: { min: Vec2; max: Vec2 },
  width: number,
  height: number,
  margin: number,
): Transform {
  const spanX = Math.max(bounds.max[0] - bounds.min[0], 1e-9);
  const spanY = Math.max(bounds.max[1] - bounds.min[1], 1e-9);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  const cx = (bounds.min[0] + bounds.max[0]) / 2;
  const cy = (bounds.min[1] + bounds.max[1]) / 2;
  return {
    scale,
    toPixel: ([x, y]) => [
      width / 2 + (x - cx) * scale,
      height / 2 - (y - cy) * scale, // world y up, pixel y down
    ],
  };
}

/** Rasterize a figure to a PNG buffer (equal aspect, geometry only). */
export function renderFigure(fig: Figure, widthPx = 900, heightPx = 700): Buffer {
  if (!fig.equalAspect) {
    throw new Error("only equal-aspect figures are supported");
  }
  const raster = new Raster(widthPx, heightPx);
  const tf = fitTransform(figureBounds(fig), widthPx, heightPx, 40);
  for (const layer of fig.layers) {
    if (layer.kind === "polyline") {
      const pts = layer.points.map(tf.toPixel);
      const last = layer.closed ? pts.length : pts.length - 1;
      for (let i = 0; i < last; i++) {
        raster.drawSegment(pts[i], pts[(i + 1) % pts.length], layer.width, layer.color, layer.dashed);
      }
    } else {
      for (const p of layer.points) {
        const [x, y] = tf.toPixel(p);
        raster.drawDot(x, y, layer.size / 2, layer.color);
      }
    }
  }
  return encodePng(raster);
}
