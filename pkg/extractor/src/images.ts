/** PNG/JPEG decoding to RGB float buffers (alpha dropped). */

import { readFileSync } from 'fs'
import { extname } from 'path'
import * as jpeg from 'jpeg-js'
import { PNG } from 'pngjs'

import { RawImage } from './brightness'

function rgbaToRgb(rgba: Uint8Array, width: number, height: number): RawImage {
  const data = new Float32Array(width * height * 3)
  for (let p = 0; p < width * height; p++) {
    data[p * 3] = rgba[p * 4]
    data[p * 3 + 1] = rgba[p * 4 + 1]
    data[p * 3 + 2] = rgba[p * 4 + 2]
  }
  return { width, height, data }
}

export function decodeImage(path: string): RawImage {
  const ext = extname(path).toLowerCase()
  const buf = readFileSync(path)
  if (ext === '.png') {
    const png = PNG.sync.read(buf)
    return rgbaToRgb(png.data, png.width, png.height)
  }
  if (ext === '.jpg' || ext === '.jpeg') {
    const img = jpeg.decode(buf, { useTArray: true, formatAsRGBA: true })
    return rgbaToRgb(img.data, img.width, img.height)
  }
  throw new Error(`${path}: unsupported image extension ${ext}`)
}

export const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg'])
