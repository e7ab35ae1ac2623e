/** Multiplicative brightness modification with clipping to the pixel range. */

export interface RawImage {
  width: number
  height: number
  /** RGB interleaved, values in [0, 255] */
  data: Float32Array
}

export function applyBrightness(img: RawImage, factor: number): RawImage {
  if (!(factor > 0)) throw new Error(`brightness factor must be > 0, got ${factor}`)
  const data = new Float32Array(img.data.length)
  for (let i = 0; i < data.length; i++) {
    const v = img.data[i] * factor
    data[i] = v < 0 ? 0 : v > 255 ? 255 : v
  }
  return { width: img.width, height: img.height, data }
}

/** Five-level default used for lighting-robustness sweeps; tune per dataset. */
export const DEFAULT_BRIGHTNESS_LEVELS = [0.25, 0.5, 1.0, 1.75, 2.5]
