import { mkdirSync, writeFileSync } from 'fs'
import { join } from 'path'
import { PNG } from 'pngjs'
import * as tf from '@tensorflow/tfjs'

import { saveLayersModel } from '../src/model'

export function writePng(
  path: string,
  width: number,
  height: number,
  rgbAt: (x: number, y: number) => [number, number, number],
): void {
  const png = new PNG({ width, height })
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = (y * width + x) * 4
      const [r, g, b] = rgbAt(x, y)
      png.data[i] = r
      png.data[i + 1] = g
      png.data[i + 2] = b
      png.data[i + 3] = 255
    }
  }
  writeFileSync(path, PNG.sync.write(png))
}

export function solidPng(path: string, size: number, rgb: [number, number, number]): void {
  writePng(path, size, size, () => rgb)
}

/** conv -> global average pooling ("avg_pool") -> softmax classifier. */
export async function makeTinyModel(dir: string, inputSize = 8, filters = 5): Promise<number> {
  const model = tf.sequential()
  model.add(
    tf.layers.conv2d({
      inputShape: [inputSize, inputSize, 3],
      filters,
      kernelSize: 3,
      activation: 'relu',
      name: 'conv',
    }),
  )
  model.add(tf.layers.globalAveragePooling2d({ name: 'avg_pool' }))
  model.add(tf.layers.dense({ units: 3, activation: 'softmax', name: 'classifier' }))
  await saveLayersModel(model, dir)
  return filters
}

export interface DatasetSpec {
  conditions: string[]
  objects: { id: string; rgb: [number, number, number] }[]
  poses: number
  imageSize: number
}

/** <root>/<condition>/<object>/<pose>.png with per-object base colors. */
export function makeDataset(root: string, spec: DatasetSpec): void {
  for (const condition of spec.conditions) {
    for (const obj of spec.objects) {
      const dir = join(root, condition, obj.id)
      mkdirSync(dir, { recursive: true })
      for (let pose = 0; pose < spec.poses; pose++) {
        const [r, g, b] = obj.rgb
        // small pose-dependent shift keeps views distinct but same-class close
        writePng(join(dir, `pose${pose}.png`), spec.imageSize, spec.imageSize, (x, y) => [
          Math.min(255, r + pose * 3 + (x % 2)),
          Math.min(255, g + pose * 3 + (y % 2)),
          Math.min(255, b + pose * 3),
        ])
      }
    }
  }
}
