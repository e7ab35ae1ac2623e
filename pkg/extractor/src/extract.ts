/**
 * End-to-end extraction: walk the image layout, run every (image, brightness
 * factor) pair through the feature model, and emit an FVEC file plus an
 * engine-compatible manifest. Row order follows the sorted input file list,
 * factors in the configured order within each image.
 */

import { writeFileSync } from 'fs'
import { dirname, relative, resolve } from 'path'
import * as tf from '@tensorflow/tfjs'

import { applyBrightness } from './brightness'
import { writeFvec } from './fvec'
import { decodeImage } from './images'
import { scanLayout } from './layout'
import { buildManifest } from './manifest'
import { loadFeatureModel } from './model'

export interface ExtractorConfig {
  modelName: string
  modelDir: string
  layer?: string
  inputSize?: number
  brightnessFactors: number[]
  out: string
  manifestOut: string
  featureFileId?: string
}

export interface ExtractResult {
  rows: number
  dim: number
  objects: number
  conditions: string[]
}

export async function extract(imagesRoot: string, cfg: ExtractorConfig): Promise<ExtractResult> {
  if (cfg.brightnessFactors.length === 0) {
    throw new Error('need at least one brightness factor')
  }
  for (const f of cfg.brightnessFactors) {
    if (!(f > 0)) throw new Error(`brightness factor must be > 0, got ${f}`)
  }
  const views = scanLayout(imagesRoot)
  const model = await loadFeatureModel(cfg)

  const rows: Float32Array[] = []
  const rowsPerView: { factor: number; row: number }[][] = []
  for (const view of views) {
    const img = decodeImage(view.path)
    const assigned: { factor: number; row: number }[] = []
    for (const factor of cfg.brightnessFactors) {
      rows.push(model.extract(applyBrightness(img, factor)))
      assigned.push({ factor, row: rows.length - 1 })
    }
    rowsPerView.push(assigned)
  }
  writeFvec(cfg.out, rows)

  const manifest = buildManifest(
    views,
    rowsPerView,
    cfg.featureFileId ?? 'features',
    relative(dirname(resolve(cfg.manifestOut)), resolve(cfg.out)) || cfg.out,
    {
      model: model.modelName,
      layer: model.layerName,
      input_size: model.inputSize,
      weights_sha256: model.weightsHash,
      brightness_factors: cfg.brightnessFactors,
      tfjs_version: tf.version.tfjs,
    },
  )
  writeFileSync(cfg.manifestOut, JSON.stringify(manifest, null, 1) + '\n')
  return {
    rows: rows.length,
    dim: model.featureDim,
    objects: manifest.objects.length,
    conditions: manifest.conditions,
  }
}
