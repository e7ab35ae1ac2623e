/**
 * Feature-extraction models: a saved network is loaded from disk, cut at the
 * last layer before the classifier (or an explicitly named layer), and run on
 * preprocessed images to produce one embedding row per image.
 *
 * Known ImageNet architectures and their expected input sizes / feature
 * widths are registered so mismatched weights fail loudly; any other model
 * runs as "custom" with dimensions taken from the network itself.
 */

import { createHash } from 'crypto'
import { readFileSync, writeFileSync, mkdirSync } from 'fs'
import { join } from 'path'
import * as tf from '@tensorflow/tfjs'

import { RawImage } from './brightness'

export type Preprocessing = 'scale' | 'centered'

export interface ArchSpec {
  inputSize: number
  featureDim: number
  preprocessing: Preprocessing
}

export const ARCHITECTURES: Record<string, ArchSpec> = {
  xception: { inputSize: 299, featureDim: 2048, preprocessing: 'scale' },
  inception_v3: { inputSize: 299, featureDim: 2048, preprocessing: 'scale' },
  resnet50: { inputSize: 224, featureDim: 2048, preprocessing: 'centered' },
  vgg16: { inputSize: 224, featureDim: 4096, preprocessing: 'centered' },
  vgg19: { inputSize: 224, featureDim: 4096, preprocessing: 'centered' },
}

// ImageNet channel means for 'centered' preprocessing (BGR order)
const BGR_MEANS = [103.939, 116.779, 123.68]

export interface LoadOptions {
  modelName: string
  modelDir: string
  layer?: string
  inputSize?: number
}

export class FeatureModel {
  constructor(
    readonly modelName: string,
    readonly inputSize: number,
    readonly featureDim: number,
    readonly preprocessing: Preprocessing,
    readonly layerName: string,
    readonly weightsHash: string,
    private readonly net: tf.LayersModel,
  ) {}

  /** One embedding row for an RGB image with values in [0, 255]. */
  extract(img: RawImage): Float32Array {
    const out = tf.tidy(() => {
      let x = tf.tensor3d(img.data, [img.height, img.width, 3])
      if (img.height !== this.inputSize || img.width !== this.inputSize) {
        x = tf.image.resizeBilinear(x, [this.inputSize, this.inputSize])
      }
      if (this.preprocessing === 'scale') {
        x = x.div(127.5).sub(1)
      } else {
        x = tf.reverse(x, -1).sub(tf.tensor1d(BGR_MEANS))
      }
      const y = this.net.predict(x.expandDims(0)) as tf.Tensor
      return y.reshape([y.size])
    })
    const row = out.dataSync() as Float32Array
    out.dispose()
    for (const v of row) {
      if (!Number.isFinite(v)) {
        throw new Error('model produced a non-finite feature value')
      }
    }
    return Float32Array.from(row)
  }
}

function hashWeights(modelDir: string, weightPaths: string[]): string {
  const h = createHash('sha256')
  h.update(readFileSync(join(modelDir, 'model.json')))
  for (const p of weightPaths) h.update(readFileSync(join(modelDir, p)))
  return h.digest('hex')
}

/** Load a tfjs layers-model directory (model.json + weight shards). */
export async function loadFeatureModel(opts: LoadOptions): Promise<FeatureModel> {
  const manifest = JSON.parse(readFileSync(join(opts.modelDir, 'model.json'), 'utf8'))
  if (manifest.format && manifest.format !== 'layers-model') {
    throw new Error(`${opts.modelDir}: unsupported model format ${manifest.format}`)
  }
  const groups: { paths: string[]; weights: tf.io.WeightsManifestEntry[] }[] =
    manifest.weightsManifest
  const weightPaths = groups.flatMap((g) => g.paths)
  const shards = weightPaths.map((p) => readFileSync(join(opts.modelDir, p)))
  const weightData = Buffer.concat(shards)
  const full = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: manifest.modelTopology,
      weightSpecs: groups.flatMap((g) => g.weights),
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength,
      ),
    }),
  )

  // default cut point: the layer feeding the classifier
  let layerName = opts.layer
  if (!layerName) {
    const layers = full.layers
    layerName = layers.length >= 2 ? layers[layers.length - 2].name : layers[layers.length - 1].name
  }
  const net = tf.model({ inputs: full.inputs, outputs: full.getLayer(layerName).output as tf.SymbolicTensor })

  const spec = ARCHITECTURES[opts.modelName]
  const netInput = net.inputs[0].shape
  const inputSize = opts.inputSize ?? spec?.inputSize ?? (netInput[1] as number)
  const featureDim = net.outputs[0].shape
    .slice(1)
    .reduce((a: number, b) => a * (b ?? 1), 1)
  if (spec && !opts.layer && featureDim !== spec.featureDim) {
    throw new Error(
      `${opts.modelName}: expected ${spec.featureDim} features, model yields ${featureDim}; ` +
        'wrong weights or cut layer',
    )
  }
  if (netInput[1] != null && netInput[1] !== inputSize) {
    throw new Error(
      `${opts.modelName}: model expects ${netInput[1]}px input, configured ${inputSize}px`,
    )
  }
  return new FeatureModel(
    opts.modelName,
    inputSize as number,
    featureDim,
    spec?.preprocessing ?? 'scale',
    layerName,
    hashWeights(opts.modelDir, weightPaths),
    net,
  )
}

/** Save a layers model in the standard model.json + weights.bin layout. */
export async function saveLayersModel(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true })
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const manifest = {
        format: 'layers-model',
        generatedBy: 'mvclust-extractor',
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      }
      writeFileSync(join(dir, 'model.json'), JSON.stringify(manifest))
      const wd = artifacts.weightData as ArrayBuffer | ArrayBuffer[]
      const joined =
        wd instanceof ArrayBuffer ? wd : (tf.io.CompositeArrayBuffer.join(wd) as ArrayBuffer)
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(joined))
      return {
        modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' as const },
      }
    }),
  )
}
