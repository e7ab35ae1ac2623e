#!/usr/bin/env node
/**
 * mvclust-extract <imagesRoot> --model <name> --model-dir <dir>
 *                 --out features.fvec --manifest-out manifest.json
 *                 [--brightness 0.25,0.5,1,1.75,2.5] [--layer <name>]
 *                 [--input-size <px>]
 */

import { ARCHITECTURES } from './model'
import { extract } from './extract'

function fail(message: string, code = 2): never {
  console.error(`error: ${message}`)
  process.exit(code)
}

function parseArgs(argv: string[]) {
  const positional: string[] = []
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]
    if (arg.startsWith('--')) {
      const value = argv[++i]
      if (value === undefined) fail(`flag ${arg} needs a value`)
      flags.set(arg.slice(2), value)
    } else {
      positional.push(arg)
    }
  }
  return { positional, flags }
}

async function main() {
  const { positional, flags } = parseArgs(process.argv.slice(2))
  if (positional.length !== 1) {
    fail(
      'usage: mvclust-extract <imagesRoot> --model <name> --model-dir <dir> ' +
        '--out <features.fvec> --manifest-out <manifest.json> ' +
        '[--brightness f1,f2,...] [--layer <name>] [--input-size <px>]',
    )
  }
  const modelName = flags.get('model') ?? fail('--model is required')
  const modelDir = flags.get('model-dir') ?? fail('--model-dir is required')
  const out = flags.get('out') ?? fail('--out is required')
  const manifestOut = flags.get('manifest-out') ?? fail('--manifest-out is required')
  const brightness = (flags.get('brightness') ?? '1').split(',').map(Number)
  if (brightness.some((f) => !Number.isFinite(f))) fail('bad --brightness list')
  const inputSize = flags.has('input-size') ? Number(flags.get('input-size')) : undefined
  if (!(modelName in ARCHITECTURES)) {
    console.error(
      `note: ${modelName} is not a registered architecture ` +
        `(${Object.keys(ARCHITECTURES).join(', ')}); treating as custom`,
    )
  }

  const result = await extract(positional[0], {
    modelName,
    modelDir,
    layer: flags.get('layer'),
    inputSize,
    brightnessFactors: brightness,
    out,
    manifestOut,
  })
  console.log(
    `extracted ${result.rows} rows x ${result.dim} dims ` +
      `(${result.objects} objects, conditions: ${result.conditions.join(', ')})`,
  )
  console.log(`features: ${out}`)
  console.log(`manifest: ${manifestOut}`)
}

main().catch((e) => {
  console.error(`error: ${e instanceof Error ? e.message : e}`)
  process.exit(1)
})
