/**
 * Dataset directory layout:
 *
 *   <root>/<condition>/<object>/<image files>
 *
 * Directories and files are walked in lexicographic order, which defines the
 * global row order. The pose index is the file's position within its object
 * directory. When every object directory is named "<class>_<rest>" the prefix
 * before the first underscore is taken as the class label; otherwise no
 * labels are emitted.
 */

import { readdirSync, statSync } from 'fs'
import { join, parse } from 'path'

import { IMAGE_EXTENSIONS } from './images'

export interface ViewEntry {
  path: string
  condition: string
  objectId: string
  classLabel: string | null
  pose: number
}

function sortedDirs(root: string): string[] {
  return readdirSync(root)
    .filter((name) => statSync(join(root, name)).isDirectory())
    .sort()
}

function sortedImages(dir: string): string[] {
  return readdirSync(dir)
    .filter((name) => IMAGE_EXTENSIONS.has(parse(name).ext.toLowerCase()))
    .sort()
}

export function scanLayout(root: string): ViewEntry[] {
  const conditions = sortedDirs(root)
  if (conditions.length === 0) {
    throw new Error(`${root}: no condition directories found`)
  }
  const entries: ViewEntry[] = []
  for (const condition of conditions) {
    for (const objectId of sortedDirs(join(root, condition))) {
      const files = sortedImages(join(root, condition, objectId))
      const underscore = objectId.indexOf('_')
      const classLabel = underscore > 0 ? objectId.slice(0, underscore) : null
      files.forEach((file, pose) => {
        entries.push({
          path: join(root, condition, objectId, file),
          condition,
          objectId,
          classLabel,
          pose,
        })
      })
    }
  }
  if (entries.length === 0) {
    throw new Error(`${root}: no images found under <condition>/<object>/`)
  }
  return entries
}
