/** Engine-compatible manifest JSON assembly. */

import { ViewEntry } from './layout'

export interface ManifestView {
  file: string
  row: number
  condition: string
  pose: number
}

export interface ManifestObject {
  id: string
  class?: string
  views: ManifestView[]
}

export interface Manifest {
  conditions: string[]
  feature_files: Record<string, string>
  objects: ManifestObject[]
  provenance?: Record<string, unknown>
}

export function conditionTag(condition: string, factor: number): string {
  return factor === 1 ? condition : `${condition}-b${factor}`
}

/**
 * Build a manifest from the scanned views and their assigned feature rows.
 * rowsPerView[i] lists (factor, rowIndex) pairs for views[i]; objects keep
 * scan order, conditions keep first-appearance order of their tags.
 */
export function buildManifest(
  views: ViewEntry[],
  rowsPerView: { factor: number; row: number }[][],
  featureFileId: string,
  featureFilePath: string,
  provenance?: Record<string, unknown>,
): Manifest {
  const conditions: string[] = []
  const seenConditions = new Set<string>()
  const objects = new Map<string, ManifestObject>()
  const labeled = views.every((v) => v.classLabel !== null)

  views.forEach((view, i) => {
    let obj = objects.get(view.objectId)
    if (!obj) {
      obj = { id: view.objectId, views: [] }
      if (labeled) obj.class = view.classLabel as string
      objects.set(view.objectId, obj)
    }
    for (const { factor, row } of rowsPerView[i]) {
      const tag = conditionTag(view.condition, factor)
      if (!seenConditions.has(tag)) {
        seenConditions.add(tag)
        conditions.push(tag)
      }
      obj.views.push({ file: featureFileId, row, condition: tag, pose: view.pose })
    }
  })

  const manifest: Manifest = {
    conditions,
    feature_files: { [featureFileId]: featureFilePath },
    objects: [...objects.values()],
  }
  if (provenance) manifest.provenance = provenance
  return manifest
}
