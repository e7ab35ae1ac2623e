export { applyBrightness, DEFAULT_BRIGHTNESS_LEVELS, RawImage } from './brightness'
export { extract, ExtractorConfig, ExtractResult } from './extract'
export { FVEC_MAGIC, FVEC_VERSION, readFvec, writeFvec } from './fvec'
export { decodeImage } from './images'
export { scanLayout, ViewEntry } from './layout'
export { buildManifest, conditionTag, Manifest } from './manifest'
export {
  ARCHITECTURES,
  FeatureModel,
  loadFeatureModel,
  saveLayersModel,
} from './model'
