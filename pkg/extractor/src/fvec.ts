/**
 * FVEC binary feature files, matching the engine's format exactly:
 * magic "FVEC" + version byte 0x01 + little-endian u32 n + u32 d,
 * then n*d little-endian IEEE-754 float32 values, row-major, no padding.
 */

import { readFileSync, writeFileSync } from 'fs'

export const FVEC_MAGIC = 'FVEC'
export const FVEC_VERSION = 1
const HEADER_LEN = 13

export function writeFvec(path: string, rows: Float32Array[]): void {
  if (rows.length === 0) throw new Error('cannot write an empty FVEC file')
  const d = rows[0].length
  if (d === 0) throw new Error('cannot write zero-dimensional rows')
  for (const row of rows) {
    if (row.length !== d) {
      throw new Error(`ragged rows: expected ${d} values, got ${row.length}`)
    }
  }
  const buf = Buffer.alloc(HEADER_LEN + 4 * rows.length * d)
  buf.write(FVEC_MAGIC, 0, 'ascii')
  buf.writeUInt8(FVEC_VERSION, 4)
  buf.writeUInt32LE(rows.length, 5)
  buf.writeUInt32LE(d, 9)
  const view = new DataView(buf.buffer, buf.byteOffset)
  let offset = HEADER_LEN
  for (const row of rows) {
    for (let i = 0; i < d; i++) {
      view.setFloat32(offset, row[i], true)
      offset += 4
    }
  }
  writeFileSync(path, buf)
}

export function readFvec(path: string): { n: number; d: number; rows: Float32Array[] } {
  const buf = readFileSync(path)
  if (buf.length < HEADER_LEN || buf.toString('ascii', 0, 4) !== FVEC_MAGIC) {
    throw new Error(`${path}: not an FVEC file`)
  }
  if (buf.readUInt8(4) !== FVEC_VERSION) {
    throw new Error(`${path}: unsupported FVEC version ${buf.readUInt8(4)}`)
  }
  const n = buf.readUInt32LE(5)
  const d = buf.readUInt32LE(9)
  if (buf.length !== HEADER_LEN + 4 * n * d) {
    throw new Error(`${path}: payload size does not match header (${n}x${d})`)
  }
  const view = new DataView(buf.buffer, buf.byteOffset)
  const rows: Float32Array[] = []
  let offset = HEADER_LEN
  for (let i = 0; i < n; i++) {
    const row = new Float32Array(d)
    for (let j = 0; j < d; j++) {
      row[j] = view.getFloat32(offset, true)
      offset += 4
    }
    rows.push(row)
  }
  return { n, d, rows }
}
