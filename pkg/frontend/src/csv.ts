import Papa from 'papaparse'

export const CSV_COLUMNS = [
  'dataset',
  'method',
  'k',
  'psi_graph',
  'psi_tree',
  'labels_used',
  'decompose_ms',
  'select_ms',
  'evaluate_ms',
  'seed',
  'repeat_index',
] as const

export interface BenchRow {
  dataset: string
  method: string
  k: number
  psi_graph: string
  psi_tree: string
  labels_used: number
  decompose_ms: number
  select_ms: number
  evaluate_ms: number
  seed: number
  repeat_index: number
}

export class SchemaError extends Error {}

/** Parse one benchmark CSV; the header must match the documented schema exactly. */
export function parseBenchCsv(text: string): BenchRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]
    throw new SchemaError(`CSV parse error at row ${first.row}: ${first.message}`)
  }
  const fields = parsed.meta.fields ?? []
  if (fields.length !== CSV_COLUMNS.length || !CSV_COLUMNS.every((c, i) => fields[i] === c)) {
    throw new SchemaError(
      `unexpected CSV header [${fields.join(',')}]; expected [${CSV_COLUMNS.join(',')}]`,
    )
  }
  return parsed.data.map((row, index) => {
    const intField = (name: string): number => {
      const value = Number(row[name])
      if (!Number.isInteger(value)) {
        throw new SchemaError(`row ${index + 1}: ${name}=${row[name]} is not an integer`)
      }
      return value
    }
    const floatField = (name: string): number => {
      const value = Number(row[name])
      if (!Number.isFinite(value)) {
        throw new SchemaError(`row ${index + 1}: ${name}=${row[name]} is not a number`)
      }
      return value
    }
    return {
      dataset: row.dataset,
      method: row.method,
      k: intField('k'),
      psi_graph: row.psi_graph,
      psi_tree: row.psi_tree,
      labels_used: intField('labels_used'),
      decompose_ms: floatField('decompose_ms'),
      select_ms: floatField('select_ms'),
      evaluate_ms: floatField('evaluate_ms'),
      seed: intField('seed'),
      repeat_index: intField('repeat_index'),
    }
  })
}

/** Numeric value of a psi column entry; Infinity for the "inf" sentinel. */
export function psiValue(rendered: string): number {
  if (rendered === 'inf') return Infinity
  const value = Number(rendered)
  if (!Number.isFinite(value)) {
    throw new SchemaError(`bad objective value ${JSON.stringify(rendered)}`)
  }
  return value
}
