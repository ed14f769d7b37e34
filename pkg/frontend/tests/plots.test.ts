import { describe, expect, it } from 'vitest'
import { CSV_COLUMNS, parseBenchCsv, psiValue, SchemaError } from '../src/csv.js'
import { groupStats } from '../src/stats.js'
import { buildFigure } from '../src/svg.js'

/** Deterministic LCG so the expected statistics can be re-derived exactly. */
function lcg(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0
    return state / 2 ** 32
  }
}

function syntheticCsv(methods: string[], ks: number[], repeats: number) {
  const rand = lcg(42)
  const lines = [CSV_COLUMNS.join(',')]
  const values = new Map<string, number[]>()
  for (const method of methods) {
    for (const k of ks) {
      const group: number[] = []
      for (let r = 0; r < repeats; r += 1) {
        const psi = Math.round((0.5 + k * 0.1 + rand()) * 1e6) / 1e6
        group.push(psi)
        lines.push(
          [
            'synthetic',
            method,
            k,
            psi.toFixed(6),
            (psi * 1.25).toFixed(6),
            Math.min(k, 3),
            '12.000',
            '7.500',
            '3.250',
            100 + r,
            r,
          ].join(','),
        )
      }
      values.set(`${method}|${k}`, group)
    }
  }
  return { text: lines.join('\n') + '\n', values }
}

describe('csv parsing', () => {
  it('round-trips the documented schema', () => {
    const { text } = syntheticCsv(['fiedler'], [1, 2], 2)
    const rows = parseBenchCsv(text)
    expect(rows).toHaveLength(4)
    expect(rows[0].dataset).toBe('synthetic')
    expect(rows[0].k).toBe(1)
    expect(rows[0].seed).toBe(100)
  })

  it('rejects a wrong header', () => {
    expect(() => parseBenchCsv('a,b,c\n1,2,3\n')).toThrow(SchemaError)
  })

  it('rejects missing columns', () => {
    const broken = CSV_COLUMNS.slice(0, -1).join(',') + '\nx,fiedler,1,1,1,1,1,1,1,1\n'
    expect(() => parseBenchCsv(broken)).toThrow(SchemaError)
  })

  it('maps the inf sentinel to Infinity', () => {
    expect(psiValue('inf')).toBe(Infinity)
    expect(psiValue('1.500000')).toBeCloseTo(1.5, 12)
  })
})

describe('group statistics', () => {
  it('matches an independent recomputation to 1e-12', () => {
    const { text, values } = syntheticCsv(['fiedler', 'sampled(samples=16)'], [1, 2, 5, 10, 20], 10)
    const rows = parseBenchCsv(text)
    const stats = groupStats(rows, 'psi_graph')
    expect(stats).toHaveLength(10)
    for (const stat of stats) {
      const raw = values.get(`${stat.method}|${stat.k}`)!
      // independent recomputation: exact two-pass over the generated values
      const mean = raw.reduce((a, b) => a + b, 0) / raw.length
      const variance = raw.map((v) => (v - mean) ** 2).reduce((a, b) => a + b, 0) / raw.length
      expect(Math.abs(stat.mean - mean)).toBeLessThanOrEqual(1e-12)
      expect(Math.abs(stat.std - Math.sqrt(variance))).toBeLessThanOrEqual(1e-12)
      expect(stat.count).toBe(10)
    }
  })

  it('single repeat gives a zero-width band', () => {
    const { text } = syntheticCsv(['fiedler'], [1, 2, 3], 1)
    const stats = groupStats(parseBenchCsv(text), 'psi_graph')
    for (const stat of stats) {
      expect(stat.std).toBe(0)
    }
  })

  it('drops infinite sentinels and errors when nothing remains', () => {
    const header = CSV_COLUMNS.join(',')
    const row = 'd,m,1,inf,inf,1,1.0,1.0,1.0,0,0'
    expect(() => groupStats(parseBenchCsv(`${header}\n${row}\n`), 'psi_graph')).toThrow(
      SchemaError,
    )
  })

  it('aggregates psi_tree when asked', () => {
    const { text } = syntheticCsv(['fiedler'], [1], 4)
    const graph = groupStats(parseBenchCsv(text), 'psi_graph')[0]
    const tree = groupStats(parseBenchCsv(text), 'psi_tree')[0]
    // the fixture renders psi_tree with 6 decimals, so only ~1e-6 holds
    expect(Math.abs(tree.mean - graph.mean * 1.25)).toBeLessThanOrEqual(1e-6)
  })
})

describe('figure rendering', () => {
  it('draws one mean line, band, and legend entry per method', () => {
    const { text } = syntheticCsv(['fiedler', 'fiedler-balanced(beta=0.1)'], [1, 2, 5, 10, 20], 10)
    const svg = buildFigure(groupStats(parseBenchCsv(text), 'psi_graph'))
    expect(svg.match(/class="mean-line"/g)).toHaveLength(2)
    expect(svg.match(/class="band"/g)).toHaveLength(2)
    expect(svg.match(/class="legend-swatch"/g)).toHaveLength(2)
    expect(svg).toContain('budget k')
    expect(svg).toContain('objective value')
  })

  it('is deterministic byte for byte', () => {
    const { text } = syntheticCsv(['a', 'b'], [1, 3, 9], 5)
    const rows = parseBenchCsv(text)
    const first = buildFigure(groupStats(rows, 'psi_graph'))
    const second = buildFigure(groupStats(rows, 'psi_graph'))
    expect(first).toBe(second)
  })

  it('log scale rejects nonpositive data', () => {
    const header = CSV_COLUMNS.join(',')
    const row = 'd,m,1,0.000000,1.000000,1,1.0,1.0,1.0,0,0'
    const stats = groupStats(parseBenchCsv(`${header}\n${row}\n`), 'psi_graph')
    expect(() => buildFigure(stats, { logY: true })).toThrow(/positive/)
  })

  it('renders a log axis with decade ticks', () => {
    const header = CSV_COLUMNS.join(',')
    const rows = [
      'd,m,1,0.010000,1.0,1,1.0,1.0,1.0,0,0',
      'd,m,10,1.000000,1.0,1,1.0,1.0,1.0,0,0',
      'd,m,100,100.000000,1.0,1,1.0,1.0,1.0,0,0',
    ]
    const stats = groupStats(parseBenchCsv(`${header}\n${rows.join('\n')}\n`), 'psi_graph')
    const svg = buildFigure(stats, { logY: true })
    expect(svg).toContain('>0.01<')
    expect(svg).toContain('>100<')
  })
})
