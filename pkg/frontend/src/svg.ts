import { GroupStat, methodsOf } from './stats.js'

export interface FigureOptions {
  yLabel?: string
  logY?: boolean
  width?: number
  height?: number
}

const PALETTE = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
  '#e377c2',
  '#17becf',
]

const MARGIN = { top: 30, right: 200, bottom: 58, left: 78 }

function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo]
  const rawStep = (hi - lo) / target
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)))
  const step = [1, 2, 5, 10].map((m) => m * power).find((s) => (hi - lo) / s <= target) ?? power * 10
  const ticks: number[] = []
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    ticks.push(Number(t.toPrecision(12)))
  }
  return ticks
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = []
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e += 1) {
    if (Math.pow(10, e) >= lo * (1 - 1e-12)) ticks.push(Math.pow(10, e))
  }
  return ticks.length >= 2 ? ticks : [lo, hi]
}

function formatTick(value: number): string {
  if (value === 0) return '0'
  const abs = Math.abs(value)
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(1)
  return String(Number(value.toPrecision(6)))
}

const esc = (s: string) =>
  s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;')

/**
 * Render mean lines with +-1 standard-deviation bands, one color per method.
 * Pure string assembly: identical inputs produce identical bytes.
 */
export function buildFigure(stats: GroupStat[], options: FigureOptions = {}): string {
  const width = options.width ?? 860
  const height = options.height ?? 520
  const logY = options.logY ?? false
  const yLabel = options.yLabel ?? 'objective value'

  const methods = methodsOf(stats)
  const innerW = width - MARGIN.left - MARGIN.right
  const innerH = height - MARGIN.top - MARGIN.bottom

  const ks = stats.map((s) => s.k)
  let yLo = Math.min(...stats.map((s) => s.mean - s.std))
  let yHi = Math.max(...stats.map((s) => s.mean + s.std))
  if (logY) {
    const positives = stats.map((s) => Math.min(s.mean, Math.max(s.mean - s.std, s.mean / 10)))
    yLo = Math.min(...positives)
    if (!(yLo > 0)) {
      throw new Error('log scale needs positive values')
    }
  }
  if (yHi === yLo) {
    yHi = logY ? yLo * 10 : yLo + 1
    yLo = logY ? yLo / 10 : yLo - 1
  }
  const xLo = Math.min(...ks)
  const xHi = Math.max(...ks)
  const xSpan = xHi > xLo ? xHi - xLo : 1

  const xPix = (k: number) => MARGIN.left + ((k - xLo) / xSpan) * innerW
  const yVal = (v: number) => (logY ? Math.log10(v) : v)
  const ySpan = yVal(yHi) - yVal(yLo)
  const yPix = (v: number) => {
    const clamped = logY ? Math.max(v, yLo) : v
    return MARGIN.top + innerH - ((yVal(clamped) - yVal(yLo)) / ySpan) * innerH
  }

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  )
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`)

  // axes
  const x0 = MARGIN.left
  const y0 = MARGIN.top + innerH
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0 + innerW}" y2="${y0}" stroke="black" stroke-width="1"/>`,
  )
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black" stroke-width="1"/>`)
  for (const t of niceTicks(xLo, xHi)) {
    const px = xPix(t).toFixed(2)
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`)
    parts.push(
      `<text x="${px}" y="${y0 + 20}" font-size="12" text-anchor="middle" font-family="sans-serif">${formatTick(t)}</text>`,
    )
  }
  const yTicks = logY ? decadeTicks(yLo, yHi) : niceTicks(yLo, yHi)
  for (const t of yTicks) {
    const py = yPix(t).toFixed(2)
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`)
    parts.push(
      `<text x="${x0 - 9}" y="${py}" font-size="12" text-anchor="end" dominant-baseline="middle" font-family="sans-serif">${formatTick(t)}</text>`,
    )
  }
  parts.push(
    `<text x="${x0 + innerW / 2}" y="${height - 14}" font-size="14" text-anchor="middle" font-family="sans-serif">budget k</text>`,
  )
  parts.push(
    `<text x="20" y="${MARGIN.top + innerH / 2}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 20 ${MARGIN.top + innerH / 2})">${esc(yLabel)}</text>`,
  )

  // one band + line + markers per method
  methods.forEach((method, index) => {
    const color = PALETTE[index % PALETTE.length]
    const points = stats.filter((s) => s.method === method).sort((a, b) => a.k - b.k)
    const upper = points.map((p) => `${xPix(p.k).toFixed(2)},${yPix(p.mean + p.std).toFixed(2)}`)
    const lower = points
      .slice()
      .reverse()
      .map((p) => `${xPix(p.k).toFixed(2)},${yPix(Math.max(logY ? yLo : -Infinity, p.mean - p.std)).toFixed(2)}`)
    if (points.length > 1) {
      parts.push(
        `<polygon class="band" points="${upper.join(' ')} ${lower.join(' ')}" fill="${color}" opacity="0.18" stroke="none"/>`,
      )
    }
    const line = points.map((p) => `${xPix(p.k).toFixed(2)},${yPix(p.mean).toFixed(2)}`)
    parts.push(
      `<polyline class="mean-line" points="${line.join(' ')}" fill="none" stroke="${color}" stroke-width="2"/>`,
    )
    for (const p of points) {
      parts.push(
        `<circle cx="${xPix(p.k).toFixed(2)}" cy="${yPix(p.mean).toFixed(2)}" r="3" fill="${color}"/>`,
      )
    }
  })

  // legend
  const legendX = MARGIN.left + innerW + 16
  methods.forEach((method, index) => {
    const color = PALETTE[index % PALETTE.length]
    const y = MARGIN.top + 10 + index * 22
    parts.push(`<rect class="legend-swatch" x="${legendX}" y="${y - 9}" width="14" height="14" fill="${color}"/>`)
    parts.push(
      `<text x="${legendX + 20}" y="${y + 2}" font-size="12" font-family="sans-serif">${esc(method)}</text>`,
    )
  })

  parts.push('</svg>')
  return parts.join('\n') + '\n'
}
