#!/usr/bin/env node
import { readFileSync, writeFileSync } from 'node:fs'
import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'
import { parseBenchCsv, SchemaError, BenchRow } from './csv.js'
import { groupStats, YColumn } from './stats.js'
import { buildFigure } from './svg.js'

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .usage('Render a quality-vs-budget figure from glsolve bench CSVs')
    .option('csv', {
      type: 'string',
      array: true,
      demandOption: true,
      describe: 'benchmark CSV file(s)',
    })
    .option('y', {
      choices: ['psi_graph', 'psi_tree'] as const,
      default: 'psi_graph' as YColumn,
      describe: 'objective column to plot',
    })
    .option('out', { type: 'string', demandOption: true, describe: 'output .svg path' })
    .option('log-y', { type: 'boolean', default: false, describe: 'logarithmic value axis' })
    .strict()
    .help()
    .parse()

  if (!argv.out.endsWith('.svg')) {
    process.stderr.write('only .svg output is supported; convert externally for other formats\n')
    return 1
  }

  try {
    const rows: BenchRow[] = []
    for (const path of argv.csv) {
      rows.push(...parseBenchCsv(readFileSync(path, 'utf-8')))
    }
    const stats = groupStats(rows, argv.y)
    const svg = buildFigure(stats, { yLabel: `objective value (${argv.y})`, logY: argv['log-y'] })
    writeFileSync(argv.out, svg)
    process.stdout.write(`wrote ${argv.out} (${stats.length} groups)\n`)
    return 0
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`)
      return 2
    }
    throw err
  }
}

main().then((code) => {
  process.exitCode = code
})
