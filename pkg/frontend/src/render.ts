/** Turns benchmark CSVs into SVG figure files. */

import * as fs from "node:fs";
import * as path from "node:path";

import { aggregateRewards, aggregateTiming, LP_OPT_SERIES } from "./aggregate.js";
import { renderLineChart } from "./chart.js";
import { parseRewardCsv, parseTimingCsv } from "./csv.js";

export interface RenderResult {
    files: string[];
    warnings: string[];
}

export function renderRewardFigures(csvText: string, outDir: string): RenderResult {
    const rows = parseRewardCsv(csvText);
    if (rows.length === 0) {
        return { files: [], warnings: ["no data rows; nothing to render"] };
    }
    fs.mkdirSync(outDir, { recursive: true });
    const files: string[] = [];
    for (const figure of aggregateRewards(rows)) {
        const { env, mode, matroid, n } = figure.key;
        const svg = renderLineChart({
            title: `${env} (${mode}) - ${matroid} matroid, n=${n}`,
            xLabel: "horizon T",
            yLabel: "mean total reward",
            series: figure.series.map((s) => ({
                label: s.policy,
                xs: s.points.map((p) => p.T),
                ys: s.points.map((p) => p.value),
                dashed: s.policy === LP_OPT_SERIES,
            })),
        });
        const file = path.join(outDir, `reward_${env}-${mode}_${matroid}_n${n}.svg`);
        fs.writeFileSync(file, svg);
        files.push(file);
    }
    return { files, warnings: [] };
}

export function renderTimingFigure(csvText: string, outDir: string): RenderResult {
    const rows = parseTimingCsv(csvText);
    if (rows.length === 0) {
        return { files: [], warnings: ["no data rows; nothing to render"] };
    }
    fs.mkdirSync(outDir, { recursive: true });
    const svg = renderLineChart({
        title: "per-step running time",
        xLabel: "atoms n",
        yLabel: "median per-step time (us)",
        series: aggregateTiming(rows).map((s) => ({
            label: s.policy,
            xs: s.points.map((p) => p.n),
            ys: s.points.map((p) => p.medianUs),
        })),
    });
    const file = path.join(outDir, "timing.svg");
    fs.writeFileSync(file, svg);
    return { files: [file], warnings: [] };
}
