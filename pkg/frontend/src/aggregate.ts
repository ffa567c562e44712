/**
 * Re-aggregation of raw per-run rows.  The harness never precomputes means:
 * this module recomputes them from the rows, with compensated summation so
 * the results agree with the harness's float64 arithmetic to well under 1e-9.
 */

import type { RewardRow, TimingRow } from "./csv.js";

/** Kahan-compensated mean. */
export function mean(values: readonly number[]): number {
    if (values.length === 0) throw new Error("mean of empty list");
    let sum = 0;
    let carry = 0;
    for (const v of values) {
        const y = v - carry;
        const t = sum + y;
        carry = t - sum - y;
        sum = t;
    }
    return sum / values.length;
}

export function median(values: readonly number[]): number {
    if (values.length === 0) throw new Error("median of empty list");
    const sorted = [...values].sort((a, b) => a - b);
    const mid = Math.floor(sorted.length / 2);
    return sorted.length % 2 === 1 ? sorted[mid]! : (sorted[mid - 1]! + sorted[mid]!) / 2;
}

export interface RewardGroupKey {
    env: string;
    mode: string;
    matroid: string;
    n: number;
}

export interface RewardSeries {
    /** policy name, or the synthetic "lp-opt" reference series */
    policy: string;
    points: { T: number; value: number; runs: number }[];
}

export interface RewardFigureData {
    key: RewardGroupKey;
    series: RewardSeries[];
}

const keyString = (k: RewardGroupKey) => `${k.env}|${k.mode}|${k.matroid}|${k.n}`;

export const LP_OPT_SERIES = "lp-opt";

/**
 * One figure per (env, mode, matroid, n): mean total reward per policy vs T,
 * plus the mean LP benchmark as a reference series.
 */
export function aggregateRewards(rows: readonly RewardRow[]): RewardFigureData[] {
    const groups = new Map<string, { key: RewardGroupKey; rows: RewardRow[] }>();
    for (const row of rows) {
        const key = { env: row.env, mode: row.mode, matroid: row.matroid, n: row.n };
        const ks = keyString(key);
        if (!groups.has(ks)) groups.set(ks, { key, rows: [] });
        groups.get(ks)!.rows.push(row);
    }
    const figures: RewardFigureData[] = [];
    for (const ks of [...groups.keys()].sort()) {
        const { key, rows: groupRows } = groups.get(ks)!;
        const policies = [...new Set(groupRows.map((r) => r.policy))].sort();
        const horizons = [...new Set(groupRows.map((r) => r.T))].sort((a, b) => a - b);
        const series: RewardSeries[] = policies.map((policy) => ({
            policy,
            points: horizons.map((T) => {
                const vals = groupRows
                    .filter((r) => r.policy === policy && r.T === T)
                    .map((r) => r.total_reward);
                return { T, value: mean(vals), runs: vals.length };
            }),
        }));
        series.push({
            policy: LP_OPT_SERIES,
            points: horizons.map((T) => {
                const vals = groupRows.filter((r) => r.T === T).map((r) => r.lp_opt);
                return { T, value: mean(vals), runs: vals.length };
            }),
        });
        figures.push({ key, series });
    }
    return figures;
}

export interface TimingSeries {
    policy: string;
    points: { n: number; medianUs: number; windows: number }[];
}

/** Median across windows of each window's average per-step time. */
export function aggregateTiming(rows: readonly TimingRow[]): TimingSeries[] {
    const policies = [...new Set(rows.map((r) => r.policy))].sort();
    return policies.map((policy) => {
        const ns = [...new Set(rows.filter((r) => r.policy === policy).map((r) => r.n))].sort(
            (a, b) => a - b,
        );
        return {
            policy,
            points: ns.map((n) => {
                const vals = rows
                    .filter((r) => r.policy === policy && r.n === n)
                    .map((r) => r.median_us);
                return { n, medianUs: median(vals), windows: vals.length };
            }),
        };
    });
}
