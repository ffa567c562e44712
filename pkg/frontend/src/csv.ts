/**
 * Strict parsing of the benchmark CSV schemas.
 *
 * Reward rows: env,mode,matroid,policy,n,T,B,run,seed,total_reward,stop_round,per_step_time_us,lp_opt
 * Timing rows: policy,n,window_index,median_us
 */

export interface RewardRow {
    env: string;
    mode: string;
    matroid: string;
    policy: string;
    n: number;
    T: number;
    B: number;
    run: number;
    seed: string;
    total_reward: number;
    stop_round: number | null;
    per_step_time_us: number;
    lp_opt: number;
}

export interface TimingRow {
    policy: string;
    n: number;
    window_index: number;
    median_us: number;
}

export const REWARD_COLUMNS = [
    "env", "mode", "matroid", "policy", "n", "T", "B", "run", "seed",
    "total_reward", "stop_round", "per_step_time_us", "lp_opt",
] as const;

export const TIMING_COLUMNS = ["policy", "n", "window_index", "median_us"] as const;

export class SchemaError extends Error {}

/** Minimal CSV splitter; handles double-quoted fields, which the emitter never
 * actually produces for this schema. */
export function splitCsvLine(line: string): string[] {
    const out: string[] = [];
    let field = "";
    let quoted = false;
    for (let i = 0; i < line.length; i++) {
        const ch = line[i];
        if (quoted) {
            if (ch === '"') {
                if (line[i + 1] === '"') {
                    field += '"';
                    i++;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch === '"') {
            quoted = true;
        } else if (ch === ",") {
            out.push(field);
            field = "";
        } else {
            field += ch;
        }
    }
    out.push(field);
    return out;
}

function headerIndex(headerLine: string, required: readonly string[]): Map<string, number> {
    const names = splitCsvLine(headerLine.trim());
    const index = new Map<string, number>();
    names.forEach((name, i) => index.set(name, i));
    const missing = required.filter((c) => !index.has(c));
    if (missing.length > 0) {
        throw new SchemaError(
            `missing column(s): ${missing.join(", ")} (header was: ${headerLine.trim()})`,
        );
    }
    return index;
}

function num(raw: string | undefined, column: string, line: number): number {
    if (raw === undefined || raw === "") {
        throw new SchemaError(`line ${line}: empty numeric field ${column}`);
    }
    const v = Number(raw);
    if (!Number.isFinite(v)) {
        throw new SchemaError(`line ${line}: bad numeric value ${raw!} in ${column}`);
    }
    return v;
}

function dataLines(text: string): string[] {
    return text.split(/\r?\n/).filter((l) => l.trim().length > 0);
}

export function parseRewardCsv(text: string): RewardRow[] {
    const lines = dataLines(text);
    if (lines.length === 0) return [];
    const idx = headerIndex(lines[0]!, REWARD_COLUMNS);
    const get = (fields: string[], col: string) => fields[idx.get(col)!];
    return lines.slice(1).map((line, i) => {
        const f = splitCsvLine(line);
        const stopRaw = get(f, "stop_round") ?? "";
        return {
            env: get(f, "env") ?? "",
            mode: get(f, "mode") ?? "",
            matroid: get(f, "matroid") ?? "",
            policy: get(f, "policy") ?? "",
            n: num(get(f, "n"), "n", i + 2),
            T: num(get(f, "T"), "T", i + 2),
            B: num(get(f, "B"), "B", i + 2),
            run: num(get(f, "run"), "run", i + 2),
            seed: get(f, "seed") ?? "",
            total_reward: num(get(f, "total_reward"), "total_reward", i + 2),
            stop_round: stopRaw === "" ? null : num(stopRaw, "stop_round", i + 2),
            per_step_time_us: num(get(f, "per_step_time_us"), "per_step_time_us", i + 2),
            lp_opt: num(get(f, "lp_opt"), "lp_opt", i + 2),
        };
    });
}

export function parseTimingCsv(text: string): TimingRow[] {
    const lines = dataLines(text);
    if (lines.length === 0) return [];
    const idx = headerIndex(lines[0]!, TIMING_COLUMNS);
    const get = (fields: string[], col: string) => fields[idx.get(col)!];
    return lines.slice(1).map((line, i) => {
        const f = splitCsvLine(line);
        return {
            policy: get(f, "policy") ?? "",
            n: num(get(f, "n"), "n", i + 2),
            window_index: num(get(f, "window_index"), "window_index", i + 2),
            median_us: num(get(f, "median_us"), "median_us", i + 2),
        };
    });
}
