#!/usr/bin/env node
/**
 * semibwk-plots render --csv PATH --outdir DIR [--kind reward|timing]
 *
 * Exit codes: 0 rendered (or empty input, with a warning), 1 bad schema or IO
 * failure, 2 usage error.
 */

import * as fs from "node:fs";

import { SchemaError } from "./csv.js";
import { renderRewardFigures, renderTimingFigure } from "./render.js";

function usage(): void {
    console.error("usage: semibwk-plots render --csv PATH --outdir DIR [--kind reward|timing]");
}

export function main(argv: string[]): number {
    if (argv[0] !== "render") {
        usage();
        return 2;
    }
    let csvPath: string | undefined;
    let outDir: string | undefined;
    let kind = "reward";
    for (let i = 1; i < argv.length; i += 2) {
        const flag = argv[i];
        const value = argv[i + 1];
        if (value === undefined) {
            usage();
            return 2;
        }
        switch (flag) {
            case "--csv":
                csvPath = value;
                break;
            case "--outdir":
                outDir = value;
                break;
            case "--kind":
                kind = value;
                break;
            default:
                usage();
                return 2;
        }
    }
    if (!csvPath || !outDir || (kind !== "reward" && kind !== "timing")) {
        usage();
        return 2;
    }
    let text: string;
    try {
        text = fs.readFileSync(csvPath, "utf8");
    } catch (err) {
        console.error(`cannot read ${csvPath}: ${(err as Error).message}`);
        return 1;
    }
    try {
        const result =
            kind === "reward" ? renderRewardFigures(text, outDir) : renderTimingFigure(text, outDir);
        for (const w of result.warnings) console.warn(`warning: ${w}`);
        for (const f of result.files) console.log(f);
        return 0;
    } catch (err) {
        if (err instanceof SchemaError) {
            console.error(`schema error: ${err.message}`);
            return 1;
        }
        throw err;
    }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href) {
    process.exit(main(process.argv.slice(2)));
}
