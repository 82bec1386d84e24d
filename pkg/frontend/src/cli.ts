#!/usr/bin/env node
/**
 * plot --in results.csv --kind ber_curves --scheme alamouti --out fig.svg
 * plot --in req.csv --kind required_ebn0 --out fig5.svg
 *
 * Exit codes: 0 success, 2 schema mismatch / empty selection / bad usage.
 * Output is always an SVG document; a .png extension gets a warning (PNG
 * rasterization would need a native canvas, SVG keeps runs byte-identical).
 */

import * as fs from "fs";
import { EmptySelection, SchemaMismatch, readBerCsv, readRequiredCsv } from "./csv";
import { berCurves, requiredEbn0 } from "./figure";

interface Args {
    in: string;
    kind: string;
    out: string;
    scheme?: string;
    iteration?: number;
}

function parseArgs(argv: string[]): Args {
    const out: Record<string, string> = {};
    for (let i = 0; i < argv.length; i += 2) {
        const key = argv[i];
        const value = argv[i + 1];
        if (!key.startsWith("--") || value === undefined) {
            throw new Error(`expected --key value pairs, got '${key}'`);
        }
        out[key.slice(2)] = value;
    }
    for (const required of ["in", "kind", "out"]) {
        if (!(required in out)) throw new Error(`missing --${required}`);
    }
    return {
        in: out.in,
        kind: out.kind,
        out: out.out,
        scheme: out.scheme,
        iteration: out.iteration === undefined ? undefined
            : Number(out.iteration),
    };
}

export function run(argv: string[]): number {
    let args: Args;
    try {
        args = parseArgs(argv);
    } catch (err) {
        console.error(`usage error: ${(err as Error).message}`);
        return 2;
    }
    try {
        const text = fs.readFileSync(args.in, "utf8");
        let svg: string;
        if (args.kind === "ber_curves") {
            if (!args.scheme) {
                console.error("ber_curves needs --scheme");
                return 2;
            }
            svg = berCurves(readBerCsv(text),
                { scheme: args.scheme, iteration: args.iteration });
        } else if (args.kind === "required_ebn0") {
            svg = requiredEbn0(readRequiredCsv(text));
        } else {
            console.error(`unknown --kind '${args.kind}'`);
            return 2;
        }
        if (args.out.endsWith(".png")) {
            console.error("note: writing SVG content (PNG rasterization "
                + "needs a native canvas; rename to .svg to silence this)");
        }
        fs.writeFileSync(args.out, svg);
        return 0;
    } catch (err) {
        if (err instanceof SchemaMismatch) {
            console.error(`schema mismatch: ${err.message}`);
            return 2;
        }
        if (err instanceof EmptySelection) {
            console.error(`empty selection: ${err.message}`);
            return 2;
        }
        throw err;
    }
}

if (require.main === module) {
    process.exit(run(process.argv.slice(2)));
}
