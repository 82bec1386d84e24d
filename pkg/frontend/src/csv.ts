/**
 * Readers for the simulator's versioned CSV schemas.
 *
 * Both files start with a `# schema: <id>` line; anything else is refused
 * so the plots never run on data they do not understand.
 */

export const BER_SCHEMA = "mimo-ofdm-ber/1";
export const REQ_SCHEMA = "mimo-ofdm-reqebn0/1";

export class SchemaMismatch extends Error {}
export class EmptySelection extends Error {}

export interface BerRecord {
    scheme: string;
    cfo_rel: number;
    sfo_rel: number;
    ebn0_db: number;
    iteration: number;
    bits_simulated: number;
    bit_errors: number;
    frames: number;
    seed: number;
    wall_time_s: number;
}

export interface RequiredRecord {
    scheme: string;
    axis: string;
    offset: number;
    target_ber: number;
    required_ebn0_db: number | null;
    floor: boolean;
}

function splitCsv(text: string, schema: string): string[][] {
    const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
    if (lines.length === 0 || lines[0].trim() !== `# schema: ${schema}`) {
        throw new SchemaMismatch(
            `expected '# schema: ${schema}', got '${lines[0] ?? ""}'`);
    }
    return lines.slice(1).map((l) => l.split(","));
}

function asRows(cells: string[][], expected: string[]): Record<string, string>[] {
    const header = cells[0];
    if (JSON.stringify(header) !== JSON.stringify(expected)) {
        throw new SchemaMismatch(`unexpected columns: ${header.join(",")}`);
    }
    return cells.slice(1).map((row) =>
        Object.fromEntries(expected.map((name, i) => [name, row[i]])));
}

const BER_FIELDS = ["scheme", "cfo_rel", "sfo_rel", "ebn0_db", "iteration",
    "bits_simulated", "bit_errors", "frames", "seed", "wall_time_s"];

const REQ_FIELDS = ["scheme", "axis", "offset", "target_ber",
    "required_ebn0_db", "floor"];

export function readBerCsv(text: string): BerRecord[] {
    return asRows(splitCsv(text, BER_SCHEMA), BER_FIELDS).map((r) => ({
        scheme: r.scheme,
        cfo_rel: Number(r.cfo_rel),
        sfo_rel: Number(r.sfo_rel),
        ebn0_db: Number(r.ebn0_db),
        iteration: Number(r.iteration),
        bits_simulated: Number(r.bits_simulated),
        bit_errors: Number(r.bit_errors),
        frames: Number(r.frames),
        seed: Number(r.seed),
        wall_time_s: Number(r.wall_time_s),
    }));
}

export function readRequiredCsv(text: string): RequiredRecord[] {
    return asRows(splitCsv(text, REQ_SCHEMA), REQ_FIELDS).map((r) => ({
        scheme: r.scheme,
        axis: r.axis,
        offset: Number(r.offset),
        target_ber: Number(r.target_ber),
        required_ebn0_db: r.required_ebn0_db === "" ? null
            : Number(r.required_ebn0_db),
        floor: r.floor === "True" || r.floor === "true",
    }));
}
