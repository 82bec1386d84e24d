/**
 * The two figure kinds: BER-vs-Eb/N0 curve families and required-Eb/N0
 * versus offset.  Pure presentation of the CSV rows; the only arithmetic is
 * the bit_errors / bits_simulated ratio the y axis shows.
 */

import { BerRecord, EmptySelection, RequiredRecord } from "./csv";
import { PALETTE, MARKERS, Scale, decadeTicks, document, el, fmt,
    linearScale, linearTicks, log10Scale, marker, polyline } from "./svg";

const W = 720;
const H = 480;
const M = { left: 72, right: 24, top: 44, bottom: 52 };

export interface BerPlotOptions {
    scheme: string;
    iteration?: number;     // default: the highest present
}

interface Series {
    label: string;
    points: Array<[number, number]>;  // x value, y value (already numeric)
}

function frame(title: string, xLabel: string, yLabel: string,
               x: Scale, y: Scale, xTicks: number[], yTicks: number[],
               yTickLabel: (v: number) => string,
               body: string[], legend: Series[] | null): string {
    const parts: string[] = [];
    parts.push(el("rect", { x: 0, y: 0, width: W, height: H, fill: "white" }));
    parts.push(el("text", { x: W / 2, y: 24, "text-anchor": "middle",
        "font-size": 15 }, [], title));
    // axes box
    parts.push(el("rect", { x: M.left, y: M.top, width: W - M.left - M.right,
        height: H - M.top - M.bottom, fill: "none", stroke: "#404040",
        "stroke-width": 1 }));
    for (const t of xTicks) {
        const px = x(t);
        parts.push(el("line", { x1: px, y1: M.top, x2: px, y2: H - M.bottom,
            stroke: "#dddddd", "stroke-width": 0.6 }));
        parts.push(el("text", { x: px, y: H - M.bottom + 18,
            "text-anchor": "middle", "font-size": 11 }, [], fmt(t)));
    }
    for (const t of yTicks) {
        const py = y(t);
        parts.push(el("line", { x1: M.left, y1: py, x2: W - M.right, y2: py,
            stroke: "#dddddd", "stroke-width": 0.6 }));
        parts.push(el("text", { x: M.left - 6, y: py + 4,
            "text-anchor": "end", "font-size": 11 }, [], yTickLabel(t)));
    }
    parts.push(el("text", { x: (M.left + W - M.right) / 2, y: H - 14,
        "text-anchor": "middle", "font-size": 12 }, [], xLabel));
    parts.push(el("text", { x: 18, y: (M.top + H - M.bottom) / 2,
        "text-anchor": "middle", "font-size": 12,
        transform: `rotate(-90 18 ${(M.top + H - M.bottom) / 2})` }, [],
        yLabel));
    parts.push(...body);
    if (legend) {
        legend.forEach((s, i) => {
            const lx = M.left + 14;
            const ly = M.top + 16 + 16 * i;
            parts.push(el("line", { x1: lx, y1: ly - 4, x2: lx + 22, y2: ly - 4,
                stroke: PALETTE[i % PALETTE.length], "stroke-width": 1.6 }));
            parts.push(marker(MARKERS[i % MARKERS.length], lx + 11, ly - 4, 3,
                PALETTE[i % PALETTE.length]));
            parts.push(el("text", { x: lx + 28, y: ly, "font-size": 11 }, [],
                s.label));
        });
    }
    return document(W, H, parts);
}

function offsetLabel(r: BerRecord): string {
    if (r.cfo_rel === 0 && r.sfo_rel === 0) return "no offset";
    const parts: string[] = [];
    if (r.cfo_rel !== 0) parts.push(`cfo=${fmt(r.cfo_rel)}`);
    if (r.sfo_rel !== 0) parts.push(`sfo=${fmt(r.sfo_rel)}`);
    return parts.join(" ");
}

export function berCurves(records: BerRecord[], opts: BerPlotOptions): string {
    const mine = records.filter((r) => r.scheme === opts.scheme);
    if (mine.length === 0) {
        throw new EmptySelection(`no rows for scheme '${opts.scheme}'`);
    }
    const iteration = opts.iteration
        ?? Math.max(...mine.map((r) => r.iteration));
    const rows = mine.filter((r) => r.iteration === iteration
        && r.bit_errors > 0);
    if (rows.length === 0) {
        throw new EmptySelection(
            `no rows with errors for scheme '${opts.scheme}' iteration ${iteration}`);
    }

    const byOffset = new Map<string, BerRecord[]>();
    for (const r of rows) {
        const key = `${r.cfo_rel}|${r.sfo_rel}`;
        byOffset.set(key, [...(byOffset.get(key) ?? []), r]);
    }
    const series: Series[] = [...byOffset.entries()]
        .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
        .map(([, rs]) => ({
            label: offsetLabel(rs[0]),
            points: rs.sort((p, q) => p.ebn0_db - q.ebn0_db)
                .map((r): [number, number] =>
                    [r.ebn0_db, r.bit_errors / r.bits_simulated]),
        }));

    const xs = rows.map((r) => r.ebn0_db);
    const bers = rows.map((r) => r.bit_errors / r.bits_simulated);
    const x = linearScale([Math.min(...xs), Math.max(...xs)],
        [M.left, W - M.right]);
    const yLo = Math.pow(10, Math.floor(Math.log10(Math.min(...bers))));
    const y = log10Scale([yLo, 1], [H - M.bottom, M.top]);

    const body: string[] = [];
    series.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const pts = s.points.map(([px, py]): [number, number] =>
            [x(px), y(py)]);
        body.push(polyline(pts, { stroke: color, "stroke-width": 1.6 }));
        for (const [px, py] of pts) {
            body.push(marker(MARKERS[i % MARKERS.length], px, py, 3, color));
        }
    });

    return frame(`BER vs Eb/N0, ${opts.scheme}, iteration ${iteration}`,
        "Eb/N0 [dB]", "BER", x, y,
        linearTicks(x.domain), decadeTicks(y.domain),
        (v) => `1e${Math.round(Math.log10(v))}`,
        body, series);
}

export function requiredEbn0(records: RequiredRecord[]): string {
    const rows = records.filter((r) => !r.floor && r.required_ebn0_db !== null);
    if (rows.length === 0) {
        throw new EmptySelection("no non-floor required-Eb/N0 rows");
    }
    const byScheme = new Map<string, RequiredRecord[]>();
    for (const r of rows) {
        byScheme.set(r.scheme, [...(byScheme.get(r.scheme) ?? []), r]);
    }
    const series: Series[] = [...byScheme.entries()]
        .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
        .map(([scheme, rs]) => ({
            label: scheme,
            points: rs.sort((p, q) => p.offset - q.offset)
                .map((r): [number, number] =>
                    [r.offset, r.required_ebn0_db as number]),
        }));

    const offs = rows.map((r) => r.offset);
    const reqs = rows.map((r) => r.required_ebn0_db as number);
    const x = linearScale([Math.min(...offs), Math.max(...offs)],
        [M.left, W - M.right]);
    const pad = Math.max(0.5, 0.08 * (Math.max(...reqs) - Math.min(...reqs)));
    const y = linearScale([Math.min(...reqs) - pad, Math.max(...reqs) + pad],
        [H - M.bottom, M.top]);

    const body: string[] = [];
    series.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const pts = s.points.map(([px, py]): [number, number] =>
            [x(px), y(py)]);
        body.push(polyline(pts, { stroke: color, "stroke-width": 1.6 }));
        for (const [px, py] of pts) {
            body.push(marker(MARKERS[i % MARKERS.length], px, py, 3, color));
        }
    });

    const axis = rows[0].axis === "sfo_rel" ? "relative SFO" : "relative CFO";
    const target = rows[0].target_ber;
    return frame(`Required Eb/N0 for BER = ${target}`, axis,
        "required Eb/N0 [dB]", x, y,
        linearTicks(x.domain, 6), linearTicks(y.domain, 8),
        (v) => fmt(v), body, series);
}
