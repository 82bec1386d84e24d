/**
 * Tiny deterministic SVG chart toolkit: scales, ticks and element builders.
 * Plain strings in, plain strings out; no DOM, no timestamps, no randomness,
 * so identical inputs produce byte-identical documents.
 */

export interface Scale {
    (value: number): number;
    domain: [number, number];
}

export function linearScale(domain: [number, number],
                            range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
    scale.domain = domain;
    return scale;
}

export function log10Scale(domain: [number, number],
                           range: [number, number]): Scale {
    const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])],
        range);
    const scale = ((v: number) => inner(Math.log10(v))) as Scale;
    scale.domain = domain;
    return scale;
}

/** 1-2-5 ticks covering the domain, at most `count`-ish of them. */
export function linearTicks(domain: [number, number], count = 8): number[] {
    const span = domain[1] - domain[0];
    if (span <= 0) return [domain[0]];
    const raw = span / count;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count)
        ?? 10 * mag;
    const ticks: number[] = [];
    for (let v = Math.ceil(domain[0] / step) * step; v <= domain[1] + 1e-9;
         v += step) {
        ticks.push(Number(v.toPrecision(12)));
    }
    return ticks;
}

/** Decade ticks 10^k inside the domain. */
export function decadeTicks(domain: [number, number]): number[] {
    const lo = Math.ceil(Math.log10(domain[0]) - 1e-9);
    const hi = Math.floor(Math.log10(domain[1]) + 1e-9);
    const out: number[] = [];
    for (let k = lo; k <= hi; k++) out.push(Math.pow(10, k));
    return out;
}

export function fmt(v: number): string {
    // stable short formatting for attributes and labels
    const s = Number(v.toPrecision(8));
    return String(s);
}

export function el(tag: string, attrs: Record<string, string | number>,
                   children: string[] = [], text?: string): string {
    const a = Object.entries(attrs)
        .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
        .join("");
    if (children.length === 0 && text === undefined) {
        return `<${tag}${a}/>`;
    }
    return `<${tag}${a}>${text ?? ""}${children.join("")}</${tag}>`;
}

export function polyline(points: Array<[number, number]>,
                         attrs: Record<string, string | number>): string {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    return el("polyline", { points: pts, fill: "none", ...attrs });
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

export const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

export function marker(kind: string, x: number, y: number, size: number,
                       color: string): string {
    switch (kind) {
        case "square":
            return el("rect", { x: x - size, y: y - size, width: 2 * size,
                height: 2 * size, fill: color });
        case "diamond":
            return el("path", { d: `M ${fmt(x)} ${fmt(y - 1.4 * size)} L ${fmt(x + 1.4 * size)} ${fmt(y)} L ${fmt(x)} ${fmt(y + 1.4 * size)} L ${fmt(x - 1.4 * size)} ${fmt(y)} Z`,
                fill: color });
        case "triangle":
            return el("path", { d: `M ${fmt(x)} ${fmt(y - 1.3 * size)} L ${fmt(x + 1.3 * size)} ${fmt(y + size)} L ${fmt(x - 1.3 * size)} ${fmt(y + size)} Z`,
                fill: color });
        default:
            return el("circle", { cx: x, cy: y, r: size, fill: color });
    }
}

export function document(width: number, height: number,
                         children: string[]): string {
    return [`<?xml version="1.0" encoding="UTF-8"?>`,
        el("svg", { xmlns: "http://www.w3.org/2000/svg", width, height,
            viewBox: `0 0 ${width} ${height}`,
            "font-family": "Helvetica, Arial, sans-serif" }, children),
        ""].join("\n");
}
