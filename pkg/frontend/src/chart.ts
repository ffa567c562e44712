/**
 * Dependency-free SVG line charts.  Output is deterministic: same data, same
 * bytes.
 */

export interface ChartSeries {
    label: string;
    xs: number[];
    ys: number[];
    dashed?: boolean;
}

export interface ChartSpec {
    title: string;
    xLabel: string;
    yLabel: string;
    series: ChartSeries[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 180, bottom: 56, left: 72 };

const PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

function niceTicks(lo: number, hi: number, count = 5): number[] {
    if (!(hi > lo)) {
        const v = lo;
        return [v - 1, v, v + 1];
    }
    const span = hi - lo;
    const step0 = span / count;
    const mag = Math.pow(10, Math.floor(Math.log10(step0)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count + 1) ?? mag * 10;
    const start = Math.ceil(lo / step) * step;
    const ticks: number[] = [];
    for (let v = start; v <= hi + 1e-9 * span; v += step) ticks.push(v);
    return ticks;
}

const fmt = (v: number): string => {
    if (Math.abs(v) >= 10000) return v.toExponential(1);
    const rounded = Math.round(v * 1000) / 1000;
    return String(rounded);
};

const esc = (s: string): string =>
    s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderLineChart(spec: ChartSpec): string {
    const xsAll = spec.series.flatMap((s) => s.xs);
    const ysAll = spec.series.flatMap((s) => s.ys);
    const x0 = Math.min(...xsAll);
    const x1 = Math.max(...xsAll);
    const yMin = Math.min(0, ...ysAll);
    const yMax = Math.max(...ysAll);
    const yPad = (yMax - yMin || 1) * 0.05;
    const y0 = yMin;
    const y1 = yMax + yPad;

    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const sx = (v: number) => MARGIN.left + (x1 === x0 ? plotW / 2 : ((v - x0) / (x1 - x0)) * plotW);
    const sy = (v: number) => MARGIN.top + plotH - ((v - y0) / (y1 - y0)) * plotH;

    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    );
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    parts.push(
        `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(spec.title)}</text>`,
    );

    for (const t of niceTicks(x0, x1)) {
        const X = sx(t);
        parts.push(
            `<line x1="${X.toFixed(2)}" y1="${MARGIN.top}" x2="${X.toFixed(2)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
            `<text x="${X.toFixed(2)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
        );
    }
    for (const t of niceTicks(y0, y1)) {
        const Y = sy(t);
        parts.push(
            `<line x1="${MARGIN.left}" y1="${Y.toFixed(2)}" x2="${MARGIN.left + plotW}" y2="${Y.toFixed(2)}" stroke="#dddddd"/>`,
            `<text x="${MARGIN.left - 8}" y="${(Y + 4).toFixed(2)}" text-anchor="end" font-size="12">${fmt(t)}</text>`,
        );
    }
    parts.push(
        `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444444"/>`,
        `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${esc(spec.xLabel)}</text>`,
        `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
    );

    spec.series.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length]!;
        const pts = s.xs.map((x, j) => `${sx(x).toFixed(2)},${sy(s.ys[j]!).toFixed(2)}`);
        const dash = s.dashed ? ' stroke-dasharray="7 5"' : "";
        parts.push(
            `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="2"${dash} data-series="${esc(s.label)}"/>`,
        );
        s.xs.forEach((x, j) => {
            parts.push(
                `<circle cx="${sx(x).toFixed(2)}" cy="${sy(s.ys[j]!).toFixed(2)}" r="3" fill="${color}"/>`,
            );
        });
        const ly = MARGIN.top + 16 + i * 20;
        const lx = WIDTH - MARGIN.right + 12;
        parts.push(
            `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${dash}/>`,
            `<text x="${lx + 32}" y="${ly}" font-size="12">${esc(s.label)}</text>`,
        );
    });

    parts.push("</svg>");
    return parts.join("\n") + "\n";
}
