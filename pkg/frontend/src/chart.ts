/** Curve panel: available and required visibility vs curvilinear abscissa,
 * deficit segments shaded, with a station cursor. Layout math is pure and
 * unit-tested; drawing is a thin canvas pass over the layout. */
import type { Profile } from './api.js';

export interface Span {
    s0: number;
    s1: number;
}

export interface ChartLayout {
    width: number;
    height: number;
    sMin: number;
    sMax: number;
    vMax: number;
    available: Array<[number, number]>;
    required: Array<[number, number]>;
    deficitSpans: Array<{ x0: number; x1: number }>;
    cursorX: number;
    xToPx(s: number): number;
    yToPx(v: number): number;
}

const PAD_LEFT = 42;
const PAD_RIGHT = 8;
const PAD_TOP = 8;
const PAD_BOTTOM = 22;

/** Contiguous runs of stations flagged as deficits in the profile. */
export function deficitSpans(profile: Profile): Span[] {
    const spans: Span[] = [];
    let start: number | null = null;
    let last = 0;
    for (const row of profile.stations) {
        if (row.deficit === true) {
            if (start === null) start = row.s;
            last = row.s;
        } else if (start !== null) {
            spans.push({ s0: start, s1: last });
            start = null;
        }
    }
    if (start !== null) spans.push({ s0: start, s1: last });
    return spans;
}

export function computeChartLayout(profile: Profile, width: number,
                                   height: number, cursorS: number): ChartLayout {
    const rows = profile.stations;
    const sValues = rows.map((r) => r.s);
    const sMin = sValues.length ? Math.min(...sValues) : 0;
    const sMax = sValues.length ? Math.max(...sValues) : 1;
    const finite = rows.flatMap((r) => {
        const out: number[] = [];
        if (r.available_m !== null) out.push(r.available_m);
        if (r.required_m !== null) out.push(r.required_m);
        return out;
    });
    const vMax = Math.max(profile.cap, ...(finite.length ? finite : [1])) * 1.05;

    const xSpan = Math.max(sMax - sMin, 1e-9);
    const xToPx = (s: number) =>
        PAD_LEFT + ((s - sMin) / xSpan) * (width - PAD_LEFT - PAD_RIGHT);
    const yToPx = (v: number) =>
        height - PAD_BOTTOM - (v / vMax) * (height - PAD_TOP - PAD_BOTTOM);

    const curve = (key: 'available_m' | 'required_m') =>
        rows.filter((r) => r[key] !== null)
            .map((r) => [xToPx(r.s), yToPx(r[key] as number)] as [number, number]);

    return {
        width, height, sMin, sMax, vMax,
        available: curve('available_m'),
        required: curve('required_m'),
        deficitSpans: deficitSpans(profile).map((sp) => ({
            x0: xToPx(sp.s0), x1: xToPx(sp.s1),
        })),
        cursorX: xToPx(Math.min(Math.max(cursorS, sMin), sMax)),
        xToPx, yToPx,
    };
}

export function pxToStation(layout: ChartLayout, px: number): number {
    const { width, sMin, sMax } = layout;
    const t = (px - PAD_LEFT) / Math.max(width - PAD_LEFT - PAD_RIGHT, 1);
    return sMin + Math.min(Math.max(t, 0), 1) * (sMax - sMin);
}

export function drawChart(ctx: CanvasRenderingContext2D, layout: ChartLayout): void {
    const { width, height } = layout;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = '#ffffff';
    ctx.fillRect(0, 0, width, height);

    for (const span of layout.deficitSpans) {
        ctx.fillStyle = 'rgba(220, 60, 60, 0.18)';
        ctx.fillRect(span.x0, PAD_TOP, Math.max(span.x1 - span.x0, 2),
                     height - PAD_TOP - PAD_BOTTOM);
    }

    const polyline = (pts: Array<[number, number]>, color: string) => {
        if (pts.length < 2) return;
        ctx.strokeStyle = color;
        ctx.lineWidth = 1.6;
        ctx.beginPath();
        ctx.moveTo(pts[0][0], pts[0][1]);
        for (const [x, y] of pts.slice(1)) ctx.lineTo(x, y);
        ctx.stroke();
    };
    polyline(layout.available, '#c0209a');
    polyline(layout.required, '#1a1a1a');

    // axes
    ctx.strokeStyle = '#888';
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(PAD_LEFT, PAD_TOP);
    ctx.lineTo(PAD_LEFT, height - PAD_BOTTOM);
    ctx.lineTo(width - PAD_RIGHT, height - PAD_BOTTOM);
    ctx.stroke();
    ctx.fillStyle = '#444';
    ctx.font = '11px sans-serif';
    ctx.fillText(`${Math.round(layout.vMax)} m`, 2, PAD_TOP + 10);
    ctx.fillText(`${Math.round(layout.sMin)}`, PAD_LEFT, height - 6);
    ctx.fillText(`${Math.round(layout.sMax)} m`, width - 46, height - 6);

    // station cursor
    ctx.strokeStyle = '#2060d0';
    ctx.lineWidth = 1.2;
    ctx.beginPath();
    ctx.moveTo(layout.cursorX, PAD_TOP);
    ctx.lineTo(layout.cursorX, height - PAD_BOTTOM);
    ctx.stroke();
}
