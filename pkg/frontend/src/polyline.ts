/** Arc-length positioning along the trajectory polyline, used to place the
 * eye marker and the target in the 3D view. Display geometry only — the
 * visible/occluded verdict always comes from the API. */
import type { Vec3 } from './scene3d.js';

export interface ArcPolyline {
    points: Vec3[];
    cumulative: number[];
    length: number;
}

export function buildArcPolyline(points: number[][]): ArcPolyline {
    const pts = points.map((p) => [p[0], p[1], p[2]] as Vec3);
    const cumulative = [0];
    for (let i = 1; i < pts.length; i++) {
        const d = Math.hypot(pts[i][0] - pts[i - 1][0],
                             pts[i][1] - pts[i - 1][1],
                             pts[i][2] - pts[i - 1][2]);
        cumulative.push(cumulative[i - 1] + d);
    }
    return { points: pts, cumulative, length: cumulative[cumulative.length - 1] ?? 0 };
}

export interface ArcPose {
    position: Vec3;
    headingXY: [number, number];
    clamped: boolean;
}

/** Pose at arc length s from the start, clamped to the polyline range. */
export function poseAtArc(poly: ArcPolyline, s: number): ArcPose {
    const { points, cumulative } = poly;
    if (points.length === 0) {
        return { position: [0, 0, 0], headingXY: [1, 0], clamped: true };
    }
    if (points.length === 1) {
        return { position: points[0], headingXY: [1, 0], clamped: true };
    }
    const clamped = s < 0 || s > poly.length;
    const t = Math.min(Math.max(s, 0), poly.length);
    let i = 1;
    while (i < cumulative.length - 1 && cumulative[i] < t) i++;
    const segLen = cumulative[i] - cumulative[i - 1] || 1;
    const alpha = (t - cumulative[i - 1]) / segLen;
    const a = points[i - 1], b = points[i];
    const position: Vec3 = [
        a[0] + alpha * (b[0] - a[0]),
        a[1] + alpha * (b[1] - a[1]),
        a[2] + alpha * (b[2] - a[2]),
    ];
    const hx = b[0] - a[0], hy = b[1] - a[1];
    const n = Math.hypot(hx, hy) || 1;
    return { position, headingXY: [hx / n, hy / n], clamped };
}
