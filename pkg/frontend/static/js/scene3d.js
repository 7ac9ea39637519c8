export function defaultCamera(scene) {
    const pts = scene.trajectory.length ? scene.trajectory : scene.vertices;
    let cx = 0, cy = 0, cz = 0;
    for (const p of pts) {
        cx += p[0];
        cy += p[1];
        cz += p[2];
    }
    const n = Math.max(pts.length, 1);
    cx /= n;
    cy /= n;
    cz /= n;
    let radius = 10;
    for (const p of pts) {
        radius = Math.max(radius, Math.hypot(p[0] - cx, p[1] - cy, p[2] - cz));
    }
    return { target: [cx, cy, cz], distance: radius * 1.6,
        yaw: -Math.PI / 3, pitch: 0.5, fov: Math.PI / 4 };
}
export function cameraEye(cam) {
    const cp = Math.cos(cam.pitch), sp = Math.sin(cam.pitch);
    const cy = Math.cos(cam.yaw), sy = Math.sin(cam.yaw);
    return [
        cam.target[0] + cam.distance * cp * cy,
        cam.target[1] + cam.distance * cp * sy,
        cam.target[2] + cam.distance * sp,
    ];
}
/** Project a world point; returns [px, py, viewDepth] or null behind camera. */
export function projectPoint(p, cam, width, height) {
    const eye = cameraEye(cam);
    const fwd = normalize(sub(cam.target, eye));
    const right = normalize(cross(fwd, [0, 0, 1]));
    const up = cross(right, fwd);
    const rel = sub(p, eye);
    const depth = dot(rel, fwd);
    if (depth <= 1e-6)
        return null;
    const f = height / (2 * Math.tan(cam.fov / 2));
    const px = width / 2 + (dot(rel, right) / depth) * f;
    const py = height / 2 - (dot(rel, up) / depth) * f;
    return [px, py, depth];
}
export function boxCorners(base, headingXY, dims) {
    const [hx, hy] = headingXY;
    const norm = Math.hypot(hx, hy) || 1;
    const f = [hx / norm, hy / norm, 0];
    const l = [-f[1], f[0], 0];
    const corners = [];
    for (const dz of [0, dims.height]) {
        for (const [df, dl] of [[-1, -1], [1, -1], [1, 1], [-1, 1]]) {
            corners.push([
                base[0] + (df * dims.length / 2) * f[0] + (dl * dims.width / 2) * l[0],
                base[1] + (df * dims.length / 2) * f[1] + (dl * dims.width / 2) * l[1],
                base[2] + dz,
            ]);
        }
    }
    return corners;
}
const BOX_EDGES = [
    [0, 1], [1, 2], [2, 3], [3, 0],
    [4, 5], [5, 6], [6, 7], [7, 4],
    [0, 4], [1, 5], [2, 6], [3, 7],
];
function sub(a, b) { return [a[0] - b[0], a[1] - b[1], a[2] - b[2]]; }
function dot(a, b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
function cross(a, b) {
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0]];
}
function normalize(a) {
    const n = Math.hypot(a[0], a[1], a[2]) || 1;
    return [a[0] / n, a[1] / n, a[2] / n];
}
export function drawScene(ctx, scene, cam, width, height, eyeMarker, target) {
    ctx.fillStyle = '#10141c';
    ctx.fillRect(0, 0, width, height);
    const proj = (p) => projectPoint([p[0], p[1], p[2]], cam, width, height);
    // mesh triangles, painter-sorted
    const projected = scene.vertices.map(proj);
    const faces = [];
    for (const tri of scene.triangles) {
        const a = projected[tri[0]], b = projected[tri[1]], c = projected[tri[2]];
        if (!a || !b || !c)
            continue;
        faces.push({ pts: [[a[0], a[1]], [b[0], b[1]], [c[0], c[1]]],
            depth: (a[2] + b[2] + c[2]) / 3 });
    }
    faces.sort((x, y) => y.depth - x.depth);
    for (const face of faces) {
        ctx.beginPath();
        ctx.moveTo(face.pts[0][0], face.pts[0][1]);
        ctx.lineTo(face.pts[1][0], face.pts[1][1]);
        ctx.lineTo(face.pts[2][0], face.pts[2][1]);
        ctx.closePath();
        ctx.fillStyle = '#3c4250';
        ctx.fill();
        ctx.strokeStyle = '#596070';
        ctx.lineWidth = 0.4;
        ctx.stroke();
    }
    // trajectory polyline
    ctx.strokeStyle = '#3b7ddd';
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let started = false;
    for (const p of scene.trajectory) {
        const q = proj(p);
        if (!q) {
            started = false;
            continue;
        }
        if (!started) {
            ctx.moveTo(q[0], q[1]);
            started = true;
        }
        else
            ctx.lineTo(q[0], q[1]);
    }
    ctx.stroke();
    if (eyeMarker) {
        const q = proj(eyeMarker);
        if (q) {
            ctx.fillStyle = '#ffd23c';
            ctx.beginPath();
            ctx.arc(q[0], q[1], 5, 0, 2 * Math.PI);
            ctx.fill();
        }
    }
    if (target) {
        const color = target.visible === null ? '#9aa0ab'
            : target.visible ? '#35c46a' : '#e04545';
        ctx.strokeStyle = color;
        ctx.fillStyle = color;
        if (target.kind === 'box') {
            const corners = boxCorners(target.base, target.headingXY, target.dims);
            const pts = corners.map((c) => proj(c));
            ctx.lineWidth = 1.8;
            for (const [i, j] of BOX_EDGES) {
                const a = pts[i], b = pts[j];
                if (!a || !b)
                    continue;
                ctx.beginPath();
                ctx.moveTo(a[0], a[1]);
                ctx.lineTo(b[0], b[1]);
                ctx.stroke();
            }
        }
        else {
            const [hx, hy] = target.headingXY;
            const n = Math.hypot(hx, hy) || 1;
            const l = [-hy / n, hx / n, 0];
            for (const side of [-1, 1]) {
                const lamp = [
                    target.base[0] + side * (target.lampSeparation / 2) * l[0],
                    target.base[1] + side * (target.lampSeparation / 2) * l[1],
                    target.base[2] + target.lampHeight,
                ];
                const q = proj(lamp);
                if (!q)
                    continue;
                ctx.beginPath();
                ctx.arc(q[0], q[1], 4, 0, 2 * Math.PI);
                ctx.fill();
            }
        }
    }
}
