import { describe, expect, it } from 'vitest';

import type { Meta, Profile, ScenePayload, VisibilityResult } from '../src/api.js';
import { drawScene } from '../src/scene3d.js';
import type { Camera } from '../src/scene3d.js';
import { InspectorController } from '../src/state.js';

/** Minimal stand-in for CanvasRenderingContext2D recording call counts. */
function stubContext() {
    const calls: Record<string, number> = {};
    const count = (name: string) => {
        calls[name] = (calls[name] ?? 0) + 1;
    };
    const ctx = {
        fillStyle: '', strokeStyle: '', lineWidth: 0, font: '',
        fillRect: () => count('fillRect'),
        clearRect: () => count('clearRect'),
        beginPath: () => count('beginPath'),
        closePath: () => count('closePath'),
        moveTo: () => count('moveTo'),
        lineTo: () => count('lineTo'),
        arc: () => count('arc'),
        fill: () => count('fill'),
        stroke: () => count('stroke'),
        fillText: () => count('fillText'),
    };
    return { ctx: ctx as unknown as CanvasRenderingContext2D, calls };
}

const CAMERA: Camera = {
    target: [50, 0, 0], distance: 80, yaw: -1, pitch: 0.5, fov: Math.PI / 4,
};

describe('drawScene with an empty mesh', () => {
    it('draws the trajectory only and does not crash', () => {
        const scene: ScenePayload = {
            vertices: [], triangles: [],
            trajectory: [[0, 0, 0], [50, 0, 0], [100, 0, 0]],
            total_triangles: 0, returned_triangles: 0,
        };
        const { ctx, calls } = stubContext();
        drawScene(ctx, scene, CAMERA, 800, 600, [0, 0, 1], {
            kind: 'box', base: [80, 0, 0], headingXY: [1, 0],
            dims: { width: 1.5, length: 4, height: 1.3 },
            lampHeight: 0.6, lampSeparation: 1.2, visible: true,
        });
        expect(calls.lineTo).toBeGreaterThan(0);   // trajectory polyline
        expect(calls.stroke).toBeGreaterThan(0);
    });

    it('renders lamp markers for a point-pair target', () => {
        const scene: ScenePayload = {
            vertices: [], triangles: [],
            trajectory: [[0, 0, 0], [100, 0, 0]],
            total_triangles: 0, returned_triangles: 0,
        };
        const { ctx, calls } = stubContext();
        drawScene(ctx, scene, CAMERA, 800, 600, null, {
            kind: 'point_pair', base: [60, 0, 0], headingXY: [1, 0],
            dims: { width: 1.5, length: 4, height: 1.3 },
            lampHeight: 0.6, lampSeparation: 1.2, visible: false,
        });
        expect(calls.arc).toBe(2);  // two lamps
    });
});

describe('slider at a station with available at the cap', () => {
    it('stays visible across the full distance range', async () => {
        const alwaysClear = (s: number, d: number): Promise<VisibilityResult> =>
            Promise.resolve({ visible: true, fraction: 1.0, in_range: true, s, d });
        const meta: Meta = {
            cap: 400,
            config: { sweep: { cap: 400,
                               target: { kind: 'point_pair' },
                               observer: { eye_height: 1.0 } } },
            mesh: { vertices: 0, triangles: 0 },
            trajectory: { s_min: 0, s_max: 2000, stations: 100 },
        };
        const profile: Profile = { cap: 400, fixed_distances: [],
                                   infeasible_stations: [], stations: [] };
        const ctrl = new InspectorController(alwaysClear);
        ctrl.loadSession(meta, profile);
        const flush = () => new Promise((r) => setTimeout(r, 0));
        for (const d of [50, 150, 250, 399]) {
            ctrl.setDistance(d);
            await flush();
            await flush();
            expect(ctrl.current.lastResult?.visible).toBe(true);
        }
    });
});
