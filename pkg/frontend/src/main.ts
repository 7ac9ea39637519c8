/** Entry point: loads the session, wires sliders, canvases and the state
 * controller together. All three views (3D scene, curve panel, readouts)
 * re-render from the same state on every change. */
import { ApiClient } from './api.js';
import type { Meta, ScenePayload } from './api.js';
import { computeChartLayout, drawChart, pxToStation } from './chart.js';
import { buildArcPolyline, poseAtArc } from './polyline.js';
import type { ArcPolyline } from './polyline.js';
import { Camera, defaultCamera, drawScene } from './scene3d.js';
import type { TargetMarker } from './scene3d.js';
import { InspectorController } from './state.js';

const api = new ApiClient('');

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

async function boot(): Promise<void> {
    const banner = el<HTMLDivElement>('error-banner');
    const sceneCanvas = el<HTMLCanvasElement>('scene-canvas');
    const chartCanvas = el<HTMLCanvasElement>('chart-canvas');
    const stationSlider = el<HTMLInputElement>('station-slider');
    const distanceSlider = el<HTMLInputElement>('distance-slider');
    const stationReadout = el<HTMLSpanElement>('station-readout');
    const distanceReadout = el<HTMLSpanElement>('distance-readout');
    const resultBadge = el<HTMLSpanElement>('result-badge');
    const fractionReadout = el<HTMLSpanElement>('fraction-readout');

    const controller = new InspectorController((s, d) => api.visibility(s, d));

    let meta: Meta;
    let scene: ScenePayload;
    let poly: ArcPolyline;
    let camera: Camera;

    const render = () => {
        const state = controller.current;
        banner.style.display = state.error ? 'block' : 'none';
        if (state.error) banner.textContent = `${state.error} `;

        stationReadout.textContent = `${state.s.toFixed(1)} m`;
        distanceReadout.textContent = `${state.d.toFixed(1)} m`;
        stationSlider.value = String(state.s);
        distanceSlider.value = String(state.d);

        const result = state.lastResult;
        if (result === null) {
            resultBadge.textContent = 'n/a';
            resultBadge.className = 'badge';
            fractionReadout.textContent = '';
        } else {
            const label = !result.in_range ? 'out of range'
                : result.visible ? 'visible' : 'occluded';
            resultBadge.textContent = state.pending ? `${label} …` : label;
            resultBadge.className = 'badge ' + (!result.in_range ? 'gray'
                : result.visible ? 'green' : 'red');
            fractionReadout.textContent =
                `${(result.fraction * 100).toFixed(1)}% of target surface clear`;
        }

        if (state.profile) {
            const layout = computeChartLayout(
                state.profile, chartCanvas.width, chartCanvas.height, state.s);
            drawChart(chartCanvas.getContext('2d')!, layout);
        }

        if (scene) {
            const eyePose = poseAtArc(poly, state.s);
            const eyeHeight = meta.config.sweep.observer?.eye_height ?? 1.0;
            const targetPose = poseAtArc(poly, state.s + state.d);
            const targetCfg = meta.config.sweep.target;
            const marker: TargetMarker = {
                kind: state.targetKind,
                base: targetPose.position,
                headingXY: targetPose.headingXY,
                dims: {
                    width: targetCfg.width ?? 1.5,
                    length: targetCfg.length ?? 4.0,
                    height: targetCfg.height ?? 1.3,
                },
                lampHeight: targetCfg.lamp_height ?? 0.6,
                lampSeparation: targetCfg.lamp_separation ?? 1.2,
                visible: result && result.in_range ? result.visible : null,
            };
            const eyeMarker: [number, number, number] = [
                eyePose.position[0], eyePose.position[1],
                eyePose.position[2] + eyeHeight];
            drawScene(sceneCanvas.getContext('2d')!, scene, camera,
                      sceneCanvas.width, sceneCanvas.height, eyeMarker, marker);
        }
    };

    controller.subscribe(render);

    const retry = document.createElement('button');
    retry.textContent = 'retry';
    retry.onclick = () => void load();
    banner.appendChild(retry);

    async function load(): Promise<void> {
        try {
            meta = await api.meta();
            const profile = await api.profile();
            scene = await api.scene();
            poly = buildArcPolyline(scene.trajectory);
            camera = defaultCamera(scene);
            stationSlider.min = String(meta.trajectory.s_min);
            stationSlider.max = String(meta.trajectory.s_max);
            stationSlider.step = '1';
            distanceSlider.min = '1';
            distanceSlider.max = String(meta.cap);
            distanceSlider.step = '1';
            controller.loadSession(meta, profile);
        } catch (err) {
            controller.sessionError(`cannot reach the serve layer: ${err}`);
        }
    }

    stationSlider.addEventListener('input', () =>
        controller.setStation(Number(stationSlider.value)));
    distanceSlider.addEventListener('input', () =>
        controller.setDistance(Number(distanceSlider.value)));

    chartCanvas.addEventListener('click', (ev) => {
        const state = controller.current;
        if (!state.profile) return;
        const layout = computeChartLayout(state.profile, chartCanvas.width,
                                          chartCanvas.height, state.s);
        const rect = chartCanvas.getBoundingClientRect();
        controller.setStation(pxToStation(layout, ev.clientX - rect.left));
    });

    // simple orbit controls
    let dragging = false;
    let lastX = 0, lastY = 0;
    sceneCanvas.addEventListener('mousedown', (ev) => {
        dragging = true;
        lastX = ev.clientX;
        lastY = ev.clientY;
    });
    window.addEventListener('mouseup', () => { dragging = false; });
    window.addEventListener('mousemove', (ev) => {
        if (!dragging || !camera) return;
        camera.yaw -= (ev.clientX - lastX) * 0.008;
        camera.pitch = Math.min(Math.max(
            camera.pitch + (ev.clientY - lastY) * 0.008, 0.05), 1.5);
        lastX = ev.clientX;
        lastY = ev.clientY;
        render();
    });
    sceneCanvas.addEventListener('wheel', (ev) => {
        if (!camera) return;
        ev.preventDefault();
        camera.distance *= ev.deltaY > 0 ? 1.1 : 0.9;
        render();
    });

    await load();
}

window.addEventListener('DOMContentLoaded', () => void boot());
