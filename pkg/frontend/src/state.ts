/** Inspector state and interaction controller.
 *
 * One source of truth for the current station and target distance: the 3D
 * view, the curve cursor and the numeric readouts all render from the same
 * state object. Visibility queries are coalesced to at most one in flight;
 * while a query runs, the latest requested (s, d) waits in a single slot and
 * responses for anything but the newest request are discarded.
 */
import type { Meta, Profile, VisibilityResult } from './api.js';

export interface InspectorState {
    s: number;
    d: number;
    sMin: number;
    sMax: number;
    cap: number;
    targetKind: 'point_pair' | 'box';
    lastResult: VisibilityResult | null;
    pending: boolean;
    profile: Profile | null;
    error: string | null;
}

export type VisibilityFetcher = (s: number, d: number) => Promise<VisibilityResult>;
export type StateListener = (state: InspectorState) => void;

const DEFAULT_DISTANCE = 100;

export class InspectorController {
    private state: InspectorState = {
        s: 0, d: DEFAULT_DISTANCE, sMin: 0, sMax: 0, cap: 400,
        targetKind: 'point_pair', lastResult: null, pending: false,
        profile: null, error: null,
    };
    private listeners: StateListener[] = [];
    private seq = 0;
    private inFlight = false;
    private queued: { s: number; d: number } | null = null;

    constructor(private readonly fetchVisibility: VisibilityFetcher) {}

    get current(): InspectorState {
        return this.state;
    }

    subscribe(listener: StateListener): void {
        this.listeners.push(listener);
    }

    private emit(patch: Partial<InspectorState>): void {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners) listener(this.state);
    }

    loadSession(meta: Meta, profile: Profile): void {
        const sMin = meta.trajectory.s_min;
        const sMax = meta.trajectory.s_max;
        this.emit({
            sMin, sMax,
            cap: meta.cap,
            targetKind: meta.config.sweep.target.kind,
            profile,
            s: sMin,
            d: Math.min(DEFAULT_DISTANCE, meta.cap),
            error: null,
        });
        this.issue();
    }

    sessionError(message: string): void {
        this.emit({ error: message });
    }

    setStation(s: number): void {
        const clamped = Math.min(Math.max(s, this.state.sMin), this.state.sMax);
        if (clamped === this.state.s) return;
        this.emit({ s: clamped });
        this.issue();
    }

    setDistance(d: number): void {
        const clamped = Math.min(Math.max(d, 1), this.state.cap);
        if (clamped === this.state.d) return;
        this.emit({ d: clamped });
        this.issue();
    }

    /** Issue (or queue) a visibility query for the current state. */
    private issue(): void {
        const { s, d } = this.state;
        if (this.inFlight) {
            this.queued = { s, d };
            return;
        }
        this.dispatch(s, d);
    }

    private dispatch(s: number, d: number): void {
        const mySeq = ++this.seq;
        this.inFlight = true;
        this.emit({ pending: true });
        this.fetchVisibility(s, d).then(
            (result) => this.settle(mySeq, result, null),
            (err) => this.settle(mySeq, null, String(err)),
        );
    }

    private settle(mySeq: number, result: VisibilityResult | null,
                   error: string | null): void {
        this.inFlight = false;
        if (this.queued !== null) {
            // a newer interaction superseded this query: discard the response
            const next = this.queued;
            this.queued = null;
            this.dispatch(next.s, next.d);
            return;
        }
        if (mySeq !== this.seq) return; // stale straggler
        if (result !== null) {
            this.emit({ lastResult: result, pending: false, error: null });
        } else {
            this.emit({ pending: false, error });
        }
    }
}
