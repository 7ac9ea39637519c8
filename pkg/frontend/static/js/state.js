const DEFAULT_DISTANCE = 100;
export class InspectorController {
    constructor(fetchVisibility) {
        this.fetchVisibility = fetchVisibility;
        this.state = {
            s: 0, d: DEFAULT_DISTANCE, sMin: 0, sMax: 0, cap: 400,
            targetKind: 'point_pair', lastResult: null, pending: false,
            profile: null, error: null,
        };
        this.listeners = [];
        this.seq = 0;
        this.inFlight = false;
        this.queued = null;
    }
    get current() {
        return this.state;
    }
    subscribe(listener) {
        this.listeners.push(listener);
    }
    emit(patch) {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners)
            listener(this.state);
    }
    loadSession(meta, profile) {
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
    sessionError(message) {
        this.emit({ error: message });
    }
    setStation(s) {
        const clamped = Math.min(Math.max(s, this.state.sMin), this.state.sMax);
        if (clamped === this.state.s)
            return;
        this.emit({ s: clamped });
        this.issue();
    }
    setDistance(d) {
        const clamped = Math.min(Math.max(d, 1), this.state.cap);
        if (clamped === this.state.d)
            return;
        this.emit({ d: clamped });
        this.issue();
    }
    /** Issue (or queue) a visibility query for the current state. */
    issue() {
        const { s, d } = this.state;
        if (this.inFlight) {
            this.queued = { s, d };
            return;
        }
        this.dispatch(s, d);
    }
    dispatch(s, d) {
        const mySeq = ++this.seq;
        this.inFlight = true;
        this.emit({ pending: true });
        this.fetchVisibility(s, d).then((result) => this.settle(mySeq, result, null), (err) => this.settle(mySeq, null, String(err)));
    }
    settle(mySeq, result, error) {
        this.inFlight = false;
        if (this.queued !== null) {
            // a newer interaction superseded this query: discard the response
            const next = this.queued;
            this.queued = null;
            this.dispatch(next.s, next.d);
            return;
        }
        if (mySeq !== this.seq)
            return; // stale straggler
        if (result !== null) {
            this.emit({ lastResult: result, pending: false, error: null });
        }
        else {
            this.emit({ pending: false, error });
        }
    }
}
