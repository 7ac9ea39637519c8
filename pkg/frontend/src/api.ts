/** Typed client for the roadsight serve API. The UI never computes
 * visibility itself; every displayed value comes from these endpoints. */

export interface ProfileRow {
    s: number;
    available_m: number | null;
    required_m: number | null;
    deficit: boolean | null;
    [fixedColumn: string]: number | boolean | null;
}

export interface Profile {
    cap: number;
    fixed_distances: number[];
    infeasible_stations: number[];
    stations: ProfileRow[];
}

export interface ScenePayload {
    vertices: number[][];
    triangles: number[][];
    trajectory: number[][];
    total_triangles: number;
    returned_triangles: number;
}

export interface VisibilityResult {
    visible: boolean;
    fraction: number;
    in_range: boolean;
    s: number;
    d: number;
}

export interface TargetConfig {
    kind: 'point_pair' | 'box';
    lamp_height?: number;
    lamp_separation?: number;
    width?: number;
    length?: number;
    height?: number;
}

export interface Meta {
    cap: number;
    config: {
        sweep: {
            cap: number;
            target: TargetConfig;
            observer: { eye_height: number };
            [key: string]: unknown;
        };
        [key: string]: unknown;
    };
    mesh: { vertices: number; triangles: number };
    trajectory: { s_min: number; s_max: number; stations: number };
}

export class ApiError extends Error {
    constructor(message: string, readonly status: number, readonly field?: string) {
        super(message);
    }
}

async function getJson<T>(url: string): Promise<T> {
    const resp = await fetch(url);
    if (!resp.ok) {
        let field: string | undefined;
        let message = `${resp.status} on ${url}`;
        try {
            const body = await resp.json();
            field = body.field;
            message = body.error ?? message;
        } catch {
            /* non-JSON error body */
        }
        throw new ApiError(message, resp.status, field);
    }
    return resp.json() as Promise<T>;
}

export class ApiClient {
    constructor(private readonly baseUrl: string = '') {}

    meta(): Promise<Meta> {
        return getJson(`${this.baseUrl}/api/meta`);
    }

    profile(): Promise<Profile> {
        return getJson(`${this.baseUrl}/api/profile`);
    }

    scene(budget = 50000): Promise<ScenePayload> {
        return getJson(`${this.baseUrl}/api/scene?budget=${budget}`);
    }

    visibility(s: number, d: number): Promise<VisibilityResult> {
        return getJson(`${this.baseUrl}/api/visibility?s=${s}&d=${d}`);
    }
}
