/** Typed client for the roadsight serve API. The UI never computes
 * visibility itself; every displayed value comes from these endpoints. */
export class ApiError extends Error {
    constructor(message, status, field) {
        super(message);
        this.status = status;
        this.field = field;
    }
}
async function getJson(url) {
    const resp = await fetch(url);
    if (!resp.ok) {
        let field;
        let message = `${resp.status} on ${url}`;
        try {
            const body = await resp.json();
            field = body.field;
            message = body.error ?? message;
        }
        catch {
            /* non-JSON error body */
        }
        throw new ApiError(message, resp.status, field);
    }
    return resp.json();
}
export class ApiClient {
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl;
    }
    meta() {
        return getJson(`${this.baseUrl}/api/meta`);
    }
    profile() {
        return getJson(`${this.baseUrl}/api/profile`);
    }
    scene(budget = 50000) {
        return getJson(`${this.baseUrl}/api/scene?budget=${budget}`);
    }
    visibility(s, d) {
        return getJson(`${this.baseUrl}/api/visibility?s=${s}&d=${d}`);
    }
}
