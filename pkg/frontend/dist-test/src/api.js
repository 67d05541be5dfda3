export class ApiError extends Error {
    constructor(status, detail) {
        super(`${status}: ${detail}`);
        this.status = status;
        this.detail = detail;
    }
}
async function fail(res) {
    let detail = res.statusText;
    try {
        const body = await res.json();
        if (body && typeof body.detail === "string")
            detail = body.detail;
    }
    catch {
        // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail);
}
export class ApiClient {
    constructor(fetcher, base = "") {
        this.fetcher = fetcher;
        this.base = base;
    }
    async get(path) {
        const res = await this.fetcher(`${this.base}${path}`);
        if (!res.ok)
            return fail(res);
        return res.json();
    }
    async send(method, path, body) {
        const res = await this.fetcher(`${this.base}${path}`, {
            method,
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        if (!res.ok)
            return fail(res);
        return res.json();
    }
    getTypology() {
        return this.get("/api/typology");
    }
    getOntology() {
        return this.get("/api/ontology");
    }
    postEdit(op, revision) {
        return this.send("POST", "/api/edits", { op, revision });
    }
    undo(revision) {
        return this.send("POST", "/api/edits/undo", { revision });
    }
    getRuleSpec(category) {
        return this.get(`/api/rules/${encodeURIComponent(category)}`);
    }
    putRuleSpec(category, positives, negatives, revision) {
        return this.send("PUT", `/api/rules/${encodeURIComponent(category)}`, {
            positives,
            negatives,
            revision,
        });
    }
    getManualRules() {
        return this.get("/api/rules/manual");
    }
    putManualRules(text, revision) {
        return this.send("PUT", "/api/rules/manual", { text, revision });
    }
    classify(revision) {
        return this.send("POST", "/api/classify", { revision });
    }
    getCategoryDocuments(nodeId) {
        return this.get(`/api/categories/${encodeURIComponent(nodeId)}/documents`);
    }
    getDocument(docId) {
        return this.get(`/api/documents/${encodeURIComponent(docId)}`);
    }
}
