import type {
  ModelInfo,
  OpenSessionRequest,
  SessionEnvelope,
} from "./types";

export class ApiError extends Error {
  status: number;
  detail: string;

  constructor(status: number, detail: string) {
    super(`${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

type FetchLike = typeof fetch;

async function request<T>(
  fetchFn: FetchLike,
  url: string,
  init?: RequestInit,
): Promise<T> {
  let res: Response;
  try {
    res = await fetchFn(url, init);
  } catch (err) {
    throw new ApiError(0, `network error: ${String(err)}`);
  }
  if (res.status === 204) return undefined as T;
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    /* non-JSON error body */
  }
  if (!res.ok) {
    const detail =
      body && typeof body === "object" && "detail" in body
        ? typeof (body as { detail: unknown }).detail === "string"
          ? ((body as { detail: string }).detail)
          : JSON.stringify((body as { detail: unknown }).detail)
        : res.statusText;
    throw new ApiError(res.status, detail);
  }
  return body as T;
}

function post(payload: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  };
}

/** Thin typed client; everything the UI knows about the engine comes
 * through these calls. */
export function createClient(baseUrl: string, fetchFn: FetchLike = fetch) {
  const base = baseUrl.replace(/\/$/, "");
  return {
    healthz: () =>
      request<{ status: string; backend: string }>(fetchFn, `${base}/healthz`),

    uploadModel: (doc: unknown) =>
      request<ModelInfo>(fetchFn, `${base}/models`, post({ model: doc })),

    uploadCatalogue: (csv: string) =>
      request<ModelInfo>(fetchFn, `${base}/models`, post({ catalogue: csv })),

    modelStats: (modelId: string) =>
      request<ModelInfo>(fetchFn, `${base}/models/${modelId}/stats`),

    openSession: (req: OpenSessionRequest) =>
      request<SessionEnvelope>(fetchFn, `${base}/sessions`, post(req)),

    getSession: (sid: string) =>
      request<SessionEnvelope>(fetchFn, `${base}/sessions/${sid}`),

    assign: (sid: string, name: string, value: string | number) =>
      request<SessionEnvelope>(
        fetchFn,
        `${base}/sessions/${sid}/assign`,
        post({ name, value }),
      ),

    unassign: (sid: string, name: string) =>
      request<SessionEnvelope>(
        fetchFn,
        `${base}/sessions/${sid}/unassign`,
        post({ name }),
      ),

    setBounds: (sid: string, bounds: Record<string, number>) =>
      request<SessionEnvelope>(
        fetchFn,
        `${base}/sessions/${sid}/bounds`,
        post({ bounds }),
      ),

    frontier: (sid: string) =>
      request<{ session_id: string; frontier: number[][] }>(
        fetchFn,
        `${base}/sessions/${sid}/frontier`,
      ),

    closeSession: (sid: string) =>
      request<void>(fetchFn, `${base}/sessions/${sid}`, { method: "DELETE" }),
  };
}

export type Client = ReturnType<typeof createClient>;
