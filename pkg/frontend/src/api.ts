/** Typed client for the planning service's HTTP API.
 *
 * The UI holds no physics: every number it shows comes from these endpoints.
 * A fetch implementation is injected so tests can run against an in-memory
 * fake of the service.
 */

export type Variant = "baseline" | "with_ris";

export interface SceneRef {
  scene_id: string;
  revision: number;
}

export interface RisPlacement {
  center_position: [number, number, number];
  normal: [number, number, number];
  up: [number, number, number];
  rows: number;
  cols: number;
  element_spacing_m?: number;
  element_pattern?: unknown;
  weight_mode?: string;
}

export interface SceneDocument {
  frequency_hz?: number;
  walls: Array<{
    vertices: number[][];
    material: { reflection_loss_db: number; transmission_loss_db: number };
  }>;
  bs: { reference_position: number[]; [key: string]: unknown };
  ris?: RisPlacement | null;
  grid: {
    x_min: number;
    x_max: number;
    y_min: number;
    y_max: number;
    step_m: number;
    height_m?: number;
  };
  [key: string]: unknown;
}

export interface SceneResponse extends SceneRef {
  scene: SceneDocument;
}

export interface JobRef {
  job_id: string;
  revision: number;
}

export interface JobStatus {
  job_id: string;
  scene_id: string;
  revision: number;
  variant: Variant;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
  error?: string;
}

export interface ClassificationResponse {
  summary: {
    kind: string;
    cell_count: number;
    category_counts: Record<string, number>;
    max_reduction_db: number | null;
  };
  cells: Array<{
    x_m: number;
    y_m: number;
    z_m: number;
    category: string;
    reduction_db: number | null;
  }>;
}

/** Structured error from the service's {code, message, details} envelope. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(status: number, code: string, message: string,
              details: Record<string, unknown> = {}) {
    super(message);
    this.status = status;
    this.code = code;
    this.details = details;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raise(resp: Response): Promise<never> {
  let code = "HTTP_" + resp.status;
  let message = resp.statusText || "request failed";
  let details: Record<string, unknown> = {};
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      details = body.details ?? {};
    }
  } catch {
    // non-JSON error body; keep the HTTP status fallback
  }
  throw new ApiError(resp.status, code, message, details);
}

export class Api {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = fetch.bind(globalThis)) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async json<T>(url: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + url, init);
    if (!resp.ok) await raise(resp);
    return resp.json() as Promise<T>;
  }

  createScene(document: SceneDocument | string): Promise<SceneRef> {
    const body = typeof document === "string" ? document : JSON.stringify(document);
    return this.json("/api/scenes", { method: "POST", body });
  }

  getScene(sceneId: string): Promise<SceneResponse> {
    return this.json(`/api/scenes/${sceneId}`);
  }

  /** Replace (or remove, with null) the RIS. Returns the bumped revision. */
  updateRis(sceneId: string, ris: RisPlacement | null): Promise<SceneRef> {
    return this.json(`/api/scenes/${sceneId}/ris`, {
      method: "PUT",
      body: JSON.stringify(ris),
    });
  }

  startCompute(sceneId: string, variant: Variant): Promise<JobRef> {
    return this.json(`/api/scenes/${sceneId}/compute?variant=${variant}`,
                     { method: "POST" });
  }

  getJob(jobId: string): Promise<JobStatus> {
    return this.json(`/api/jobs/${jobId}`);
  }

  /** Poll a job until it settles; reports monotone progress via onProgress. */
  async waitForJob(jobId: string, onProgress?: (p: number) => void,
                   intervalMs = 250): Promise<JobStatus> {
    let last = -1;
    for (;;) {
      const job = await this.getJob(jobId);
      if (onProgress && job.progress > last) {
        last = job.progress;
        onProgress(job.progress);
      }
      if (job.state === "done" || job.state === "failed") return job;
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }

  /** The map as served CSV bytes — the byte-exact artifact. */
  async getMapCsv(jobId: string): Promise<string> {
    const resp = await this.fetchFn(`${this.base}/api/jobs/${jobId}/map`);
    if (!resp.ok) await raise(resp);
    return resp.text();
  }

  getClassification(baselineJob: string, variantJob: string):
      Promise<ClassificationResponse> {
    return this.json(
      `/api/classify?baseline=${baselineJob}&variant=${variantJob}`);
  }

  async getClassificationCsv(baselineJob: string, variantJob: string):
      Promise<string> {
    const resp = await this.fetchFn(
      `${this.base}/api/classify?baseline=${baselineJob}&variant=${variantJob}`,
      { headers: { Accept: "text/csv" } });
    if (!resp.ok) await raise(resp);
    return resp.text();
  }
}
