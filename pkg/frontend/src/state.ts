/** Single-session store for the placement workbench.
 *
 * All UI state changes flow through this object so concurrent poll
 * responses cannot interleave inconsistently.  The core rule it enforces:
 * an overlay belongs to the scene revision it was computed from, and the
 * moment the RIS moves (revision bump) every unpinned overlay is stale.
 */
import type { Variant } from "./api.js";

export type OverlayKind = "coverage" | "classification";

export interface OverlayState {
  id: string;                 // local identifier
  kind: OverlayKind;
  revision: number;           // scene revision the data was computed from
  jobIds: string[];           // one job (coverage) or [baseline, variant]
  label: string;
  pinned: boolean;
}

export interface JobRecord {
  jobId: string;
  revision: number;
  variant: Variant;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
}

export interface SessionSnapshot {
  sceneId: string | null;
  revision: number;
  jobs: JobRecord[];
  overlays: OverlayState[];
  selectedOverlay: string | null;
}

type Listener = (snapshot: SessionSnapshot) => void;

export class PlacementSession {
  private sceneId: string | null = null;
  private revision = 0;
  private jobs = new Map<string, JobRecord>();        // by jobId
  private overlays = new Map<string, OverlayState>();
  private selectedOverlay: string | null = null;
  private listeners: Listener[] = [];
  private nextOverlay = 1;

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snapshot = this.snapshot();
    for (const listener of this.listeners) listener(snapshot);
  }

  snapshot(): SessionSnapshot {
    return {
      sceneId: this.sceneId,
      revision: this.revision,
      jobs: [...this.jobs.values()],
      overlays: [...this.overlays.values()],
      selectedOverlay: this.selectedOverlay,
    };
  }

  setScene(sceneId: string, revision: number): void {
    this.sceneId = sceneId;
    this.revision = revision;
    this.jobs.clear();
    this.overlays.clear();
    this.selectedOverlay = null;
    this.emit();
  }

  /** Called after a successful RIS update: unpinned overlays go stale. */
  setRevision(revision: number): void {
    this.revision = revision;
    this.emit();
  }

  get currentRevision(): number {
    return this.revision;
  }

  get currentSceneId(): string | null {
    return this.sceneId;
  }

  recordJob(job: JobRecord): void {
    this.jobs.set(job.jobId, job);
    this.emit();
  }

  /** The finished job for a variant at the current revision, if any. */
  findJob(variant: Variant, revision = this.revision): JobRecord | null {
    for (const job of this.jobs.values()) {
      if (job.variant === variant && job.revision === revision &&
          job.state === "done") {
        return job;
      }
    }
    return null;
  }

  addOverlay(kind: OverlayKind, revision: number, jobIds: string[],
             label: string): OverlayState {
    const overlay: OverlayState = {
      id: `o${this.nextOverlay++}`,
      kind,
      revision,
      jobIds,
      label,
      pinned: false,
    };
    this.overlays.set(overlay.id, overlay);
    this.selectedOverlay = overlay.id;
    this.emit();
    return overlay;
  }

  select(overlayId: string | null): void {
    if (overlayId !== null && !this.overlays.has(overlayId)) {
      throw new Error(`unknown overlay ${overlayId}`);
    }
    this.selectedOverlay = overlayId;
    this.emit();
  }

  /** Pinned snapshots stay comparable after the placement moves on. */
  pin(overlayId: string, pinned = true): void {
    const overlay = this.overlays.get(overlayId);
    if (!overlay) throw new Error(`unknown overlay ${overlayId}`);
    overlay.pinned = pinned;
    this.emit();
  }

  /** An overlay renders greyed out once its revision is superseded,
   * unless the planner pinned it as a comparison snapshot. */
  isStale(overlayId: string): boolean {
    const overlay = this.overlays.get(overlayId);
    if (!overlay) throw new Error(`unknown overlay ${overlayId}`);
    return !overlay.pinned && overlay.revision !== this.revision;
  }

  staleOverlayIds(): string[] {
    return [...this.overlays.keys()].filter((id) => this.isStale(id));
  }
}
