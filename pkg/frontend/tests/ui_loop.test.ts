/** End-to-end placement loop against a fake service that replays artifacts
 * captured from the real backend: load scene -> compute baseline ->
 * compute with the panel -> classification overlay -> move the panel.
 *
 * This drives the same client stack the browser entry point wires together
 * (Api + PlacementSession + CSV parsing + overlay building), minus the
 * canvas.
 */
import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";
import { parseClassificationCsv, parseCoverageCsv } from "../src/grid.js";
import { buildClassificationOverlay, buildCoverageOverlay } from "../src/overlay.js";
import { PlacementSession } from "../src/state.js";
import { fixture, fixtureService } from "./helpers/fake.js";

async function computeVariant(api: Api, session: PlacementSession,
                              variant: "baseline" | "with_ris") {
  const ref = await api.startCompute(session.currentSceneId!, variant);
  const job = await api.waitForJob(ref.job_id, undefined, 0);
  session.recordJob({ jobId: job.job_id, revision: job.revision, variant,
                      state: job.state, progress: job.progress });
  expect(job.state).toBe("done");
  const csv = await api.getMapCsv(job.job_id);
  return { job, csv };
}

describe("placement workbench loop", () => {
  it("runs load -> compute -> classify -> move with exact served values",
     async () => {
    const service = fixtureService();
    const api = new Api("", service.fetch);
    const session = new PlacementSession();

    // load the scene
    const ref = await api.createScene(fixture("scene.json"));
    session.setScene(ref.scene_id, ref.revision);
    expect(session.currentRevision).toBe(1);

    // baseline map: overlay values are the served CSV values, cell for cell
    const baseline = await computeVariant(api, session, "baseline");
    expect(baseline.csv).toBe(fixture("baseline_rev1.csv"));
    const baselineGrid = parseCoverageCsv(baseline.csv);
    const servedRows = baseline.csv.trim().split("\n").slice(1)
      .map((line) => line.split(","));
    const overlay = buildCoverageOverlay(baselineGrid, "gain_db");
    const overlayState = session.addOverlay(
      "coverage", baseline.job.revision, [baseline.job.job_id], "baseline");
    overlay.cells.forEach((cell, i) => {
      expect(cell.value).toBe(Number(servedRows[i][3]));
      expect(cell.x_m).toBe(Number(servedRows[i][0]));
      expect(cell.y_m).toBe(Number(servedRows[i][1]));
    });

    // with-RIS map at the same revision
    const withRis = await computeVariant(api, session, "with_ris");
    expect(withRis.csv).toBe(fixture("with_ris_rev1.csv"));

    // classification overlay: three categories, values straight off the CSV
    const baseJob = session.findJob("baseline")!;
    const risJob = session.findJob("with_ris")!;
    const classCsv = await api.getClassificationCsv(baseJob.jobId, risJob.jobId);
    expect(classCsv).toBe(fixture("classification_rev1.csv"));
    const classGrid = parseClassificationCsv(classCsv);
    const classOverlay = buildClassificationOverlay(classGrid);
    expect(classOverlay.legend).toEqual({
      kind: "categorical",
      categories: ["EXTENDED_COVERAGE", "NO_CHANGE", "REDUCED_EXPOSURE"],
    });
    classGrid.cells.forEach((cell, i) => {
      expect(classOverlay.cells[i].value).toBe(cell.reduction_db);
    });
    const classState = session.addOverlay(
      "classification", session.currentRevision,
      [baseJob.jobId, risJob.jobId], "classification");
    session.pin(classState.id);            // keep as comparison snapshot

    const summary = await api.getClassification(baseJob.jobId, risJob.jobId);
    expect(summary.summary.category_counts).toEqual({
      NO_CHANGE: 13, REDUCED_EXPOSURE: 4, EXTENDED_COVERAGE: 3,
    });
    expect(summary.summary.max_reduction_db).toBeGreaterThan(0);

    // move the panel: revision bumps, unpinned overlays go stale
    const moved = JSON.parse(fixture("moved_ris.json"));
    const updated = await api.updateRis(session.currentSceneId!, moved);
    expect(updated.revision).toBe(2);
    session.setRevision(updated.revision);
    expect(session.isStale(overlayState.id)).toBe(true);
    expect(session.isStale(classState.id)).toBe(false);   // pinned snapshot
    expect(session.staleOverlayIds()).toEqual([overlayState.id]);

    // recompute at the new placement: a different map, fresh overlay
    const withRis2 = await computeVariant(api, session, "with_ris");
    expect(withRis2.csv).toBe(fixture("with_ris_rev2.csv"));
    expect(withRis2.csv).not.toBe(withRis.csv);
    const fresh = session.addOverlay(
      "coverage", withRis2.job.revision, [withRis2.job.job_id], "with_ris");
    expect(session.isStale(fresh.id)).toBe(false);

    // mixing revisions in a classification is refused by the service
    const error = await api
      .getClassificationCsv(baseJob.jobId, withRis2.job.job_id)
      .catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(422);
    expect(error.code).toBe("REVISION_MISMATCH");
  });
});
