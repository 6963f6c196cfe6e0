import { describe, expect, it } from "vitest";

import {
  CLASSIFICATION_HEADER, COVERAGE_HEADER, columnRange,
  parseClassificationCsv, parseCoverageCsv,
} from "../src/grid.js";
import { fixture } from "./helpers/fake.js";

describe("parseCoverageCsv", () => {
  it("parses a captured service artifact", () => {
    const grid = parseCoverageCsv(fixture("baseline_rev1.csv"));
    expect(grid.cells).toHaveLength(20);
    expect(grid.shape.xs).toEqual([-2, -1, 0, 1, 2]);
    expect(grid.shape.ys).toEqual([3, 4, 5, 6]);
    expect(grid.shape.step_m).toBe(1);
    // row-major over (y, x), as served
    expect(grid.cells[0]).toMatchObject({ x_m: -2, y_m: 3 });
    expect(grid.cells[5]).toMatchObject({ x_m: -2, y_m: 4 });
  });

  it("maps empty fields to null", () => {
    const csv = [
      COVERAGE_HEADER,
      "0.000000,0.000000,1.000000,-150.000000,,,,OUT_OF_COVERAGE",
      "1.000000,0.000000,1.000000,-130.000000,-88.5,10.500000,10.500000,COVERED",
    ].join("\n") + "\n";
    const grid = parseCoverageCsv(csv);
    expect(grid.cells[0].p_tx_dbm).toBeNull();
    expect(grid.cells[0].p_target_dbm).toBeNull();
    expect(grid.cells[0].ue_ris_power_db).toBeNull();
    expect(grid.cells[0].status).toBe("OUT_OF_COVERAGE");
    expect(grid.cells[1].p_tx_dbm).toBe(10.5);
  });

  it("rejects a wrong header", () => {
    expect(() => parseCoverageCsv("x,y\n1,2\n")).toThrow(/unexpected CSV header/);
  });

  it("rejects an empty document", () => {
    expect(() => parseCoverageCsv(COVERAGE_HEADER + "\n")).toThrow(/no cells/);
  });

  it("computes per-column ranges over finite values only", () => {
    const csv = [
      COVERAGE_HEADER,
      "0.000000,0.000000,1.000000,-150.000000,,,,OUT_OF_COVERAGE",
      "1.000000,0.000000,1.000000,-130.000000,,10.000000,10.000000,COVERED",
      "2.000000,0.000000,1.000000,-120.000000,,0.000000,0.000000,COVERED_MIN_POWER",
    ].join("\n") + "\n";
    const grid = parseCoverageCsv(csv);
    expect(columnRange(grid, "gain_db")).toEqual({ min: -150, max: -120 });
    expect(columnRange(grid, "p_tx_dbm")).toEqual({ min: 0, max: 10 });
    expect(columnRange(grid, "ue_ris_power_db")).toBeNull();
  });
});

describe("parseClassificationCsv", () => {
  it("parses a captured artifact with all three categories", () => {
    const grid = parseClassificationCsv(fixture("classification_rev1.csv"));
    expect(grid.cells).toHaveLength(20);
    const categories = new Set(grid.cells.map((c) => c.category));
    expect(categories).toEqual(new Set([
      "NO_CHANGE", "REDUCED_EXPOSURE", "EXTENDED_COVERAGE",
    ]));
    for (const cell of grid.cells) {
      if (cell.category === "REDUCED_EXPOSURE") {
        expect(cell.reduction_db).toBeGreaterThan(0);
      } else {
        expect(cell.reduction_db).toBeNull();
      }
    }
  });

  it("rejects a coverage CSV", () => {
    expect(() => parseClassificationCsv(fixture("baseline_rev1.csv")))
      .toThrow(/unexpected CSV header/);
  });

  it("round-trips the header constant", () => {
    const csv = CLASSIFICATION_HEADER
      + "\n0.000000,1.000000,1.000000,NO_CHANGE,\n";
    const grid = parseClassificationCsv(csv);
    expect(grid.cells[0].reduction_db).toBeNull();
  });
});
