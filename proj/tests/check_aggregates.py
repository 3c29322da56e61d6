#!/usr/bin/env python3
"""Runs a small Monte Carlo sweep through the CLI and recomputes the cell
aggregates from the CSV, comparing them with the summary JSON."""

import csv
import json
import math
import subprocess
import sys
import tempfile
from collections import OrderedDict
from pathlib import Path

TOL = 1e-9


def percentile(values, q):
    v = sorted(values)
    pos = q * (len(v) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (pos - lo) * (v[hi] - v[lo])


def aggregate(rows):
    cells = OrderedDict()
    for r in rows:
        key = (int(r["vehicles"]), int(r["pickups"]), float(r["delta"]))
        cells.setdefault(key, []).append(r)
    out = []
    for (n, p, d), group in cells.items():
        good = [r for r in group if r["usable"] == "1" and r["feasible"] == "1"]
        probed = [r for r in group if int(r["t_delta"]) >= 0]
        planned = [float(r["planned_error"]) for r in good]
        cell = {
            "vehicles": n,
            "pickups": p,
            "delta": d,
            "trials": len(group),
            "usable": len(good),
            "feasible": sum(r["feasible"] == "1" for r in group),
            "t_delta_zero_fraction": (sum(int(r["t_delta"]) == 0 for r in probed) / len(probed)) if probed else 0.0,
        }
        if good:
            k = len(good)
            cell.update(
                mean_planned_error=sum(planned) / k,
                median_planned_error=percentile(planned, 0.5),
                p25_planned_error=percentile(planned, 0.25),
                p75_planned_error=percentile(planned, 0.75),
                mean_actuated_error=sum(float(r["actuated_error"]) for r in good) / k,
                mean_optimal_cost=sum(float(r["optimal_cost"]) for r in good) / k,
                mean_planned_cost=sum(float(r["planned_cost"]) for r in good) / k,
            )
        out.append(cell)
    return out


def main():
    cli = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = Path(tmp) / "trials.csv"
        json_path = Path(tmp) / "summary.json"
        cmd = [cli, "montecarlo", "--vehicles", "2,3", "--pickups", "2,3", "--trials", "4",
               "--iterations", "60", "--probe-every", "20", "--workers", "2",
               "--out", str(csv_path), "--summary", str(json_path)]
        subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)
        with open(csv_path, newline="") as f:
            rows = list(csv.DictReader(f))
        summary = json.loads(json_path.read_text())

    mine = aggregate(rows)
    if len(rows) != 16 or len(mine) != len(summary):
        print(f"FAIL: {len(rows)} rows, {len(mine)} recomputed cells, {len(summary)} exported cells")
        return 1
    bad = 0
    for a, b in zip(mine, summary):
        for key, value in a.items():
            other = b[key]
            if isinstance(value, float):
                ok = abs(value - other) <= TOL * max(1.0, abs(value))
            else:
                ok = value == other
            if not ok:
                bad += 1
                print(f"mismatch in cell N={a['vehicles']} P={a['pickups']}: {key} {value} vs {other}")
    print(f"{len(mine)} cells, {len(rows)} trials, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
