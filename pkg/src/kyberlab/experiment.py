"""Sweep engine: run attack+recovery trials over a grid of inequality counts
and record success, accuracy and wall time to CSV.

Per-trial seeds derive from (master seed, variant, count, trial), so any row
can be reproduced in isolation and the CSV content (timing aside) does not
depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import attack, encoding, kem, solver
from .params import KyberParams, Variant, get_params

CSV_HEADER = ["variant", "ineq_count", "trial", "seed", "success",
              "coeff_accuracy", "iterations", "wall_ms"]


@dataclass
class SweepConfig:
    variant: Variant
    counts: Sequence[int]
    repeats: int = 5
    master_seed: int = 0
    workers: int = 1
    out_path: Optional[str] = None

    def __post_init__(self) -> None:
        counts = list(self.counts)
        if not counts or any(c < 0 for c in counts) or counts != sorted(counts):
            raise ValueError("counts must be non-negative and ascending")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass
class ExperimentRecord:
    variant: Variant
    ineq_count: int
    trial: int
    seed: int
    success: bool
    coeff_accuracy: float
    iterations: int
    wall_ms: float

    def row(self) -> list[str]:
        return [self.variant.value, str(self.ineq_count), str(self.trial), str(self.seed),
                "1" if self.success else "0", f"{self.coeff_accuracy:.6f}",
                str(self.iterations), f"{self.wall_ms:.3f}"]


def default_solver_config(params: KyberParams) -> solver.SolverConfig:
    mode = (solver.SolverMode.EXACT if params.unknown_count <= solver.EXACT_MODE_MAX_UNKNOWNS
            else solver.SolverMode.NORMAL_APPROX)
    return solver.SolverConfig(mode=mode)


def derive_trial_seed(master_seed: int, variant: Variant, count: int, trial: int) -> int:
    blob = (b"kyberlab-sweep" + master_seed.to_bytes(8, "big") + variant.value.encode()
            + count.to_bytes(4, "big") + trial.to_bytes(4, "big"))
    return int.from_bytes(encoding.kdf(blob, 8), "big")


def run_trial(variant: Variant, ineq_count: int, seed: int,
              config: Optional[solver.SolverConfig] = None) -> ExperimentRecord:
    """One trial: fresh keypair, collect inequalities, recover, validate.

    Failures are data (success=False), never exceptions.  Wall time covers
    collection and recovery, not key generation.
    """
    params = get_params(variant)
    config = config or default_solver_config(params)
    block = encoding.kdf(b"kyberlab-trial" + seed.to_bytes(8, "big"), 64)
    keypair = kem.kem_keygen(params, block[:32])
    truth = keypair.true_unknowns()

    start = time.perf_counter()
    transcript = attack.collect_inequalities(keypair, ineq_count, block[32:])
    candidate, iterations, _converged, report = solver.recover_key(
        transcript.inequalities, params, config, true_unknowns=truth)
    validated = solver.validate_candidate(keypair.pk, candidate, params)
    if not validated and params.unknown_count <= solver.EXACT_MODE_MAX_UNKNOWNS:
        candidate = solver.disambiguate_candidate(keypair.pk, candidate,
                                                  transcript.inequalities, params)
        validated = solver.validate_candidate(keypair.pk, candidate, params)
    wall_ms = (time.perf_counter() - start) * 1000.0
    accuracy = float(np.mean(candidate.flat() == truth))
    return ExperimentRecord(variant, ineq_count, trial=0, seed=seed,
                            success=validated and accuracy == 1.0,
                            coeff_accuracy=accuracy, iterations=iterations, wall_ms=wall_ms)


def _run_task(args: tuple) -> ExperimentRecord:
    variant_value, count, trial, seed = args
    record = run_trial(Variant(variant_value), count, seed)
    record.trial = trial
    return record


def run_sweep(config: SweepConfig) -> list[ExperimentRecord]:
    """Grid of (count x repeats) trials; results ordered by (count, trial)
    whatever the completion order."""
    tasks = [(config.variant.value, count, trial,
              derive_trial_seed(config.master_seed, config.variant, count, trial))
             for count in config.counts for trial in range(config.repeats)]
    if config.workers <= 1:
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_task, tasks))
    records.sort(key=lambda r: (r.ineq_count, r.trial))
    if config.out_path:
        write_csv(config.out_path, records)
        write_summary(summary_path(config.out_path), records)
    return records


def render_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.row())
    return buf.getvalue()


def write_csv(path, records: Sequence[ExperimentRecord]) -> None:
    Path(path).write_text(render_csv(records), encoding="ascii")


def read_csv(path) -> list[ExperimentRecord]:
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        out = []
        for row in reader:
            out.append(ExperimentRecord(
                Variant(row[0]), int(row[1]), int(row[2]), int(row[3]),
                row[4] == "1", float(row[5]), int(row[6]), float(row[7])))
        return out


def summary_path(out_path) -> str:
    p = Path(out_path)
    return str(p.with_suffix(p.suffix + ".summary.csv") if p.suffix != ".csv"
               else p.with_name(p.stem + ".summary.csv"))


def summarize(records: Sequence[ExperimentRecord]) -> list[dict]:
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for record in records:
        groups.setdefault((record.variant.value, record.ineq_count), []).append(record)
    out = []
    for (variant, count), recs in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        successes = [r for r in recs if r.success]
        out.append({
            "variant": variant,
            "ineq_count": count,
            "trials": len(recs),
            "successes": len(successes),
            "success_rate": len(successes) / len(recs),
            "mean_wall_ms": sum(r.wall_ms for r in recs) / len(recs),
            "median_success_wall_ms": (float(np.median([r.wall_ms for r in successes]))
                                       if successes else float("nan")),
        })
    return out


def write_summary(path, records: Sequence[ExperimentRecord]) -> None:
    rows = summarize(records)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variant", "ineq_count", "trials", "successes", "success_rate",
                         "mean_wall_ms", "median_success_wall_ms"])
        for row in rows:
            writer.writerow([row["variant"], row["ineq_count"], row["trials"], row["successes"],
                             f"{row['success_rate']:.4f}", f"{row['mean_wall_ms']:.3f}",
                             f"{row['median_success_wall_ms']:.3f}"])


def minimum_reliable_count(records: Sequence[ExperimentRecord], threshold: float = 0.8) -> Optional[int]:
    """Smallest inequality count whose success rate reaches the threshold."""
    for row in summarize(records):
        if row["success_rate"] >= threshold:
            return row["ineq_count"]
    return None
