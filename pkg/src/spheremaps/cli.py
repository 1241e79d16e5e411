"""Run one experiment from a JSON manifest or inline flags.

Writes ``<out>.report.json``, ``<out>.summary.csv`` and ``<out>.meta.json``.
Exit status is 0 when no verdict is ``fail``, 1 otherwise, and 2 when the
manifest is invalid.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .analysis import (
    check_concentration,
    check_separation,
    divergence_source,
    divergence_table,
    integral_roundtrip,
    lemma32_sweep,
    mazur_roundtrip,
    modulus_lower_bound,
    random_source,
    run_theorem_1_1,
    run_theorem_1_2,
    staircase_source,
)
from .maps import get_map
from .norms import get_oracle
from .reports import HypothesisViolated, InequalityReport, summary_csv
from .witnesses import (
    EVENS,
    build_growth_set,
    enumerate_interlaced,
    get_partition,
    partition_balance,
    psi_partition_value,
    staircase_profile,
)

EXPERIMENTS = ("partition", "modulus", "separation", "theorem11", "theorem12", "concentration", "roundtrip", "lemma32", "divergence")
SAMPLING = {"modulus", "concentration", "roundtrip", "lemma32"}
WORKERS_ENV = "SPHEREMAPS_WORKERS"

TOLERANCES = {"strict_margin": 1e-9, "step": 1e-12, "tail_zero": 1e-9, "bisection": 1e-12}


class ManifestError(ValueError):
    pass


@dataclass
class Manifest:
    experiment: str
    oracle: str = "l1"
    map: str = "normalize"
    d: int = 1
    eps: float = 0.5
    k_budget: int | None = None
    seed: int | None = None
    out: str = "run"
    options: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, obj: dict) -> Manifest:
        if not isinstance(obj, dict):
            raise ManifestError("manifest must be a JSON object")
        obj = dict(obj)
        if "output" in obj and "out" not in obj:
            obj["out"] = obj.pop("output")
        known = {"experiment", "oracle", "map", "d", "eps", "k_budget", "seed", "out"}
        kw = {k: obj.pop(k) for k in list(obj) if k in known}
        if "experiment" not in kw:
            raise ManifestError("manifest needs an 'experiment'")
        m = cls(**kw, options=obj)
        m.validate()
        return m

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ManifestError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        try:
            self.d = int(self.d)
            self.eps = float(self.eps)
            self.k_budget = None if self.k_budget is None else int(self.k_budget)
            self.seed = None if self.seed is None else int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"bad numeric field: {exc}") from None
        if self.d < 1:
            raise ManifestError("d must be a positive integer")
        if not 0 < self.eps <= 1:
            raise ManifestError("eps must lie in (0, 1]")
        if self.experiment in SAMPLING and self.seed is None:
            raise ManifestError(f"experiment {self.experiment!r} samples at random and needs a seed")
        try:
            self.norm = get_oracle(self.oracle)
            self.sphere_map = get_map(self.map, self.norm) if self.experiment not in ("partition", "lemma32") else None
        except ValueError as exc:
            raise ManifestError(str(exc)) from None


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    """Ordered map over a thread pool; result order never depends on scheduling."""
    n = _workers()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# experiments ---------------------------------------------------------------


def _growth_meta(growth) -> dict:
    return {"a": growth.a, "growth_elements": list(growth.elements), "partition": growth.partition.kind}


def exp_partition(m: Manifest) -> tuple[list[InequalityReport], dict]:
    k_max = m.k_budget or 10**4
    part = get_partition(m.options.get("partition", "greedy"), m.norm, k_max)
    bal = partition_balance(m.norm, part, k_max)
    worst_bal = float(np.max(np.abs(bal)))
    slack = min(psi_partition_value(m.norm, part, k) - 0.5 * (m.norm.psi(k) - 1.0) for k in range(1, k_max + 1))
    ok = worst_bal <= 1.0 + 1e-9 and slack >= -1e-9
    rep = InequalityReport(
        checker="partition",
        inputs={"oracle": m.norm.name, "k": k_max, "partition": part.kind},
        hypothesis_values={"psi_p_slack": slack},
        conclusion_value=worst_bal,
        threshold=1.0,
        margin=1.0 - worst_bal,
        verdict="pass" if ok else "fail",
        details={"P_head": [i for i in range(1, min(k_max, 20) + 1) if part.contains(i)]},
    )
    return [rep], {"partition": part.kind, "a": None, "growth_elements": []}


def exp_modulus(m: Manifest):
    growth = build_growth_set(m.norm, EVENS, m.d, m.eps, count=2 * m.d + 1)
    k = m.k_budget or growth.a ** (2 * m.d - 1) + 1
    t = float(m.options.get("t", 1.0 / m.d))
    F = m.sphere_map
    sources = [staircase_source(growth, m.d, k), divergence_source(k, [t]), random_source(k, t, int(m.options.get("n", 200)), m.seed, F.positive_domain)]
    est = modulus_lower_bound(F, t, sources)
    rep = InequalityReport(
        checker="modulus",
        inputs={"map": F.name, "d": m.d, "k": k, "t": t},
        hypothesis_values={"pairs_tried": est.pairs_tried},
        conclusion_value=est.lower_bound,
        threshold=0.0,
        margin=est.lower_bound,
        verdict="pass",
        details={"source": est.source, "domain_distance": est.domain_distance, "witness_pair": est.witness_pair},
    )
    return [rep], _growth_meta(growth)


def exp_separation(m: Manifest):
    growth = build_growth_set(m.sphere_map.target, EVENS, m.d, m.eps, count=2 * m.d + 1)
    k = m.k_budget or growth.elements[2 * m.d - 1] + 1
    pairs = enumerate_interlaced(growth, m.d, k)
    u = staircase_profile(m.d)
    reps = _pmap(lambda p: check_separation(m.sphere_map, p, u, EVENS, m.eps, on_violation="report"), pairs)
    return reps, _growth_meta(growth)


def exp_theorem11(m: Manifest):
    rep = run_theorem_1_1(m.sphere_map, m.d, m.eps, pipeline=bool(m.options.get("pipeline", False)), k=m.k_budget, seed=m.seed or 0)
    return [rep], {"a": rep.details["a"], "growth_elements": rep.details["elements"], "partition": "evens"}


def exp_theorem12(m: Manifest):
    rep = run_theorem_1_2(m.sphere_map, m.d, m.eps, k=m.k_budget)
    return [rep], {"a": rep.details["a"], "growth_elements": rep.details["elements"], "partition": "evens"}


def exp_concentration(m: Manifest):
    growth = build_growth_set(m.sphere_map.target, EVENS, m.d, m.eps, count=2 * m.d + 2, variant="concentration")
    rep = check_concentration(m.sphere_map, m.d, m.eps, growth, k=m.k_budget, random_pairs=int(m.options.get("n", 200)), seed=m.seed)
    return [rep], _growth_meta(growth)


def exp_roundtrip(m: Manifest):
    ks = [int(k) for k in m.options.get("ks", [2, 8, 64, 128])]
    n = int(m.options.get("n", 1000))
    if m.map.startswith("mazur:"):
        p = float(m.map[6:])
        reps = _pmap(lambda k: mazur_roundtrip(p, k, n, m.seed), ks)
    else:
        reps = _pmap(lambda k: integral_roundtrip(k, n, m.seed), ks)
    return reps, {"a": None, "growth_elements": [], "partition": None}


def exp_lemma32(m: Manifest):
    growth = build_growth_set(m.norm, EVENS, m.d, m.eps, count=2 * m.d + 2)
    rep = lemma32_sweep(m.norm, m.d, m.eps, trials=int(m.options.get("trials", 1000)), seed=m.seed)
    return [rep], _growth_meta(growth)


def exp_divergence(m: Manifest):
    ks = [int(k) for k in m.options.get("ks", [10**2, 10**3, 10**4, 10**5, 10**6])]
    deltas = [float(x) for x in m.options.get("deltas", [0.1, 0.01])]
    rows = _pmap(lambda k: divergence_table(m.sphere_map, [k], deltas), ks)
    return [r for chunk in rows for r in chunk], {"a": None, "growth_elements": [], "partition": None}


RUNNERS = {
    "partition": exp_partition,
    "modulus": exp_modulus,
    "separation": exp_separation,
    "theorem11": exp_theorem11,
    "theorem12": exp_theorem12,
    "concentration": exp_concentration,
    "roundtrip": exp_roundtrip,
    "lemma32": exp_lemma32,
    "divergence": exp_divergence,
}


def _param(rep: InequalityReport) -> Any:
    for key in ("delta", "t", "eps", "trials"):
        if key in rep.inputs:
            return rep.inputs[key]
    return ""


def run(m: Manifest) -> int:
    start = time.perf_counter()
    try:
        reports, growth_meta = RUNNERS[m.experiment](m)
    except HypothesisViolated as exc:
        rep = exc.report or InequalityReport(
            checker=m.experiment,
            inputs={"map": m.map, "d": m.d},
            hypothesis_values={"violated": exc.hypothesis},
            conclusion_value=math.nan,
            threshold=math.nan,
            margin=math.nan,
            verdict="hypothesis_not_met",
        )
        reports, growth_meta = [rep], {"a": None, "growth_elements": [], "partition": None}
    wall = time.perf_counter() - start

    prefix = Path(m.out)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.report.json").write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    rows = [r.summary_row(m.sphere_map.name if m.sphere_map else "", _param(r)) for r in reports]
    with open(f"{prefix}.summary.csv", "w", newline="") as fh:
        fh.write(summary_csv(rows))
    meta = {
        "experiment": m.experiment,
        "oracle": m.oracle,
        "map": m.map,
        "d": m.d,
        "eps": m.eps,
        "k_budget": m.k_budget,
        "seed": m.seed,
        "options": m.options,
        "wall_time_s": wall,
        "tolerances": TOLERANCES,
        "versions": {"spheremaps": __version__, "numpy": np.__version__, "python": platform.python_version()},
        **growth_meta,
    }
    Path(f"{prefix}.meta.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    failed = [r for r in reports if r.verdict == "fail"]
    for r in reports:
        print(f"{r.checker}: {r.verdict} (conclusion={r.conclusion_value!r}, threshold={r.threshold!r})")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spheremaps", description=__doc__.splitlines()[0])
    ap.add_argument("--manifest", type=Path, help="JSON manifest; inline flags override its fields")
    ap.add_argument("--experiment", choices=EXPERIMENTS)
    ap.add_argument("--oracle")
    ap.add_argument("--map")
    ap.add_argument("--d", type=int)
    ap.add_argument("--eps", type=float)
    ap.add_argument("--k-budget", type=int, dest="k_budget")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    obj: dict[str, Any] = {}
    try:
        if args.manifest is not None:
            try:
                obj = json.loads(args.manifest.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ManifestError(f"cannot read manifest: {exc}") from None
            if not isinstance(obj, dict):
                raise ManifestError("manifest must be a JSON object")
        for key in ("experiment", "oracle", "map", "d", "eps", "k_budget", "seed", "out"):
            val = getattr(args, key)
            if val is not None:
                obj[key] = val
        manifest = Manifest.from_dict(obj)
    except (ManifestError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
