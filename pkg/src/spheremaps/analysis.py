"""Inequality checkers: separation, modulus lower bounds and concentration.

Every checker re-verifies its hypotheses on the vectors it actually uses and
returns an ``InequalityReport``. A verdict of ``hypothesis_not_met`` means
the inequality was not in force for those vectors, never that it held.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .maps import (
    EXACT_SYMMETRIZE_MAX_K,
    SphereMap,
    abs_wrapper,
    integral_homeo,
    integral_homeo_inverse,
    mazur_inverse,
    mazur_map,
    symmetrize,
)
from .norms import L2, NormOracle
from .reports import HypothesisViolated, InequalityReport, ModulusEstimate
from .vectors import PcpVector, Vector, as_dense, from_blocks, same_support, sup_distance, to_dense
from .witnesses import (
    EVENS,
    BadTuple,
    GrowthSet,
    InterlacedPair,
    Partition,
    Profile,
    TwoSegmentPath,
    build_growth_set,
    check_assumption_a,
    divergence_x,
    enumerate_interlaced,
    find_tail_zero,
    read_coord,
    staircase_profile,
    staircase_z,
    unit_vector,
    witness_x,
)

STRICT_MARGIN = 1e-9

PairSource = tuple[str, Iterable[tuple[Vector, Vector]]]


def difference(u: Vector, v: Vector) -> Vector:
    if isinstance(u, PcpVector) and isinstance(v, PcpVector):
        return u - v
    return to_dense(u) - to_dense(v)


def image_distance(F: SphereMap, x: Vector, y: Vector) -> float:
    return F.target.eval(difference(F(x), F(y)))


# pair sources --------------------------------------------------------------


def staircase_source(growth: GrowthSet, d: int, k: int) -> PairSource:
    """Every interlaced staircase pair ``(z(m), z(n))`` below ``k``."""

    def gen():
        for pair in enumerate_interlaced(growth, d, k, exhaustive=True):
            yield staircase_z(pair.m, k), staircase_z(pair.n, k)

    return "staircase", gen()


def divergence_source(k: int, deltas: Sequence[float]) -> PairSource:
    return "divergence", ((unit_vector(k), divergence_x(k, dl)) for dl in deltas)


def random_step_pairs(k: int, t: float, n: int, seed: int, positive: bool = False, max_pieces: int = 6) -> Iterator[tuple[PcpVector, PcpVector]]:
    """Seeded random pairs of few-segment sphere points at sup distance at most ``t``.

    Works at any dimension since both points are built segment by segment.
    """
    rng = np.random.default_rng(seed)
    lo = 0.0 if positive else -1.0
    for _ in range(n):
        n_cuts = int(rng.integers(0, min(max_pieces, k)))
        cuts = sorted({int(c) for c in rng.integers(1, k, size=n_cuts)}) if k > 1 else []
        bounds = [0, *cuts, k]
        pieces = len(bounds) - 1
        xe = rng.uniform(lo, 1.0, size=pieces)
        split = rng.random(pieces) < 0.3
        xo = np.where(split, rng.uniform(lo, 1.0, size=pieces), xe)
        peak = int(rng.integers(pieces))
        sign = 1.0 if positive or rng.random() < 0.5 else -1.0
        xe[peak] = xo[peak] = sign
        ye = np.clip(xe + rng.uniform(-t, t, size=pieces), lo, 1.0)
        yo = np.where(split, np.clip(xo + rng.uniform(-t, t, size=pieces), lo, 1.0), ye)
        ye[peak] = yo[peak] = sign
        x = from_blocks(k, [(bounds[s], bounds[s + 1], xe[s], xo[s]) for s in range(pieces)])
        y = from_blocks(k, [(bounds[s], bounds[s + 1], ye[s], yo[s]) for s in range(pieces)])
        yield x, y


def random_source(k: int, t: float, n: int, seed: int, positive: bool = False) -> PairSource:
    return f"random(seed={seed})", random_step_pairs(k, t, n, seed, positive)


def modulus_lower_bound(F: SphereMap, t: float, pair_sources: Sequence[PairSource], tol: float = 1e-12) -> ModulusEstimate:
    """Largest image distance over the supplied pairs at domain distance ``<= t``.

    This is a lower bound on ``omega_F(t)`` and nothing more. Pairs that fall
    outside ``F``'s domain are skipped.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    best, best_pair, best_dom, best_src, tried = 0.0, None, 0.0, "", 0
    for name, pairs in pair_sources:
        for x, y in pairs:
            dom = F.domain.eval(difference(x, y))
            if dom > t + tol:
                continue
            try:
                dist = image_distance(F, x, y)
            except ValueError:
                continue
            tried += 1
            if dist > best:
                best, best_pair, best_dom, best_src = dist, (x, y), dom, name
    return ModulusEstimate(F.name, t, best, best_pair, tried, best_dom, best_src)


# interlacing implications -----------------------------------------------


def _lambda_vector(k: int, spans: Sequence[tuple[int, int]], lambdas: Sequence[float], partition: Partition, q: str | None) -> Vector:
    blocks = []
    for (lo, hi), lam in zip(spans, lambdas):
        if hi <= lo:
            continue
        cp = lam if q in (None, "P") else 0.0
        cpc = lam if q in (None, "Pc") else 0.0
        blocks.append((lo, hi, cp, cpc))
    return partition.blocks_vector(k, blocks)


def _check_interlaced(m: Sequence[int], n: Sequence[int]) -> None:
    if len(m) != len(n) or not m:
        raise BadTuple("m and n must be non-empty and of equal length")
    seq = [v for pair in zip(m, n) for v in pair]
    if seq[0] < 1 or any(b <= a for a, b in zip(seq, seq[1:])):
        raise BadTuple(f"m={tuple(m)} and n={tuple(n)} are not interlaced")


def lemma32_values(oracle: NormOracle, partition: Partition, m: Sequence[int], n: Sequence[int], lambdas: Sequence[float], q: str) -> dict[str, float]:
    """Premises and conclusions of both implications for one choice of ``lambda`` and ``Q``."""
    _check_interlaced(m, n)
    d = len(m)
    k = n[-1]
    mb, nb = (0, *m), (0, *n)
    return {
        "premise_n": oracle.eval(_lambda_vector(k, [(nb[s], nb[s + 1]) for s in range(d)], lambdas, partition, q)),
        "conclusion_n": oracle.eval(_lambda_vector(k, [(nb[s], mb[s + 1]) for s in range(d)], lambdas, partition, None)),
        "premise_m": oracle.eval(_lambda_vector(k, [(mb[s], mb[s + 1]) for s in range(d)], lambdas, partition, q)),
        "conclusion_m": oracle.eval(_lambda_vector(k, [(mb[s], nb[s]) for s in range(d)], lambdas, partition, None)),
    }


def check_lemma32(
    oracle: NormOracle,
    partition: Partition,
    growth: GrowthSet,
    m: Sequence[int],
    n: Sequence[int],
    lambdas: Sequence[float],
    q: str,
    eps: float | None = None,
    premise_tol: float = 1e-12,
) -> InequalityReport:
    """Both implications: a premise at most 1 forces its conclusion to be at most ``eps/4``.

    ``q`` selects ``Q`` as ``"P"`` or ``"Pc"``.
    """
    if q not in ("P", "Pc"):
        raise ValueError("q must be 'P' or 'Pc'")
    members = set(growth.elements)
    if not set(m) <= members or not set(n) <= members:
        raise BadTuple("tuples must be drawn from the growth set")
    if len(lambdas) != len(m):
        raise BadTuple("need one lambda per block")
    eps = growth.eps if eps is None else eps
    vals = lemma32_values(oracle, partition, m, n, lambdas, q)
    threshold = eps / 4.0
    active = [c for p, c in (("premise_n", "conclusion_n"), ("premise_m", "conclusion_m")) if vals[p] <= 1.0 + premise_tol]
    worst = max((vals[c] for c in active), default=0.0)
    if not active:
        verdict = "hypothesis_not_met"
    else:
        verdict = "pass" if worst <= threshold + STRICT_MARGIN else "fail"
    return InequalityReport(
        checker="lemma32",
        inputs={"oracle": oracle.name, "d": len(m), "k": n[-1], "m": list(m), "n": list(n), "lambdas": list(lambdas), "Q": q, "eps": eps},
        hypothesis_values={"premise_n": vals["premise_n"], "premise_m": vals["premise_m"]},
        conclusion_value=worst,
        threshold=threshold,
        margin=threshold - worst,
        verdict=verdict,
        details={"conclusion_n": vals["conclusion_n"], "conclusion_m": vals["conclusion_m"], "active": active},
    )


def lemma32_sweep(
    oracle: NormOracle, d: int, eps: float, trials: int = 1000, seed: int = 0, partition: Partition = EVENS
) -> InequalityReport:
    """Random admissible ``lambda`` (scaled so both premises are at most 1) over interlaced pairs."""
    growth = build_growth_set(oracle, partition, d, eps, count=2 * d + 2)
    pairs = enumerate_interlaced(growth, d, growth.elements[-1] + 1, exhaustive=True)
    rng = np.random.default_rng(seed)
    worst, failures, first_bad = -math.inf, 0, None
    for t in range(trials):
        pair = pairs[t % len(pairs)]
        q = "P" if rng.random() < 0.5 else "Pc"
        lam = rng.normal(size=d) * rng.choice([1e-3, 1.0, 1e3])
        vals = lemma32_values(oracle, partition, pair.m, pair.n, lam, q)
        scale = max(vals["premise_n"], vals["premise_m"])
        if scale > 0:
            lam = lam / scale
        rep = check_lemma32(oracle, partition, growth, pair.m, pair.n, lam.tolist(), q, eps)
        worst = max(worst, rep.conclusion_value)
        if rep.verdict == "fail":
            failures += 1
            if first_bad is None:
                first_bad = rep.to_dict()
    threshold = eps / 4.0
    return InequalityReport(
        checker="lemma32_sweep",
        inputs={"oracle": oracle.name, "d": d, "eps": eps, "trials": trials, "seed": seed, "k": growth.elements[-1] + 1},
        hypothesis_values={"a": growth.a, "pairs": len(pairs)},
        conclusion_value=worst,
        threshold=threshold,
        margin=threshold - worst,
        verdict="pass" if failures == 0 else "fail",
        details={"failures": failures, "first_failure": first_bad},
    )


# readouts ----------------------------------------------------------------


def _parity_name(partition: Partition, in_p: bool) -> str:
    p_is_even = partition.kind == "evens"
    return "even" if p_is_even == in_p else "odd"


def class_values(img: Vector, lo: int, hi: int, partition: Partition, in_p: bool | None) -> tuple[float, float, float] | None:
    """``(first value, min, max)`` of ``img`` over ``(lo, hi]`` intersected with a class.

    ``in_p=None`` means both classes. Returns ``None`` for an empty set.
    """
    if hi <= lo:
        return None
    if isinstance(img, PcpVector) and (partition.is_parity or in_p is None):
        parity = None if in_p is None else _parity_name(partition, in_p)
        vals = img.values_on(lo + 1, hi, parity)
        if not vals:
            return None
        first = img.coord(lo + 1) if in_p is None else read_coord(img, partition.first_member(lo, hi, in_p))
        return first, min(vals), max(vals)
    dense = to_dense(img)[lo:hi]
    if in_p is not None:
        dense = dense[partition.mask(hi)[lo:hi] == in_p]
    if dense.size == 0:
        return None
    return float(dense[0]), float(dense.min()), float(dense.max())


def readouts(img: Vector, p: Sequence[int], k: int, partition: Partition) -> dict:
    """Per-block class values of ``img`` for the tuple ``p``, plus the tail and the worst spread."""
    bounds = (0, *p)
    alpha, beta, spread = [], [], 0.0
    for s in range(len(p)):
        for in_p, out in ((True, alpha), (False, beta)):
            cv = class_values(img, bounds[s], bounds[s + 1], partition, in_p)
            out.append(None if cv is None else cv[0])
            if cv is not None:
                spread = max(spread, cv[2] - cv[1])
    tail = class_values(img, p[-1], k, partition, None)
    if tail is not None:
        spread = max(spread, tail[2] - tail[1])
    return {
        "alpha": alpha,
        "beta": beta,
        "gamma": None if tail is None else tail[0],
        "tail_max_abs": 0.0 if tail is None else max(abs(tail[1]), abs(tail[2])),
        "spread": spread,
    }


def _class_sum_norm(oracle: NormOracle, k: int, spans, coefs, partition: Partition, in_p: bool) -> float:
    blocks = []
    for (lo, hi), c in zip(spans, coefs):
        if hi > lo and c is not None:
            blocks.append((lo, hi, c, 0.0) if in_p else (lo, hi, 0.0, c))
    if not blocks:
        return 0.0
    return oracle.eval(partition.blocks_vector(k, blocks))


# separation -----------------------------------------------------------------


def check_separation(
    F: SphereMap,
    pair: InterlacedPair,
    u: Profile,
    partition: Partition = EVENS,
    eps: float = 0.5,
    step_tol: float = 1e-12,
    tail_tol: float = 1e-9,
    on_violation: str = "raise",
) -> InequalityReport:
    """``||F(x(m,u,k)) - F(x(n,u,k))|| > 1 - eps`` with every hypothesis re-checked.

    Hypotheses: ``F`` is constant on each class block and on the tail of both
    witnesses, ``F`` vanishes on the tail ``(m_d, k]`` of ``x(m,u,k)``, and the
    tuple elements satisfy the (d, eps) growth assumption.
    """
    if on_violation not in ("raise", "report"):
        raise ValueError("on_violation must be 'raise' or 'report'")
    k, d = pair.k, pair.d
    x_m = witness_x(pair.m, u, k, partition)
    x_n = witness_x(pair.n, u, k, partition)
    img_m, img_n = F(x_m), F(x_n)
    r_m = readouts(img_m, pair.m, k, partition)
    r_n = readouts(img_n, pair.n, k, partition)
    oracle = F.target

    used = sorted(set(pair.m) | set(pair.n))
    assumption = check_assumption_a(GrowthSet(oracle, partition, d, eps, tuple(used)))
    hyp = {
        "step_spread": max(r_m["spread"], r_n["spread"]),
        "tail_max_abs": r_m["tail_max_abs"],
        "growth_assumption": assumption.passed,
    }
    failed = []
    if hyp["step_spread"] > step_tol:
        failed.append("step_preserving")
    if hyp["tail_max_abs"] > tail_tol:
        failed.append("tail_zero")
    if not assumption.passed:
        failed.append("growth_assumption")

    mb, nb = (0, *pair.m), (0, *pair.n)
    lower = [(mb[s], nb[s]) for s in range(d)]
    upper = [(nb[s], mb[s + 1]) for s in range(d)]
    items = {
        "i": _class_sum_norm(oracle, k, lower, r_m["alpha"], partition, True),
        "ii": _class_sum_norm(oracle, k, lower, r_m["beta"], partition, False),
        "iii": _class_sum_norm(oracle, k, upper, r_n["alpha"], partition, True),
        "iv": _class_sum_norm(oracle, k, upper, r_n["beta"], partition, False),
    }
    dist = oracle.eval(difference(img_m, img_n))
    threshold = 1.0 - eps
    margin = dist - threshold
    if failed:
        verdict = "hypothesis_not_met"
    else:
        verdict = "pass" if margin > STRICT_MARGIN else "fail"
    report = InequalityReport(
        checker="separation",
        inputs={"map": F.name, "d": d, "k": k, "m": list(pair.m), "n": list(pair.n), "u": u.to_json(), "eps": eps, "partition": partition.kind},
        hypothesis_values=hyp,
        conclusion_value=dist,
        threshold=threshold,
        margin=margin,
        verdict=verdict,
        block_readouts={
            "alpha_m": r_m["alpha"],
            "beta_m": r_m["beta"],
            "gamma_m": r_m["gamma"],
            "alpha_n": r_n["alpha"],
            "beta_n": r_n["beta"],
            "gamma_n": r_n["gamma"],
        },
        details={
            "items": items,
            "items_bound": eps / 4.0,
            "domain_distance": sup_distance(x_m, x_n),
            "domain_bound": u.step_bound(),
            "failed_hypotheses": failed,
            "growth_assumption": assumption.to_dict(),
        },
    )
    if failed and on_violation == "raise":
        raise HypothesisViolated(", ".join(failed), report)
    return report


# staircase separation --------------------------------------------------


def theorem11_map(F: SphereMap, k: int, n_perms: int = 64, seed: int = 0) -> SphereMap:
    """Route through absolute value, then symmetrize (exact when ``k`` is small)."""
    G = abs_wrapper(F)
    if k <= EXACT_SYMMETRIZE_MAX_K:
        return symmetrize(G, "exact")
    return symmetrize(G, "sampled", n=n_perms, seed=seed)


def run_theorem_1_1(
    F: SphereMap | Callable[[int], SphereMap],
    d: int,
    eps: float = 0.5,
    pipeline: bool = False,
    k: int | None = None,
    seed: int = 0,
) -> InequalityReport:
    """Staircase pairs from the closed-form growth set at ``k = a^(2d-1) + 1``.

    Asserts image distance at least 1/2 and strictly above ``1 - eps`` while
    the domain distance is ``1/d``. ``F`` may be a map or a factory taking ``k``.
    """
    G0 = F if isinstance(F, SphereMap) else None
    oracle = G0.target if G0 is not None else F(1).target
    growth = build_growth_set(oracle, EVENS, d, eps, count=2 * d + 1)
    k = growth.a ** (2 * d - 1) + 1 if k is None else k
    G = G0 if G0 is not None else F(k)
    if pipeline:
        G = theorem11_map(G, k, seed=seed)
    pairs = enumerate_interlaced(growth, d, k, exhaustive=True)
    rows, support_ok, step_ok = [], True, True
    for pair in pairs:
        z_m, z_n = staircase_z(pair.m, k), staircase_z(pair.n, k)
        img_m, img_n = G(z_m), G(z_n)
        support_ok &= same_support(z_m, img_m) and same_support(z_n, img_n)
        spread = max(readouts(img_m, pair.m, k, EVENS)["spread"], readouts(img_n, pair.n, k, EVENS)["spread"])
        step_ok &= spread <= 1e-12
        rows.append(
            {
                "m": list(pair.m),
                "n": list(pair.n),
                "domain_distance": sup_distance(z_m, z_n),
                "image_distance": G.target.eval(difference(img_m, img_n)),
            }
        )
    worst = min(r["image_distance"] for r in rows)
    dom_ok = all(abs(r["domain_distance"] - 1.0 / d) <= 1e-15 for r in rows)
    strict = worst - (1.0 - eps)
    ok = worst >= 0.5 and strict > STRICT_MARGIN and dom_ok
    if ok:
        verdict = "pass"
    elif not support_ok or not step_ok:
        # the staircase pair is only promised to witness the bound for step and support preserving maps
        verdict = "hypothesis_not_met"
    else:
        verdict = "fail"
    return InequalityReport(
        checker="theorem_1_1",
        inputs={"map": G.name, "d": d, "k": k, "eps": eps, "pipeline": pipeline},
        hypothesis_values={"support_preserving": support_ok, "step_preserving": step_ok, "domain_distance_is_1/d": dom_ok},
        conclusion_value=worst,
        threshold=0.5,
        margin=worst - 0.5,
        verdict=verdict,
        details={"a": growth.a, "elements": list(growth.elements), "pairs": rows, "margin_over_1_minus_eps": strict},
    )


# path root separation --------------------------------------------------


def run_theorem_1_2(
    F: SphereMap,
    d: int,
    eps: float = 0.5,
    partition: Partition = EVENS,
    k: int | None = None,
    start: int = 1,
    tol: float = 1e-12,
) -> InequalityReport:
    """Path root on ``m``, then separation against the same profile on ``n``.

    ``start`` is the 0-based growth index of ``m_1``; the default skips
    ``k_1 = 1`` because a one-point first block misses a partition class.
    """
    if F.positive_domain:
        raise HypothesisViolated("map must be defined on the whole sphere")
    growth = build_growth_set(F.target, partition, d, eps, count=start + 2 * d + 1)
    if k is None:
        k = growth.elements[start + 2 * d - 1] + 1
    ones = PcpVector.constant(k, 1.0)
    gap = F.target.eval(difference(F(ones), F(-ones)))
    if gap <= 1e-12:
        raise HypothesisViolated("F(1,...,1) != F(-1,...,-1)")
    pair = enumerate_interlaced(growth, d, k, start=start)[0]
    root = find_tail_zero(F, TwoSegmentPath(pair.m, k, partition), tol=tol)
    sep = check_separation(F, pair, root.profile, partition, eps, on_violation="report")
    x_m = witness_x(pair.m, root.profile, k, partition)
    x_n = witness_x(pair.n, root.profile, k, partition)
    dom = sup_distance(x_m, x_n)
    dist = sep.conclusion_value
    dom_ok = dom <= 1.0 / d + 1e-12
    if sep.verdict == "hypothesis_not_met" or not dom_ok:
        verdict = "hypothesis_not_met"
    else:
        verdict = "pass" if dist >= 0.5 and sep.passed else "fail"
    return InequalityReport(
        checker="theorem_1_2",
        inputs={"map": F.name, "d": d, "k": k, "eps": eps, "m": list(pair.m), "n": list(pair.n), "partition": partition.kind},
        hypothesis_values={"endpoint_gap": gap, "tail_value": root.tail_value, "root_converged": root.converged, "domain_distance": dom},
        conclusion_value=dist,
        threshold=0.5,
        margin=dist - 0.5,
        verdict=verdict,
        block_readouts=sep.block_readouts,
        details={
            "t_root": root.t,
            "sign": root.sign,
            "iterations": root.iterations,
            "profile": root.profile.to_json(),
            "a": growth.a,
            "elements": list(growth.elements),
            "separation": sep.to_dict(),
        },
    )


# concentration --------------------------------------------------------------


def concentration_defaults(growth: GrowthSet, d: int) -> InterlacedPair:
    """``m`` from the even-numbered elements ``k_2, k_4, ...``, ``n`` from ``k_3, k_5, ...``,
    and ``k`` the next even-numbered element after ``n_d``."""
    els = growth.elements
    if len(els) < 2 * d + 2:
        raise BadTuple(f"need {2 * d + 2} growth elements, have {len(els)}")
    return InterlacedPair(tuple(els[1 : 2 * d : 2]), tuple(els[2 : 2 * d + 1 : 2]), els[2 * d + 1])


def check_concentration(
    F: SphereMap,
    d: int,
    eps: float,
    growth: GrowthSet | None = None,
    m: Sequence[int] | None = None,
    k: int | None = None,
    n: Sequence[int] | None = None,
    random_pairs: int = 200,
    seed: int = 0,
    modulus_threshold: float | None = None,
    checker: str = "concentration",
) -> InequalityReport:
    """Two branches.

    A: some pair at domain distance ``<= 1/d`` has image distance above
    ``modulus_threshold`` (default ``eps/8``), so the theorem does not apply
    to ``F``. B: no such pair was found among the searched families and
    ``||F(z(m)) - 1_[1,k]/psi(k)|| <= eps`` is checked.
    """
    oracle = F.target
    if growth is None:
        growth = build_growth_set(oracle, EVENS, d, eps, count=2 * d + 2, variant="concentration")
    if m is None or k is None:
        defaults = concentration_defaults(growth, d)
        m = defaults.m if m is None else tuple(m)
        k = defaults.k if k is None else k
        n = defaults.n if n is None else n
    m = tuple(m)
    threshold_a = eps / 8.0 if modulus_threshold is None else modulus_threshold
    z = staircase_z(m, k)
    img = F(z)
    r = readouts(img, m, k, EVENS)
    lo = min(v for v, _ in img.pieces()) if isinstance(img, PcpVector) else float(np.min(img))
    if lo < -1e-12:
        raise HypothesisViolated("image in the positive facet")
    if r["spread"] > 1e-12:
        raise HypothesisViolated("step_preserving")

    t = 1.0 / d
    sources: list[PairSource] = []
    if n is not None:
        sources.append(("staircase(m,n)", iter([(z, staircase_z(tuple(n), k))])))
    sources.append(staircase_source(growth, d, k))
    sources.append(divergence_source(k, [t]))
    sources.append(random_source(k, t, random_pairs, seed, positive=True))

    tried, best, best_info = 0, 0.0, None
    branch_a = None
    for name, pairs in sources:
        for x, y in pairs:
            dom = sup_distance(x, y)
            if dom > t + 1e-12:
                continue
            try:
                dist = image_distance(F, x, y)
            except ValueError:
                continue
            tried += 1
            if dist > best:
                best, best_info = dist, {"source": name, "x": x, "y": y, "domain_distance": dom, "image_distance": dist}
            if branch_a is None and dist > threshold_a + STRICT_MARGIN:
                branch_a = {"source": name, "x": x, "y": y, "domain_distance": dom, "image_distance": dist}
        if branch_a is not None:
            break

    uniform = PcpVector.constant(k, 1.0 / oracle.psi(k))
    conclusion = oracle.eval(difference(img, uniform))
    common = dict(
        inputs={"map": F.name, "d": d, "k": k, "m": list(m), "eps": eps, "a": growth.a},
        block_readouts={"alpha_m": r["alpha"], "gamma_m": r["gamma"]},
    )
    hyp = {"modulus_threshold": threshold_a, "pairs_tried": tried, "modulus_lower_bound": best}
    if branch_a is not None:
        return InequalityReport(
            checker=checker,
            hypothesis_values=hyp,
            conclusion_value=branch_a["image_distance"],
            threshold=threshold_a,
            margin=branch_a["image_distance"] - threshold_a,
            verdict="hypothesis_not_met",
            details={"branch": "A", "witness": branch_a, "conclusion_if_applied": conclusion},
            **common,
        )
    return InequalityReport(
        checker=checker,
        hypothesis_values=hyp,
        conclusion_value=conclusion,
        threshold=eps,
        margin=eps - conclusion,
        verdict="pass" if conclusion <= eps else "fail",
        details={"branch": "B", "note": f"no violation found among {tried} pairs", "closest_pair": best_info},
        **common,
    )


def local_q_certificate(F: SphereMap, d: int, eps: float, gamma: float, **kw) -> InequalityReport:
    """Per-instance local Property Q check: modulus threshold ``gamma * eps``."""
    return check_concentration(F, d, eps, modulus_threshold=gamma * eps, checker="local_property_q", **kw)


# tables ------------------------------------------------------------------


def divergence_bound(k: int, delta: float) -> float:
    return abs(1.0 - 1.0 / (1.0 + (k - 1) * delta))


def divergence_table(F: SphereMap, ks: Sequence[int], deltas: Sequence[float]) -> list[InequalityReport]:
    """``||F(e_1) - F(e_1 + delta * sum_{i>=2} e_i)||`` against its lower bound on a grid."""
    out = []
    for k in ks:
        e1 = unit_vector(k)
        img_e1 = F(e1)
        for delta in deltas:
            dist = F.target.eval(difference(img_e1, F(divergence_x(k, delta))))
            bound = divergence_bound(k, delta)
            out.append(
                InequalityReport(
                    checker="divergence",
                    inputs={"map": F.name, "k": k, "delta": delta},
                    hypothesis_values={"domain_distance": delta},
                    conclusion_value=dist,
                    threshold=bound,
                    margin=dist - bound,
                    verdict="pass" if dist >= bound - 1e-12 else "fail",
                )
            )
    return out


def integral_roundtrip(k: int, n: int, seed: int) -> InequalityReport:
    """Worst round-trip error of the integral map and its inverse on random points."""
    rng = np.random.default_rng(seed)
    fwd, inv = integral_homeo(), integral_homeo_inverse()
    worst_y = worst_x = 0.0
    for _ in range(n):
        x = rng.uniform(0.0, 1.0, size=k)
        if rng.random() < 0.5:
            x = rng.choice(x[: max(1, k // 4)], size=k)
        x[int(rng.integers(k))] = 1.0
        worst_x = max(worst_x, float(np.max(np.abs(inv(fwd(x)) - x))))
        y = rng.exponential(size=k)
        y /= y.sum()
        worst_y = max(worst_y, float(np.sum(np.abs(fwd(inv(y)) - y))))
    worst = max(worst_x, worst_y)
    return InequalityReport(
        checker="roundtrip",
        inputs={"map": "integral", "k": k, "n": n, "seed": seed},
        hypothesis_values={"sup_error_x": worst_x, "l1_error_y": worst_y},
        conclusion_value=worst,
        threshold=1e-10,
        margin=1e-10 - worst,
        verdict="pass" if worst <= 1e-10 else "fail",
    )


def mazur_roundtrip(p: float, k: int, n: int, seed: int) -> InequalityReport:
    """``M_p`` lands on the unit sphere of ``l_2`` and its inverse undoes it."""
    from .norms import LrNorm

    rng = np.random.default_rng(seed)
    src = LrNorm(p)
    fwd, back = mazur_map(p), mazur_inverse(p)
    worst_norm = worst_rt = 0.0
    for _ in range(n):
        x = rng.normal(size=k)
        x /= src.eval(x)
        y = as_dense(fwd(x))
        worst_norm = max(worst_norm, abs(L2.eval(y) - 1.0))
        worst_rt = max(worst_rt, float(np.max(np.abs(as_dense(back(y)) - x))))
    ok = worst_norm <= 1e-12 and worst_rt <= 1e-10
    return InequalityReport(
        checker="mazur_roundtrip",
        inputs={"map": f"mazur:{p:g}", "k": k, "n": n, "seed": seed},
        hypothesis_values={"norm_error": worst_norm},
        conclusion_value=worst_rt,
        threshold=1e-10,
        margin=1e-10 - worst_rt,
        verdict="pass" if ok else "fail",
    )
