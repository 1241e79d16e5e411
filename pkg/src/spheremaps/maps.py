"""Maps from the sup-norm sphere onto the sphere of a target norm.

Every map is a ``SphereMap``: a dense evaluation function, optionally an exact
``PcpVector`` evaluation, and a set of declared structural flags. Flags are
claims only; the ``check_*`` functions test them on samples.
"""

from __future__ import annotations

import ast
import itertools
import math
import operator
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .norms import L1, LINF, NormOracle, get_oracle
from .reports import InequalityReport
from .vectors import PcpVector, Vector, as_dense, same_support, support_size, to_dense

STEP = "step_preserving"
SUPPORT = "support_preserving"
NONINCREASING = "non_increasing_support"
EQUIVARIANT = "permutation_equivariant"
CONTINUOUS = "continuous"

EXACT_SYMMETRIZE_MAX_K = 8


class DegenerateDenominator(ValueError):
    pass


class NotInPositivePart(ValueError):
    pass


class NotOnSphere(ValueError):
    pass


class KTooLargeForExact(ValueError):
    pass


class TargetNotPositiveFacet(ValueError):
    pass


@dataclass(frozen=True)
class SphereMap:
    name: str
    target: NormOracle
    dense_fn: Callable[[np.ndarray], np.ndarray]
    pcp_fn: Callable[[PcpVector], PcpVector] | None = None
    flags: frozenset = field(default_factory=frozenset)
    domain: NormOracle = LINF
    positive_domain: bool = False
    dim: int | None = None

    @property
    def pcp_capable(self) -> bool:
        return self.pcp_fn is not None

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def __call__(self, x: Vector) -> Vector:
        if isinstance(x, PcpVector):
            self._check_dim(x.dim)
            if self.pcp_fn is not None:
                return self.pcp_fn(x)
            return PcpVector.from_dense(self.dense_fn(x.materialize()))
        arr = as_dense(x)
        self._check_dim(arr.size)
        return self.dense_fn(arr)

    def dense(self, x: Vector) -> np.ndarray:
        """Evaluate through the dense path regardless of input type."""
        arr = to_dense(x)
        self._check_dim(arr.size)
        return self.dense_fn(arr)

    def _check_dim(self, k: int) -> None:
        if self.dim is not None and k != self.dim:
            raise ValueError(f"{self.name} is defined on dimension {self.dim}, got {k}")


# catalog ------------------------------------------------------------------


def normalize_map(oracle: NormOracle = L1, k: int | None = None) -> SphereMap:
    """``x -> x / ||x||_X``."""

    def dense(x: np.ndarray) -> np.ndarray:
        return x / oracle.eval(x)

    def pcp(v: PcpVector) -> PcpVector:
        return v.scale(1.0 / oracle.eval(v))

    return SphereMap(
        name="normalize" if oracle is L1 else f"normalize[{oracle.name}]",
        target=oracle,
        dense_fn=dense,
        pcp_fn=pcp,
        flags=frozenset({STEP, SUPPORT, NONINCREASING, EQUIVARIANT, CONTINUOUS}),
        dim=k,
    )


def phi_map(phis: Callable | Sequence[Callable], k: int | None = None, name: str = "phi") -> SphereMap:
    """``x -> (phi_i(x_i) / sum_j |phi_j(x_j)|)_i`` into the l1 sphere.

    A single callable is applied to every coordinate and must accept numpy
    arrays; a sequence gives one function per coordinate.
    """
    single = callable(phis)
    if single:
        phi_list = None
        zero_ok = float(np.asarray(phis(np.zeros(1)))[0]) == 0.0
    else:
        phi_list = list(phis)
        k = len(phi_list) if k is None else k
        if len(phi_list) != k:
            raise ValueError("need one function per coordinate")
        zero_ok = all(float(f(0.0)) == 0.0 for f in phi_list)

    def apply(x: np.ndarray) -> np.ndarray:
        if single:
            return np.asarray(phis(x), dtype=np.float64) * np.ones_like(x)
        return np.array([float(f(t)) for f, t in zip(phi_list, x)])

    def dense(x: np.ndarray) -> np.ndarray:
        vals = apply(x)
        denom = float(np.sum(np.abs(vals)))
        if denom < 1e-12:
            raise DegenerateDenominator(f"sum |phi_j(x_j)| = {denom:g}")
        return vals / denom

    def pcp(v: PcpVector) -> PcpVector:
        w = v.map(lambda t: float(np.asarray(phis(np.array([t])))[0]))
        denom = L1.eval(w)
        if denom < 1e-12:
            raise DegenerateDenominator(f"sum |phi_j(x_j)| = {denom:g}")
        return w.scale(1.0 / denom)

    flags = {CONTINUOUS}
    if zero_ok:
        flags.add(NONINCREASING)
    if single:
        flags |= {STEP, EQUIVARIANT}
    return SphereMap(name=name, target=L1, dense_fn=dense, pcp_fn=pcp if single else None, flags=frozenset(flags), dim=k)


def _levels(values: np.ndarray, counts: np.ndarray):
    """Distinct positive values sorted descending, with cumulative counts."""
    order = np.argsort(-values, kind="stable")
    v = values[order]
    c = counts[order]
    return order, v, np.cumsum(c)


def _check_positive(values: np.ndarray, what: str = "x") -> np.ndarray:
    if values.size and float(values.min()) < -1e-12:
        raise NotInPositivePart(f"{what} has a coordinate {values.min():g} < 0")
    return np.where(values < 0.0, 0.0, values)


def _integral_table(values: np.ndarray, counts: np.ndarray) -> dict[float, float]:
    """Image value for each distinct input value, from the breakpoints of the integrand.

    On ``r in (v_{l+1}, v_l]`` the integrand's denominator is the number of
    coordinates ``>= v_l``, so each level contributes ``(v_l - v_{l+1}) / C_l``
    to every coordinate at or above it.
    """
    values = _check_positive(values)
    pos = values > 0.0
    table = {0.0: 0.0}
    if not np.any(pos):
        raise NotOnSphere("zero vector")
    # merge duplicate values (several segments may share one)
    uniq, inv = np.unique(values[pos], return_inverse=True)
    cnt = np.bincount(inv, weights=counts[pos].astype(np.float64))
    order, v, cum = _levels(uniq, cnt)
    if abs(v[0] - 1.0) > 1e-9:
        raise NotOnSphere(f"max coordinate {v[0]!r} is not 1")
    nxt = np.append(v[1:], 0.0)
    gains = (v - nxt) / cum
    img = np.cumsum(gains[::-1])[::-1]
    for val, out in zip(v.tolist(), img.tolist()):
        table[val] = out
    return table


def integral_homeo(k: int | None = None) -> SphereMap:
    """``F_i(x) = int_0^1 1[x_i >= r] / #{j : x_j >= r} dr`` on the positive part."""

    def dense(x: np.ndarray) -> np.ndarray:
        x = _check_positive(x)
        uniq, inv, cnt = np.unique(x, return_inverse=True, return_counts=True)
        table = _integral_table(uniq, cnt)
        img = np.array([table[u] for u in uniq.tolist()])
        return img[inv]

    def pcp(v: PcpVector) -> PcpVector:
        vals = np.array([val for val, _ in v.pieces()], dtype=np.float64)
        cnts = np.array([n for _, n in v.pieces()], dtype=np.float64)
        table = _integral_table(vals, cnts)
        return v.map(lambda t: table[0.0 if t <= 0.0 else t])

    return SphereMap(
        name="integral",
        target=L1,
        dense_fn=dense,
        pcp_fn=pcp,
        flags=frozenset({STEP, SUPPORT, NONINCREASING, EQUIVARIANT, CONTINUOUS}),
        positive_domain=True,
        dim=k,
    )


def integral_closed_form(x) -> np.ndarray:
    """``F(x)_j = sum_{i>=j} (x_i - x_{i+1}) / i`` for non-increasing ``x >= 0``."""
    x = as_dense(x)
    if np.any(np.diff(x) > 0):
        raise ValueError("closed form needs a non-increasing input")
    diffs = x - np.append(x[1:], 0.0)
    terms = diffs / np.arange(1, x.size + 1)
    return np.cumsum(terms[::-1])[::-1]


def _inverse_table(values: np.ndarray, counts: np.ndarray) -> dict[float, float]:
    values = _check_positive(values, "y")
    pos = values > 0.0
    table = {0.0: 0.0}
    if not np.any(pos):
        raise NotOnSphere("zero vector")
    uniq, inv = np.unique(values[pos], return_inverse=True)
    cnt = np.bincount(inv, weights=counts[pos].astype(np.float64))
    order, w, cum = _levels(uniq, cnt)
    # mass strictly below each level
    below = np.append(np.cumsum((w * cnt[order])[::-1])[::-1][1:], 0.0)
    for val, out in zip(w.tolist(), (cum * w + below).tolist()):
        table[val] = out
    return table


def integral_homeo_inverse(k: int | None = None) -> SphereMap:
    """``F^{-1}(y)_j = j y_j + sum_{i>j} y_i`` on sorted ``y``, extended by symmetry."""

    def dense(y: np.ndarray) -> np.ndarray:
        y = _check_positive(y, "y")
        uniq, inv, cnt = np.unique(y, return_inverse=True, return_counts=True)
        table = _inverse_table(uniq, cnt)
        return np.array([table[u] for u in uniq.tolist()])[inv]

    def pcp(v: PcpVector) -> PcpVector:
        vals = np.array([val for val, _ in v.pieces()], dtype=np.float64)
        cnts = np.array([n for _, n in v.pieces()], dtype=np.float64)
        table = _inverse_table(vals, cnts)
        return v.map(lambda t: table[0.0 if t <= 0.0 else t])

    return SphereMap(
        name="integral-inverse",
        target=LINF,
        dense_fn=dense,
        pcp_fn=pcp,
        flags=frozenset({STEP, SUPPORT, NONINCREASING, EQUIVARIANT, CONTINUOUS}),
        domain=L1,
        positive_domain=True,
        dim=k,
    )


def mazur_map(p: float, k: int | None = None, target_exp: float = 2.0, check_tol: float = 1e-12) -> SphereMap:
    """``x -> sign(x)|x|^(p/target_exp)`` from the l_p sphere to the l_target sphere.

    The inverse is ``mazur_map(target_exp, target_exp=p)``.
    """
    from .norms import LrNorm

    p = float(p)
    dom = LrNorm(p)
    tgt = LrNorm(target_exp)
    expo = p / float(target_exp)

    def check(norm: float) -> None:
        if abs(norm - 1.0) > check_tol:
            raise NotOnSphere(f"||x||_{p:g} = {norm!r}")

    def dense(x: np.ndarray) -> np.ndarray:
        check(dom.eval(x))
        return np.sign(x) * np.abs(x) ** expo

    def pcp(v: PcpVector) -> PcpVector:
        check(dom.eval(v))
        return v.map(lambda t: math.copysign(abs(t) ** expo, t) if t != 0.0 else 0.0)

    return SphereMap(
        name=f"mazur:{p:g}" if target_exp == 2.0 else f"mazur:{p:g}->{target_exp:g}",
        target=tgt,
        dense_fn=dense,
        pcp_fn=pcp,
        flags=frozenset({STEP, SUPPORT, NONINCREASING, EQUIVARIANT, CONTINUOUS}),
        domain=dom,
        dim=k,
    )


def mazur_inverse(p: float, k: int | None = None) -> SphereMap:
    return mazur_map(2.0, k=k, target_exp=p)


def const_uniform_map(oracle: NormOracle = L1, k: int | None = None) -> SphereMap:
    """``x -> 1_[1,k] / psi(k)``, ignoring ``x``."""

    def dense(x: np.ndarray) -> np.ndarray:
        return np.full(x.size, 1.0 / oracle.psi(x.size))

    def pcp(v: PcpVector) -> PcpVector:
        return PcpVector.constant(v.dim, 1.0 / oracle.psi(v.dim))

    return SphereMap(
        name="const-uniform",
        target=oracle,
        dense_fn=dense,
        pcp_fn=pcp,
        flags=frozenset({STEP, EQUIVARIANT, CONTINUOUS}),
        dim=k,
    )


# wrappers -----------------------------------------------------------------


def abs_wrapper(F: SphereMap) -> SphereMap:
    """Coordinate-wise absolute value of the image; never increases distances."""
    pcp = None
    if F.pcp_fn is not None:
        inner = F.pcp_fn

        def pcp(v: PcpVector) -> PcpVector:
            return inner(v).abs()

    kept = F.flags & {STEP, SUPPORT, NONINCREASING, EQUIVARIANT, CONTINUOUS}
    return replace(F, name=f"abs+{F.name}", dense_fn=lambda x: np.abs(F.dense_fn(x)), pcp_fn=pcp, flags=kept)


def symmetrize(F: SphereMap, mode: str = "exact", n: int = 64, seed: int = 0) -> SphereMap:
    """Average ``P_pi^{-1} o F o P_pi`` over permutations.

    ``mode="exact"`` uses all ``k!`` permutations (``k <= 8``) and yields a
    permutation equivariant map. ``mode="sampled"`` uses ``n`` permutations
    drawn once per dimension from ``seed``; every call with the same ``k``
    reuses them, so the result is a fixed deterministic map.
    """
    if F.target.r_exponent != 1.0:
        raise TargetNotPositiveFacet("symmetrization needs an l1 target")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and F.dim is not None and F.dim > EXACT_SYMMETRIZE_MAX_K:
        raise KTooLargeForExact(f"k = {F.dim} > {EXACT_SYMMETRIZE_MAX_K}")
    cache: dict[int, np.ndarray] = {}

    def perms_for(k: int) -> np.ndarray:
        if k not in cache:
            if mode == "exact":
                if k > EXACT_SYMMETRIZE_MAX_K:
                    raise KTooLargeForExact(f"k = {k} > {EXACT_SYMMETRIZE_MAX_K}")
                cache[k] = np.array(list(itertools.permutations(range(k))), dtype=np.intp)
            else:
                rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
                cache[k] = np.array([rng.permutation(k) for _ in range(n)], dtype=np.intp)
        return cache[k]

    def dense(x: np.ndarray) -> np.ndarray:
        perms = perms_for(x.size)
        acc = np.zeros(x.size)
        for perm in perms:
            y = F.dense_fn(x[perm])
            if float(y.min()) < -1e-12:
                raise TargetNotPositiveFacet(f"{F.name} has a negative image coordinate {y.min():g}")
            # P_{pi^-1} y puts y_j back at position perm[j]
            back = np.empty_like(y)
            back[perm] = y
            acc += back
        acc /= len(perms)
        if mode == "sampled":
            acc /= acc.sum()
        return acc

    flags = {f for f in F.flags if f in (SUPPORT, NONINCREASING, CONTINUOUS)}
    if mode == "exact":
        flags |= {EQUIVARIANT, STEP}
        label = "sym(exact)"
    else:
        label = f"sym({n},{seed})"
    return replace(F, name=f"{label}+{F.name}", dense_fn=dense, pcp_fn=None, flags=frozenset(flags))


# sampling -----------------------------------------------------------------


def sample_domain(F: SphereMap, k: int, rng: np.random.Generator, ties: bool = True, zeros: bool = True) -> np.ndarray:
    """A random point of ``F``'s domain sphere, often with tied and zero coordinates."""
    lo = 0.0 if F.positive_domain else -1.0
    if ties and rng.random() < 0.5:
        levels = rng.uniform(lo, 1.0, size=int(rng.integers(1, 4)))
        x = rng.choice(levels, size=k)
    else:
        x = rng.uniform(lo, 1.0, size=k)
    if zeros and rng.random() < 0.5:
        x[rng.random(k) < 0.3] = 0.0
    if F.domain is LINF:
        i = int(rng.integers(k))
        peak = 1.0 if (F.positive_domain or rng.random() < 0.5) else -1.0
        # tie the peak to a whole level class when one exists
        if x[i] != 0.0:
            x[x == x[i]] = peak
        x[i] = peak
        return x
    if not np.any(x):
        x[int(rng.integers(k))] = 1.0
    return x / F.domain.eval(x)


def default_samples(F: SphereMap, k: int, n: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [sample_domain(F, k, rng) for _ in range(n)]


# property checkers ----------------------------------------------------------


def _report(checker: str, F: SphereMap, n: int, worst: float, tol: float, first, extra: dict | None = None) -> InequalityReport:
    ok = first is None
    details = {"first_violation": first}
    if extra:
        details.update(extra)
    return InequalityReport(
        checker=checker,
        inputs={"map": F.name, "samples": n, "tol": tol},
        hypothesis_values={},
        conclusion_value=worst,
        threshold=tol,
        margin=tol - worst,
        verdict="pass" if ok else "fail",
        details=details,
    )


def step_spread(x: Vector, y: Vector, tie_tol: float = 1e-12) -> tuple[float, tuple[int, int] | None]:
    """Largest ``|y_i - y_j|`` over pairs with ``|x_i - x_j| <= tie_tol``, with such a pair."""
    if isinstance(x, PcpVector) and isinstance(y, PcpVector) and tie_tol == 0.0:
        groups: dict[float, list[float]] = {}
        from .vectors import _overlay, parity_counts

        for lo, hi, (xe, xo), (ye, yo) in _overlay(x, y):
            ne, no = parity_counts(lo, hi)
            if ne:
                groups.setdefault(xe, []).append(ye)
            if no:
                groups.setdefault(xo, []).append(yo)
        spread = max(max(v) - min(v) for v in groups.values())
        return spread, None
    xa, ya = to_dense(x), to_dense(y)
    order = np.argsort(xa, kind="stable")
    xs, ys = xa[order], ya[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(xs) > tie_tol) + 1))
    hi = np.maximum.reduceat(ys, starts)
    lo = np.minimum.reduceat(ys, starts)
    spreads = hi - lo
    g = int(np.argmax(spreads))
    worst = float(spreads[g])
    if worst == 0.0:
        return 0.0, None
    end = starts[g + 1] if g + 1 < starts.size else xs.size
    idx = order[starts[g] : end]
    i = int(idx[np.argmax(ya[idx])]) + 1
    j = int(idx[np.argmin(ya[idx])]) + 1
    return worst, (i, j)


def check_step_preserving(F: SphereMap, samples: Sequence[Vector], tol: float = 1e-12) -> InequalityReport:
    worst, first = 0.0, None
    for s, x in enumerate(samples):
        spread, pair = step_spread(x, F(x))
        worst = max(worst, spread)
        if spread > tol and first is None:
            first = {"sample": s, "coords": pair, "spread": spread}
    return _report("step_preserving", F, len(samples), worst, tol, first)


def check_support_preserving(F: SphereMap, samples: Sequence[Vector], tol: float = 1e-12) -> InequalityReport:
    bad, first = 0, None
    for s, x in enumerate(samples):
        if not same_support(x, F(x), tol):
            bad += 1
            if first is None:
                first = {"sample": s}
    return _report("support_preserving", F, len(samples), float(bad), tol, first, {"violations": bad})


def check_non_increasing_support(F: SphereMap, samples: Sequence[Vector], tol: float = 1e-12) -> InequalityReport:
    worst, first = -math.inf, None
    for s, x in enumerate(samples):
        growth = support_size(F(x), tol) - support_size(x, tol)
        worst = max(worst, growth)
        if growth > 0 and first is None:
            first = {"sample": s, "growth": growth}
    rep = _report("non_increasing_support", F, len(samples), float(worst), tol, first)
    rep.threshold = 0.0
    rep.margin = -float(worst)
    return rep


def check_equivariance(F: SphereMap, samples: Sequence[np.ndarray], rng: np.random.Generator, tol: float = 1e-12) -> InequalityReport:
    worst, first = 0.0, None
    for s, x in enumerate(samples):
        x = to_dense(x)
        k = x.size
        i, j = rng.choice(k, size=2, replace=False) if k > 1 else (0, 0)
        perm = np.arange(k)
        perm[[i, j]] = perm[[j, i]]
        lhs = F.dense(x[perm])
        rhs = F.dense(x)[perm]
        gap = float(np.max(np.abs(lhs - rhs)))
        worst = max(worst, gap)
        if gap > tol and first is None:
            first = {"sample": s, "transposition": (int(i) + 1, int(j) + 1), "gap": gap}
    return _report("permutation_equivariant", F, len(samples), worst, tol, first)


def check_equivariance_implies_step(F: SphereMap, k: int, trials: int = 100, seed: int = 0, tol: float = 1e-12) -> InequalityReport:
    """Equivariance on random transpositions and step preservation on the same samples.

    Equivariance forces step preservation, so passing the first and failing
    the second means a bug somewhere in this package.
    """
    rng = np.random.default_rng(seed)
    samples = [sample_domain(F, k, rng) for _ in range(trials)]
    eq = check_equivariance(F, samples, rng, tol)
    st = check_step_preserving(F, samples, tol)
    contradiction = eq.passed and not st.passed
    ok = eq.passed and st.passed
    return InequalityReport(
        checker="equivariance_implies_step",
        inputs={"map": F.name, "k": k, "trials": trials, "seed": seed, "tol": tol},
        hypothesis_values={"equivariance_gap": eq.conclusion_value},
        conclusion_value=st.conclusion_value,
        threshold=tol,
        margin=min(eq.margin, st.margin),
        verdict="pass" if ok else "fail",
        details={
            "equivariant": eq.passed,
            "step_preserving": st.passed,
            "contradiction": contradiction,
            "equivariance_violation": eq.details["first_violation"],
            "step_violation": st.details["first_violation"],
        },
    )


def verify_declared_flags(F: SphereMap, k: int, n: int = 1000, seed: int = 0, tol: float = 1e-12) -> dict[str, InequalityReport]:
    """Run the checker for every flag ``F`` declares."""
    samples = default_samples(F, k, n, seed)
    out: dict[str, InequalityReport] = {}
    if F.has(STEP):
        out[STEP] = check_step_preserving(F, samples, tol)
    if F.has(SUPPORT):
        out[SUPPORT] = check_support_preserving(F, samples, tol)
    if F.has(NONINCREASING):
        out[NONINCREASING] = check_non_increasing_support(F, samples, tol)
    if F.has(EQUIVARIANT):
        out[EQUIVARIANT] = check_equivariance(F, samples, np.random.default_rng(seed + 1), tol)
    return out


# map specs ----------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: np.power}
_FUNCS = {"abs": np.abs, "sign": np.sign, "exp": np.exp, "sin": np.sin, "cos": np.cos, "tanh": np.tanh, "sqrt": np.sqrt}


def parse_scalar_function(expr: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an arithmetic expression in ``t`` (e.g. ``"t**3"``, ``"3+t"``)."""
    tree = ast.parse(expr.replace("^", "**"), mode="eval")

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            c = float(node.value)
            return lambda t: c
        if isinstance(node, ast.Name) and node.id == "t":
            return lambda t: t
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda t: sign * inner(t)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = build(node.left), build(node.right)
            return lambda t: op(left(t), right(t))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
            fn = _FUNCS[node.func.id]
            arg = build(node.args[0])
            return lambda t: fn(arg(t))
        raise ValueError(f"unsupported expression element in {expr!r}")

    f = build(tree)

    def phi(t):
        return np.asarray(f(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    return phi


def get_map(spec: str, oracle: NormOracle = L1) -> SphereMap:
    """Resolve a catalog string such as ``"abs+normalize"`` or ``"sym(8,1)+integral"``."""
    spec = spec.strip()
    for prefix in ("abs+", "sym(exact)+"):
        if spec.startswith(prefix):
            inner = get_map(spec[len(prefix) :], oracle)
            return abs_wrapper(inner) if prefix == "abs+" else symmetrize(inner, "exact")
    if spec.startswith("sym("):
        close = spec.find(")+")
        if close < 0:
            raise ValueError(f"bad symmetrize prefix in {spec!r}")
        try:
            n, seed = (int(t) for t in spec[4:close].split(","))
        except ValueError:
            raise ValueError(f"bad symmetrize prefix in {spec!r}") from None
        return symmetrize(get_map(spec[close + 2 :], oracle), "sampled", n=n, seed=seed)
    if spec == "normalize":
        return normalize_map(oracle)
    if spec == "integral":
        return integral_homeo()
    if spec == "const-uniform":
        return const_uniform_map(oracle)
    if spec.startswith("phi:"):
        return phi_map(parse_scalar_function(spec[4:]), name=spec)
    if spec.startswith("mazur:"):
        try:
            p = float(spec[6:])
        except ValueError:
            raise ValueError(f"bad exponent in {spec!r}") from None
        return mazur_map(p)
    raise ValueError(f"unknown map {spec!r}")
