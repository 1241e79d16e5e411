"""Norm oracles for normalized 1-unconditional bases.

Built-ins are the ``l_r`` family and ``l_inf``. A user-supplied norm is any
``NormOracle`` constructed from a dense evaluation function together with the
block-estimate exponents ``(q, p)`` it claims; ``check_block_estimates`` tests
that claim.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .reports import InequalityReport
from .vectors import DENSE_LIMIT, DimensionTooLarge, PcpVector, SupportSet, Vector, as_dense, to_dense


class NotBlockSequence(ValueError):
    pass


class NormOracle:
    """A norm on ``R^k`` for every ``k``, unconditional in the basis ``(e_i)``.

    ``func`` takes a dense array. ``symmetric`` means the norm of an indicator
    depends only on its cardinality (true for ``l_r``), which lets partition
    and growth-set code work from counts instead of vectors.
    """

    def __init__(
        self,
        name: str,
        func: Callable[[np.ndarray], float],
        block_q: float = 1.0,
        block_p: float = math.inf,
        symmetric: bool = False,
        admissible: bool = True,
    ):
        if not 1 <= block_q <= block_p:
            raise ValueError("need 1 <= q <= p")
        if math.isinf(block_q):
            raise ValueError("q must be finite")
        self.name = name
        self._func = func
        self.block_q = float(block_q)
        self.block_p = float(block_p)
        self.symmetric = symmetric
        self.admissible = admissible
        self.r_exponent: float | None = None
        self._psi: dict[int, float] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"NormOracle({self.name!r})"

    def eval(self, v: Vector) -> float:
        return float(self._func(to_dense(v)))

    __call__ = eval

    def indicator_norm(self, mask: np.ndarray) -> float:
        mask = np.asarray(mask, dtype=bool)
        if self.symmetric:
            return self.psi(int(mask.sum()))
        return self.eval(mask.astype(np.float64))

    def psi(self, k: int) -> float:
        """Fundamental function ``||1_[1,k]||``; ``psi(0) = 0``."""
        k = int(k)
        if k < 0:
            raise ValueError("k must be non-negative")
        if k == 0:
            return 0.0
        with self._lock:
            hit = self._psi.get(k)
        if hit is not None:
            return hit
        if k > DENSE_LIMIT:
            raise DimensionTooLarge(f"psi({k}) needs a dense vector beyond {DENSE_LIMIT}")
        val = self.eval(np.ones(k))
        with self._lock:
            self._psi[k] = val
        return val

    def d_factor(self, d: int) -> float:
        """``d^(1/q - 1/p)``, the dimension penalty in the growth condition."""
        inv_p = 0.0 if math.isinf(self.block_p) else 1.0 / self.block_p
        return float(d) ** (1.0 / self.block_q - inv_p)


class LrNorm(NormOracle):
    def __init__(self, r: float):
        r = float(r)
        if not 1 <= r < math.inf:
            raise ValueError("r must lie in [1, inf)")
        super().__init__(_lr_name(r), self._dense, block_q=r, block_p=r, symmetric=True)
        self.r_exponent = r

    def _dense(self, x: np.ndarray) -> float:
        r = self.r_exponent
        if r == 1.0:
            return float(np.sum(np.abs(x)))
        if r == 2.0:
            return float(np.sqrt(np.dot(x, x)))
        return float(np.sum(np.abs(x) ** r) ** (1.0 / r))

    def eval(self, v: Vector) -> float:
        if isinstance(v, PcpVector):
            # closed-form parity counts; exact at any dimension
            r = self.r_exponent
            terms = [n * abs(val) ** r for val, n in v.pieces() if val != 0.0]
            if not terms:
                return 0.0
            return math.fsum(terms) ** (1.0 / r)
        return self._dense(as_dense(v))

    def psi(self, k: int) -> float:
        k = int(k)
        if k < 0:
            raise ValueError("k must be non-negative")
        if k == 0:
            return 0.0
        r = self.r_exponent
        if r == 1.0:
            return float(k)
        root = k ** (1.0 / r)
        if r.is_integer():
            # snap exact integer roots, e.g. 10**6 ** (1/3) -> 100
            n = round(root)
            if n ** int(r) == k:
                return float(n)
        return root


class LinfNorm(NormOracle):
    """Sup norm. Only used where a c_0-equivalent target is wanted."""

    def __init__(self) -> None:
        super().__init__("linf", lambda x: float(np.max(np.abs(x))), block_q=1.0, block_p=math.inf, symmetric=True, admissible=False)

    def eval(self, v: Vector) -> float:
        if isinstance(v, PcpVector):
            return v.sup_norm()
        return float(np.max(np.abs(as_dense(v))))

    def psi(self, k: int) -> float:
        return 0.0 if k == 0 else 1.0


def _lr_name(r: float) -> str:
    if r == 1.0:
        return "l1"
    if r == 2.0:
        return "l2"
    return f"lr:{r:g}"


L1 = LrNorm(1)
L2 = LrNorm(2)
LINF = LinfNorm()


def get_oracle(spec: str) -> NormOracle:
    """Resolve ``"l1"``, ``"l2"``, ``"lr:<r>"`` or ``"linf"``."""
    spec = spec.strip().lower()
    if spec == "l1":
        return L1
    if spec == "l2":
        return L2
    if spec == "linf":
        return LINF
    if spec.startswith("lr:"):
        try:
            r = float(spec[3:])
        except ValueError:
            raise ValueError(f"bad exponent in oracle spec {spec!r}") from None
        return LrNorm(r)
    raise ValueError(f"unknown oracle {spec!r}")


def psi(oracle: NormOracle, k: int) -> float:
    return oracle.psi(k)


def psi_partition(oracle: NormOracle, P, k: int) -> float:
    """``min(||1_[1,k] & P||, ||1_[1,k] & P^c||)``.

    ``P`` is a ``SupportSet``, a boolean mask over ``1..k``, or any object
    with an ``indicators(k)`` method returning the two class indicators
    (the partitions in ``witnesses`` do this, in closed form for parity).
    """
    if hasattr(P, "indicators"):
        in_p, in_pc = P.indicators(k)
        return min(oracle.eval(in_p), oracle.eval(in_pc))
    if k > DENSE_LIMIT:
        raise DimensionTooLarge(f"dense partition beyond {DENSE_LIMIT}")
    if isinstance(P, SupportSet):
        mask = np.zeros(k, dtype=bool)
        members = np.asarray([m for m in P.members if m <= k], dtype=np.int64)
        mask[members - 1] = True
    else:
        mask = np.asarray(P, dtype=bool)[:k]
        if mask.size != k:
            raise ValueError("mask shorter than k")
    return min(oracle.indicator_norm(mask), oracle.indicator_norm(~mask))


def check_block_estimates(oracle: NormOracle, blocks: Sequence, rtol: float = 1e-10) -> InequalityReport:
    """Test ``(sum ||x_i||^p)^(1/p) <= ||sum x_i|| <= (sum ||x_i||^q)^(1/q)``."""
    dense = [as_dense(to_dense(b)) for b in blocks]
    if not dense:
        raise NotBlockSequence("empty block sequence")
    k = dense[0].size
    last = 0
    for i, b in enumerate(dense):
        if b.size != k:
            raise NotBlockSequence("blocks have different dimensions")
        nz = np.flatnonzero(b)
        if nz.size == 0:
            continue
        if nz[0] + 1 <= last:
            raise NotBlockSequence(f"block {i} starts at {nz[0] + 1}, not after {last}")
        last = int(nz[-1]) + 1
    norms = np.array([oracle.eval(b) for b in dense])
    total = oracle.eval(np.sum(dense, axis=0))
    q, p = oracle.block_q, oracle.block_p
    upper = float(np.sum(norms**q) ** (1.0 / q))
    lower = float(np.max(norms)) if math.isinf(p) else float(np.sum(norms**p) ** (1.0 / p))
    slack = rtol * max(1.0, total)
    margin = min(total - lower, upper - total)
    ok = lower <= total + slack and total <= upper + slack
    return InequalityReport(
        checker="block_estimates",
        inputs={"oracle": oracle.name, "n_blocks": len(dense), "k": k, "q": q, "p": p},
        hypothesis_values={"lower_p": lower, "upper_q": upper},
        conclusion_value=total,
        threshold=upper,
        margin=margin,
        verdict="pass" if ok else "fail",
    )


def check_unconditional(oracle: NormOracle, k: int, trials: int, seed: int) -> InequalityReport:
    """Spot test: flipping signs keeps the norm, shrinking a coordinate never raises it."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    first_bad = None
    for t in range(trials):
        x = rng.uniform(-1.0, 1.0, size=k)
        base = oracle.eval(x)
        flipped = oracle.eval(x * rng.choice([-1.0, 1.0], size=k))
        y = x.copy()
        i = rng.integers(k)
        y[i] *= rng.uniform(0.0, 1.0)
        shrunk = oracle.eval(y)
        excess = max(abs(flipped - base), shrunk - base) - 1e-12 * max(1.0, base)
        if excess > worst:
            worst = excess
        if excess > 0 and first_bad is None:
            first_bad = t
    unit = [oracle.eval(np.eye(1, k, i).ravel()) for i in range(min(k, 16))]
    normalized = all(abs(u - 1.0) <= 1e-12 for u in unit)
    ok = first_bad is None and normalized
    return InequalityReport(
        checker="unconditional",
        inputs={"oracle": oracle.name, "k": k, "trials": trials, "seed": seed},
        hypothesis_values={"unit_vectors_normalized": float(normalized)},
        conclusion_value=worst,
        threshold=0.0,
        margin=-worst,
        verdict="pass" if ok else "fail",
        details={"first_violation_trial": first_bad},
    )


def growth_base(r: float, eps: float, constant: float = 8.0, offset: float = 3.0) -> int:
    """``ceil((constant / eps + offset) ** r)``, exact for integer ``r``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if float(r).is_integer():
        val = (Fraction(constant) / Fraction(eps) + Fraction(offset)) ** int(r)
        return math.ceil(val)
    return math.ceil((constant / eps + offset) ** r - 1e-12)
