"""Partitions, growth sets and the witness vectors built on them.

Intervals follow the half-open convention ``(lo, hi]`` throughout, so the
block of a tuple ``m`` with index ``s`` is ``(m[s-1], m[s]]`` with
``m[0] = 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .maps import SphereMap
from .norms import LrNorm, NormOracle, growth_base
from .reports import InequalityReport
from .vectors import DENSE_LIMIT, DimensionTooLarge, PcpVector, Vector, from_blocks, parity_counts


class BadTuple(ValueError):
    pass


class OracleIsC0Like(ValueError):
    pass


class NotEnoughElements(ValueError):
    pass


class NoSignChange(ValueError):
    pass


# partitions ---------------------------------------------------------------


class Partition:
    """A subset ``P`` of the positive integers, split against its complement.

    ``kind`` is ``"evens"`` (P = 2N), ``"odds"``, or ``"greedy"``. Parity
    partitions produce ``PcpVector`` witnesses at any dimension; greedy ones
    are stored as a boolean mask up to ``k_max`` and produce dense vectors.
    """

    def __init__(self, kind: str, mask: np.ndarray | None = None, oracle_name: str = ""):
        if kind not in ("evens", "odds", "greedy"):
            raise ValueError(f"unknown partition kind {kind!r}")
        if kind == "greedy" and mask is None:
            raise ValueError("greedy partition needs a membership mask")
        self.kind = kind
        self.oracle_name = oracle_name
        self._mask = None if mask is None else np.asarray(mask, dtype=bool)
        self._cum = None if mask is None else np.concatenate(([0], np.cumsum(self._mask)))

    def __repr__(self) -> str:
        if self.kind == "greedy":
            return f"Partition(greedy[{self.oracle_name}], k_max={self.k_max})"
        return f"Partition({self.kind})"

    @property
    def is_parity(self) -> bool:
        return self.kind != "greedy"

    @property
    def k_max(self) -> float:
        return math.inf if self._mask is None else self._mask.size

    def _need(self, k: int) -> None:
        if k > self.k_max:
            raise DimensionTooLarge(f"partition only decided up to {self.k_max}, need {k}")

    def contains(self, i: int) -> bool:
        if self.kind == "evens":
            return i % 2 == 0
        if self.kind == "odds":
            return i % 2 == 1
        self._need(i)
        return bool(self._mask[i - 1])

    def mask(self, k: int) -> np.ndarray:
        if k > DENSE_LIMIT:
            raise DimensionTooLarge(f"{k} > {DENSE_LIMIT}")
        if self.kind == "greedy":
            self._need(k)
            return self._mask[:k].copy()
        idx = np.arange(1, k + 1)
        return (idx % 2 == 0) if self.kind == "evens" else (idx % 2 == 1)

    def counts(self, lo: int, hi: int) -> tuple[int, int]:
        """``(|(lo, hi] & P|, |(lo, hi] & P^c|)``."""
        if hi <= lo:
            return 0, 0
        if self.kind == "greedy":
            self._need(hi)
            n_p = int(self._cum[hi] - self._cum[lo])
            return n_p, (hi - lo) - n_p
        n_even, n_odd = parity_counts(lo + 1, hi)
        return (n_even, n_odd) if self.kind == "evens" else (n_odd, n_even)

    def meets_both(self, lo: int, hi: int) -> bool:
        n_p, n_pc = self.counts(lo, hi)
        return n_p > 0 and n_pc > 0

    def first_member(self, lo: int, hi: int, in_p: bool) -> int | None:
        """Smallest ``i`` in ``(lo, hi]`` with ``(i in P) == in_p``."""
        for i in range(lo + 1, min(hi, lo + 2) + 1) if self.is_parity else ():
            if self.contains(i) == in_p:
                return i
        if self.is_parity:
            return None
        self._need(hi)
        seg = self._mask[lo:hi]
        hits = np.flatnonzero(seg == in_p)
        return int(hits[0]) + lo + 1 if hits.size else None

    def blocks_vector(self, k: int, blocks: Sequence[tuple[int, int, float, float]]) -> Vector:
        """Vector equal to ``cp`` on ``(lo, hi] & P`` and ``cpc`` on ``(lo, hi] & P^c``.

        ``blocks`` holds ``(lo, hi, cp, cpc)`` with increasing disjoint intervals.
        """
        if self.is_parity:
            if self.kind == "evens":
                pcs = [(lo, hi, cp, cpc) for lo, hi, cp, cpc in blocks]
            else:
                pcs = [(lo, hi, cpc, cp) for lo, hi, cp, cpc in blocks]
            return from_blocks(k, pcs)
        m = self.mask(k)
        out = np.zeros(k)
        for lo, hi, cp, cpc in blocks:
            seg = m[lo:hi]
            out[lo:hi] = np.where(seg, cp, cpc)
        return out

    def indicators(self, k: int) -> tuple[Vector, Vector]:
        return self.blocks_vector(k, [(0, k, 1.0, 0.0)]), self.blocks_vector(k, [(0, k, 0.0, 1.0)])


EVENS = Partition("evens")
ODDS = Partition("odds")


def get_partition(kind: str, oracle: NormOracle | None = None, k_max: int | None = None) -> Partition:
    if kind == "evens":
        return EVENS
    if kind == "odds":
        return ODDS
    if kind == "greedy":
        if oracle is None or k_max is None:
            raise ValueError("greedy partition needs an oracle and k_max")
        return greedy_partition(oracle, k_max)
    raise ValueError(f"unknown partition kind {kind!r}")


def greedy_partition(oracle: NormOracle, k_max: int, tie_tol: float = 0.0) -> Partition:
    """Admit ``k`` into ``P`` when that keeps ``||1_P||`` at most ``||1_{P^c}||``.

    Starts from ``1 in P``, ``2 in P^c``; ties go to ``P``.
    """
    if k_max > DENSE_LIMIT:
        raise DimensionTooLarge(f"{k_max} > {DENSE_LIMIT}")
    mask = np.zeros(k_max, dtype=bool)
    mask[0] = True
    if oracle.symmetric:
        n_p, n_pc = 1, min(1, k_max - 1)
        for k in range(3, k_max + 1):
            if oracle.psi(n_p + 1) <= oracle.psi(n_pc + 1) + tie_tol:
                mask[k - 1] = True
                n_p += 1
            else:
                n_pc += 1
        return Partition("greedy", mask, oracle.name)
    for k in range(3, k_max + 1):
        prefix = mask[: k - 1]
        with_p = np.append(prefix, True).astype(np.float64)
        with_pc = np.append(~prefix, True).astype(np.float64)
        if oracle.eval(with_p) <= oracle.eval(with_pc) + tie_tol:
            mask[k - 1] = True
    return Partition("greedy", mask, oracle.name)


def partition_balance(oracle: NormOracle, partition: Partition, k_max: int) -> np.ndarray:
    """``||1_[1,k] & P|| - ||1_[1,k] & P^c||`` for ``k = 1..k_max``."""
    m = partition.mask(k_max)
    if oracle.symmetric:
        n_p = np.cumsum(m)
        n_pc = np.arange(1, k_max + 1) - n_p
        return np.array([oracle.psi(a) - oracle.psi(b) for a, b in zip(n_p.tolist(), n_pc.tolist())])
    return np.array([oracle.indicator_norm(m[:k]) - oracle.indicator_norm(~m[:k]) for k in range(1, k_max + 1)])


# growth sets --------------------------------------------------------------


@dataclass
class GrowthSet:
    """Finite prefix ``k_1 < k_2 < ...`` of a growth set for the (d, eps) growth assumption."""

    oracle: NormOracle
    partition: Partition
    d: int
    eps: float
    elements: tuple[int, ...]
    a: int | None = None
    variant: str = "separation"

    @property
    def factor(self) -> float:
        return 8.0 * self.oracle.d_factor(self.d) / self.eps + 2.0

    def to_json(self, pairs: Sequence[InterlacedPair] = ()) -> dict:
        return {
            "a": self.a,
            "elements": list(self.elements),
            "pairs": [p.to_json() for p in pairs],
            "d": self.d,
            "eps": self.eps,
            "oracle": self.oracle.name,
            "partition": self.partition.kind,
            "variant": self.variant,
        }


def build_growth_set(
    oracle: NormOracle,
    partition: Partition,
    d: int,
    eps: float,
    count: int,
    variant: str = "separation",
    scan_limit: int = DENSE_LIMIT,
) -> GrowthSet:
    """First ``count`` elements of a growth set.

    ``variant="separation"`` targets the (d, eps) growth assumption. For ``l_r`` with a
    parity partition it is ``k_j = a^(j-1)``, ``a = ceil((8/eps + 3)^r)``.
    ``variant="concentration"`` uses ``a = ceil((32/eps + 2)^r)`` and records
    the (d, eps/4) assumption. Other norms are scanned for the smallest
    admissible next element.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if variant not in ("separation", "concentration"):
        raise ValueError(f"unknown variant {variant!r}")
    if not oracle.admissible:
        raise OracleIsC0Like(f"{oracle.name} has bounded fundamental function")
    eps_a = eps if variant == "separation" else eps / 4.0
    r = oracle.r_exponent
    if isinstance(oracle, LrNorm) and partition.is_parity:
        if variant == "separation":
            a = growth_base(r, eps, 8, 3)
        else:
            a = growth_base(r, eps, 32, 2)
        return GrowthSet(oracle, partition, d, eps_a, tuple(a**j for j in range(count)), a=a, variant=variant)

    factor = 8.0 * oracle.d_factor(d) / eps_a + 2.0
    elements = [1]
    while len(elements) < count:
        prev = elements[-1]
        need = factor * oracle.psi(prev) + 1.0

        def ok(k: int) -> bool:
            return oracle.psi(k) >= need and partition.meets_both(prev, k)

        hi = prev + 1
        while True:
            if hi > min(scan_limit, partition.k_max):
                raise OracleIsC0Like(
                    f"no k <= {min(scan_limit, partition.k_max)} with psi(k) >= {need:g}; psi looks bounded"
                )
            if ok(hi):
                break
            hi = min(2 * hi, int(min(scan_limit, partition.k_max))) if hi < min(scan_limit, partition.k_max) else hi + 1
        lo = prev
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        elements.append(hi)
    return GrowthSet(oracle, partition, d, eps_a, tuple(elements), variant=variant)


def check_assumption_a(growth: GrowthSet, elements: Sequence[int] | None = None, margin: float = 1e-9) -> InequalityReport:
    """Check the growth assumption on (a subsequence of) the growth set.

    ``elements`` defaults to the whole stored prefix. The growth inequality is
    checked in exact rational arithmetic for ``l_1``.
    """
    oracle, part = growth.oracle, growth.partition
    els = sorted(set(growth.elements if elements is None else elements))
    factor = growth.factor
    worst_growth = math.inf
    exact = oracle.r_exponent == 1.0
    for lo, hi in zip(els, els[1:]):
        if exact:
            need = (8 * Fraction(growth.eps) ** -1 + 2) * lo + 1
            gap = float(Fraction(hi) - need)
        else:
            gap = oracle.psi(hi) - (factor * oracle.psi(lo) + 1.0)
        worst_growth = min(worst_growth, gap)
    gaps_ok = all(part.meets_both(lo, hi) for lo, hi in zip(els, els[1:]))
    # psi_P(k) >= (psi(k) - 1) / 2 at every element used
    lemma = min(
        (psi_partition_value(oracle, part, k) - 0.5 * (oracle.psi(k) - 1.0) for k in els),
        default=math.inf,
    )
    growth_ok = worst_growth >= (0.0 if exact else -margin)
    ok = growth_ok and gaps_ok and lemma >= -margin
    return InequalityReport(
        checker="growth_assumption",
        inputs={"oracle": oracle.name, "d": growth.d, "eps": growth.eps, "a": growth.a, "elements": els},
        hypothesis_values={"growth_ok": growth_ok, "gaps_meet_both": gaps_ok, "psi_p_slack": lemma},
        conclusion_value=worst_growth,
        threshold=0.0,
        margin=min(worst_growth, lemma),
        verdict="pass" if ok else "fail",
    )


def psi_partition_value(oracle: NormOracle, partition: Partition, k: int) -> float:
    if partition.is_parity and oracle.symmetric:
        n_p, n_pc = partition.counts(0, k)
        return min(oracle.psi(n_p), oracle.psi(n_pc))
    from .norms import psi_partition

    return psi_partition(oracle, partition, k)


# tuples -------------------------------------------------------------------


def _check_tuple(m: Sequence[int], k: int, strict_tail: bool) -> tuple[int, ...]:
    m = tuple(int(v) for v in m)
    if not m:
        raise BadTuple("empty tuple")
    if m[0] < 1 or any(b <= a for a, b in zip(m, m[1:])):
        raise BadTuple(f"tuple {m} is not strictly increasing positive")
    if k < m[-1] or (strict_tail and k == m[-1]):
        raise BadTuple(f"k = {k} too small for tuple {m}")
    return m


@dataclass(frozen=True)
class InterlacedPair:
    m: tuple[int, ...]
    n: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        if len(self.m) != len(self.n):
            raise BadTuple("m and n differ in length")
        seq = [v for pair in zip(self.m, self.n) for v in pair] + [self.k]
        if seq[0] < 1 or any(b <= a for a, b in zip(seq, seq[1:])):
            raise BadTuple(f"need m1 < n1 < ... < md < nd < k, got m={self.m}, n={self.n}, k={self.k}")

    @property
    def d(self) -> int:
        return len(self.m)

    def to_json(self) -> dict:
        return {"m": list(self.m), "n": list(self.n), "k": self.k}


def enumerate_interlaced(
    growth: GrowthSet, d: int, k_budget: int, start: int = 0, exhaustive: bool = False
) -> list[InterlacedPair]:
    """Interlaced pairs from growth elements below ``k_budget``, all with ``k = k_budget``.

    Default mode slides a window of ``2d`` consecutive elements in steps of
    two from index ``start`` (0-based): ``m`` takes the window's 1st, 3rd, ...
    elements and ``n`` its 2nd, 4th, .... ``exhaustive`` lists every
    interlaced pair.
    """
    els = [e for e in growth.elements if e < k_budget]
    pairs: list[InterlacedPair] = []
    if exhaustive:
        for combo in itertools.combinations(els, 2 * d):
            pairs.append(InterlacedPair(combo[0::2], combo[1::2], k_budget))
    else:
        for st in range(start, len(els) - 2 * d + 1, 2):
            window = els[st : st + 2 * d]
            pairs.append(InterlacedPair(tuple(window[0::2]), tuple(window[1::2]), k_budget))
    if not pairs:
        raise NotEnoughElements(f"need {2 * d} growth elements below {k_budget} (from index {start}), have {len(els)}")
    return pairs


# profiles and witness vectors -----------------------------------------------


@dataclass(frozen=True)
class Profile:
    """Coefficients ``u = ((a_s), (b_s), c)`` of a witness vector."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    c: float
    tol: float = field(default=1e-12, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "c", float(self.c))
        if len(self.a) != len(self.b):
            raise ValueError("a and b must have the same length")
        top = self.sup_norm()
        if abs(top - 1.0) > self.tol:
            raise ValueError(f"profile must have sup norm 1, got {top!r}")

    @property
    def d(self) -> int:
        return len(self.a)

    def sup_norm(self) -> float:
        return max(abs(v) for v in (*self.a, *self.b, self.c))

    def step_bound(self) -> float:
        """``max_s max(|a_s - a_{s+1}|, |b_s - b_{s+1}|)`` with ``a_{d+1} = b_{d+1} = c``."""
        a = (*self.a, self.c)
        b = (*self.b, self.c)
        return max(max(abs(a[s] - a[s + 1]), abs(b[s] - b[s + 1])) for s in range(self.d))

    def to_json(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "c": self.c}


def heights(d: int) -> tuple[float, ...]:
    """Staircase steps ``1 - (s-1)/d`` for ``s = 1..d``."""
    return tuple((d - s + 1) / d for s in range(1, d + 1))


def staircase_profile(d: int) -> Profile:
    h = heights(d)
    return Profile(h, h, 0.0)


def y_profile(d: int) -> Profile:
    h = heights(d)
    return Profile(h, tuple(-v for v in h), 0.0)


def staircase_z(m: Sequence[int], k: int) -> PcpVector:
    """Staircase descending from 1 to 0 in steps of ``1/d`` across the blocks of ``m``."""
    m = _check_tuple(m, k, strict_tail=False)
    bounds = (0, *m)
    h = heights(len(m))
    return from_blocks(k, [(bounds[s], bounds[s + 1], h[s], h[s]) for s in range(len(m))])


def witness_x(m: Sequence[int], u: Profile, k: int, partition: Partition) -> Vector:
    """``sum a_s 1_{block_s & P} + sum b_s 1_{block_s & P^c} + c 1_{(m_d, k]}``."""
    m = _check_tuple(m, k, strict_tail=True)
    if len(m) != u.d:
        raise BadTuple(f"tuple length {len(m)} != profile length {u.d}")
    bounds = (0, *m)
    blocks = [(bounds[s], bounds[s + 1], u.a[s], u.b[s]) for s in range(u.d)]
    blocks.append((m[-1], k, u.c, u.c))
    return partition.blocks_vector(k, blocks)


def witness_y(m: Sequence[int], k: int, partition: Partition) -> Vector:
    """Descending staircase on ``P``, ascending from -1 on ``P^c``, zero tail."""
    return witness_x(m, y_profile(len(tuple(m))), k, partition)


def divergence_x(k: int, delta: float) -> PcpVector:
    """``e_1 + delta * sum_{i>=2} e_i``."""
    if k == 1:
        return PcpVector.constant(1, 1.0)
    return PcpVector(k, ((1, 1, 1.0, 1.0), (2, k, delta, delta)))


def unit_vector(k: int, i: int = 1, sign: float = 1.0) -> PcpVector:
    return from_blocks(k, [(i - 1, i, sign, sign)])


# the two-segment path -------------------------------------------------------


class TwoSegmentPath:
    """``(1,...,1) -> y(m) -> (-1,...,-1)``, traversed for ``t`` in ``[0, 1/2]`` then ``[1/2, 1]``.

    Every point of the path is constant on each block class and on the tail,
    so it is described by a profile. Each block, including the first, must
    meet both ``P`` and ``P^c``; otherwise the segments leave the sphere.
    """

    def __init__(self, m: Sequence[int], k: int, partition: Partition):
        self.m = _check_tuple(m, k, strict_tail=True)
        self.k = k
        self.partition = partition
        bounds = (0, *self.m)
        for s in range(len(self.m)):
            if not partition.meets_both(bounds[s], bounds[s + 1]):
                raise BadTuple(
                    f"block ({bounds[s]}, {bounds[s + 1]}] misses a partition class; the path would leave the sphere"
                )
        self._y = y_profile(len(self.m))

    @property
    def d(self) -> int:
        return len(self.m)

    def profile(self, t: float) -> Profile:
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        y = self._y
        if t <= 0.5:
            lam = 2.0 * t

            def f(v: float) -> float:
                return 1.0 + lam * (v - 1.0)
        else:
            lam = 2.0 * t - 1.0

            def f(v: float) -> float:
                return v + lam * (-1.0 - v)

        return Profile(tuple(f(v) for v in y.a), tuple(f(v) for v in y.b), f(y.c))

    def __call__(self, t: float) -> Vector:
        return witness_x(self.m, self.profile(t), self.k, self.partition)

    def tail_index(self) -> int:
        return self.k


def read_coord(v: Vector, i: int) -> float:
    if isinstance(v, PcpVector):
        return v.coord(i)
    return float(v[i - 1])


def read_profile(x: Vector, m: Sequence[int], k: int, partition: Partition) -> Profile:
    """Recover ``u`` from a vector of the form ``x(m, u, k)`` by one read per block."""
    bounds = (0, *m)
    a, b = [], []
    for s in range(len(m)):
        ip = partition.first_member(bounds[s], bounds[s + 1], True)
        ipc = partition.first_member(bounds[s], bounds[s + 1], False)
        a.append(read_coord(x, ip) if ip is not None else 0.0)
        b.append(read_coord(x, ipc) if ipc is not None else 0.0)
    return Profile(tuple(a), tuple(b), read_coord(x, k))


@dataclass
class TailRoot:
    t: float
    profile: Profile
    x: Vector
    tail_value: float
    sign: int
    iterations: int
    converged: bool


def find_tail_zero(F: SphereMap, path: TwoSegmentPath, tol: float = 1e-12, max_iter: int = 200) -> TailRoot:
    """Bisect for ``t`` where ``F`` vanishes on the tail ``(m_d, k]`` along ``path``.

    ``sign`` is ``+1`` if the tail of ``F(path(t))`` goes from positive to
    negative, ``-1`` if the opposite (that is, the root is for ``-F``).
    """
    i = path.tail_index()

    def tail(t: float) -> float:
        return read_coord(F(path(t)), i)

    g0, g1 = tail(0.0), tail(1.0)
    if g0 > 0 > g1:
        sign = 1
    elif g0 < 0 < g1:
        sign = -1
    else:
        raise NoSignChange(f"tail coordinate is {g0!r} at t=0 and {g1!r} at t=1")
    lo, hi = 0.0, 1.0
    t, val = 0.5, math.inf
    it = 0
    for it in range(1, max_iter + 1):
        t = 0.5 * (lo + hi)
        val = sign * tail(t)
        if abs(val) <= tol or hi - lo <= 2.0 * math.ulp(t):
            break
        if val > 0:
            lo = t
        else:
            hi = t
    x = path(t)
    return TailRoot(
        t=t,
        profile=read_profile(x, path.m, path.k, path.partition),
        x=x,
        tail_value=sign * val,
        sign=sign,
        iterations=it,
        converged=abs(val) <= tol,
    )
