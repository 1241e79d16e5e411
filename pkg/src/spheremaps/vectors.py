"""Finite-dimensional vectors in dense and piecewise-constant-with-parity form.

Coordinates are indexed 1..k throughout, as in the basis (e_i). A
``PcpVector`` stores a list of segments ``(lo, hi, val_even, val_odd)``:
coordinate ``i`` in ``[lo, hi]`` equals ``val_even`` when ``i`` is even and
``val_odd`` otherwise. Every witness vector built on the even/odd partition
fits in a handful of segments, so dimensions in the hundreds of millions cost
nothing.

Dense vectors are plain 1-D ``numpy`` float64 arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

DENSE_LIMIT = 10**7

Segment = tuple[int, int, float, float]


class DimensionTooLarge(ValueError):
    pass


class DimMismatch(ValueError):
    pass


def parity_counts(lo: int, hi: int) -> tuple[int, int]:
    """Number of (even, odd) integers in ``[lo, hi]``."""
    if hi < lo:
        return 0, 0
    n_even = hi // 2 - (lo - 1) // 2
    return n_even, (hi - lo + 1) - n_even


def as_dense(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite coordinates")
    return arr


class _Builder:
    """Left-to-right greedy segment builder; defines the canonical form.

    Each segment is extended as far as the coordinates keep matching its
    (even, odd) pattern. A singleton segment stores its single value in both
    slots so that equal vectors always get equal segment lists.
    """

    def __init__(self) -> None:
        self.out: list[list] = []

    def push(self, lo: int, hi: int, ve: float, vo: float) -> None:
        # -0.0 and 0.0 compare equal; store +0.0 so serialization is stable
        ve = ve + 0.0
        vo = vo + 0.0
        while lo <= hi:
            val = ve if lo % 2 == 0 else vo
            if self.out:
                cur = self.out[-1]
                if cur[0] == cur[1]:
                    # single-element segment: the next coordinate fixes the other parity
                    if lo % 2 == 0:
                        cur[2] = val
                    else:
                        cur[3] = val
                    cur[1] = lo
                    lo += 1
                    continue
                if (cur[2] if lo % 2 == 0 else cur[3]) == val:
                    if lo == hi:
                        cur[1] = lo
                        return
                    nxt = vo if lo % 2 == 0 else ve
                    if (cur[3] if lo % 2 == 0 else cur[2]) == nxt:
                        cur[1] = hi
                        return
                    cur[1] = lo
                    lo += 1
                    continue
            if lo == hi:
                self.out.append([lo, lo, val, val])
            else:
                self.out.append([lo, hi, ve, vo])
            return

    def segments(self) -> tuple[Segment, ...]:
        return tuple((int(a), int(b), float(c), float(d)) for a, b, c, d in self.out)


@dataclass(frozen=True)
class PcpVector:
    """Piecewise-constant-with-parity vector on ``{1, ..., dim}``.

    The constructor validates coverage and stores the canonical form, so two
    ``PcpVector`` objects describing the same coordinates compare equal.
    """

    dim: int
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        dim = int(self.dim)
        if dim < 1:
            raise ValueError("dim must be positive")
        expected = 1
        b = _Builder()
        for seg in self.segments:
            lo, hi, ve, vo = seg
            lo, hi = int(lo), int(hi)
            if lo != expected or hi < lo or hi > dim:
                raise ValueError(f"segments must tile [1, {dim}] in order; bad segment {seg}")
            if not (math.isfinite(ve) and math.isfinite(vo)):
                raise ValueError("segment values must be finite")
            b.push(lo, hi, float(ve), float(vo))
            expected = hi + 1
        if expected != dim + 1:
            raise ValueError(f"segments cover [1, {expected - 1}], expected [1, {dim}]")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "segments", b.segments())

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, dim: int, value: float) -> PcpVector:
        return cls(dim, ((1, dim, value, value),))

    @classmethod
    def from_dense(cls, x) -> PcpVector:
        arr = as_dense(x)
        k = arr.size
        # collapse runs of equal consecutive values first; the builder handles parity
        cuts = np.flatnonzero(arr[1:] != arr[:-1]) + 1
        starts = np.concatenate(([0], cuts))
        ends = np.concatenate((cuts, [k]))
        b = _Builder()
        for s, e in zip(starts.tolist(), ends.tolist()):
            v = float(arr[s])
            b.push(s + 1, e, v, v)
        return cls(k, b.segments())

    # conversion -------------------------------------------------------------

    def materialize(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise DimensionTooLarge(f"dim {self.dim} exceeds dense limit {DENSE_LIMIT}")
        out = np.empty(self.dim, dtype=np.float64)
        for lo, hi, ve, vo in self.segments:
            # index i (1-based) sits at position i-1
            start = lo - 1
            first_even = lo if lo % 2 == 0 else lo + 1
            out[start:hi] = vo
            out[first_even - 1 : hi : 2] = ve
        return out

    def to_json(self) -> dict:
        return {"dim": self.dim, "segments": [list(s) for s in self.segments]}

    @classmethod
    def from_json(cls, obj: Union[dict, str]) -> PcpVector:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["dim"]), tuple(tuple(s) for s in obj["segments"]))

    # queries ----------------------------------------------------------------

    def coord(self, i: int) -> float:
        if not 1 <= i <= self.dim:
            raise IndexError(i)
        lo_idx, hi_idx = 0, len(self.segments) - 1
        while lo_idx < hi_idx:
            mid = (lo_idx + hi_idx) // 2
            if self.segments[mid][1] < i:
                lo_idx = mid + 1
            else:
                hi_idx = mid
        _, _, ve, vo = self.segments[lo_idx]
        return ve if i % 2 == 0 else vo

    def pieces(self) -> Iterable[tuple[float, int]]:
        """Yield ``(value, multiplicity)`` per segment and parity class present."""
        for lo, hi, ve, vo in self.segments:
            n_even, n_odd = parity_counts(lo, hi)
            if n_even:
                yield ve, n_even
            if n_odd:
                yield vo, n_odd

    def values_on(self, lo: int, hi: int, parity: str | None = None) -> set[float]:
        """Distinct values taken on ``[lo, hi]``; ``parity`` restricts to 'even' or 'odd'."""
        vals: set[float] = set()
        for slo, shi, ve, vo in self.segments:
            a, b = max(lo, slo), min(hi, shi)
            if a > b:
                continue
            n_even, n_odd = parity_counts(a, b)
            if n_even and parity in (None, "even"):
                vals.add(ve)
            if n_odd and parity in (None, "odd"):
                vals.add(vo)
        return vals

    def sup_norm(self) -> float:
        return max(abs(v) for v, _ in self.pieces())

    # arithmetic -------------------------------------------------------------

    def map(self, f: Callable[[float], float]) -> PcpVector:
        return PcpVector(self.dim, tuple((lo, hi, float(f(ve)), float(f(vo))) for lo, hi, ve, vo in self.segments))

    def scale(self, c: float) -> PcpVector:
        return self.map(lambda t: c * t)

    def abs(self) -> PcpVector:
        return self.map(abs)

    def __neg__(self) -> PcpVector:
        return self.map(lambda t: -t)

    def combine(self, other: PcpVector, op: Callable[[float, float], float]) -> PcpVector:
        """Coordinate-wise ``op(self_i, other_i)`` computed on merged breakpoints."""
        if other.dim != self.dim:
            raise DimMismatch(f"{self.dim} != {other.dim}")
        out = []
        for lo, hi, (ae, ao), (be, bo) in _overlay(self, other):
            out.append((lo, hi, op(ae, be), op(ao, bo)))
        return PcpVector(self.dim, tuple(out))

    def __add__(self, other: PcpVector) -> PcpVector:
        return self.combine(other, lambda a, b: a + b)

    def __sub__(self, other: PcpVector) -> PcpVector:
        return self.combine(other, lambda a, b: a - b)

    def restrict(self, lo: int, hi: int) -> PcpVector:
        """Zero every coordinate outside ``[lo, hi]``."""
        mask = PcpVector(self.dim, _interval_segments(self.dim, lo, hi))
        return self.combine(mask, lambda a, m: a * m)


def _interval_segments(dim: int, lo: int, hi: int) -> tuple[Segment, ...]:
    lo, hi = max(lo, 1), min(hi, dim)
    segs: list[Segment] = []
    if lo > hi:
        return ((1, dim, 0.0, 0.0),)
    if lo > 1:
        segs.append((1, lo - 1, 0.0, 0.0))
    segs.append((lo, hi, 1.0, 1.0))
    if hi < dim:
        segs.append((hi + 1, dim, 0.0, 0.0))
    return tuple(segs)


def _overlay(u: PcpVector, v: PcpVector):
    """Walk the common refinement of two segment lists."""
    i = j = 0
    pos = 1
    su, sv = u.segments, v.segments
    while pos <= u.dim:
        ulo, uhi, ue, uo = su[i]
        vlo, vhi, ve, vo = sv[j]
        hi = min(uhi, vhi)
        yield pos, hi, (ue, uo), (ve, vo)
        pos = hi + 1
        if uhi == hi:
            i += 1
        if vhi == hi:
            j += 1


@dataclass(frozen=True)
class SupportSet:
    dim: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(not 1 <= m <= self.dim for m in self.members):
            raise ValueError("support members must lie in [1, dim]")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i: object) -> bool:
        return i in set(self.members)

    def __iter__(self):
        return iter(self.members)


Vector = Union[np.ndarray, PcpVector]


def support(v: Vector, tol: float = 0.0) -> SupportSet:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    x = v.materialize() if isinstance(v, PcpVector) else as_dense(v)
    idx = np.flatnonzero(np.abs(x) > tol) + 1
    return SupportSet(x.size, tuple(int(i) for i in idx))


def support_indicator(v: PcpVector, tol: float = 0.0) -> PcpVector:
    """0/1 ``PcpVector`` marking ``|v_i| > tol``; no materialization."""
    return v.map(lambda t: 1.0 if abs(t) > tol else 0.0)


def support_size(v: Vector, tol: float = 0.0) -> int:
    if isinstance(v, PcpVector):
        return sum(n for val, n in v.pieces() if abs(val) > tol)
    return int(np.count_nonzero(np.abs(as_dense(v)) > tol))


def same_support(u: Vector, v: Vector, tol: float = 0.0) -> bool:
    if isinstance(u, PcpVector) and isinstance(v, PcpVector):
        return support_indicator(u, tol) == support_indicator(v, tol)
    a = u.materialize() if isinstance(u, PcpVector) else as_dense(u)
    b = v.materialize() if isinstance(v, PcpVector) else as_dense(v)
    if a.size != b.size:
        raise DimMismatch(f"{a.size} != {b.size}")
    return bool(np.array_equal(np.abs(a) > tol, np.abs(b) > tol))


def sup_distance(u: Vector, v: Vector) -> float:
    """max_i |u_i - v_i|, segment-wise when both inputs are ``PcpVector``."""
    if isinstance(u, PcpVector) and isinstance(v, PcpVector):
        if u.dim != v.dim:
            raise DimMismatch(f"{u.dim} != {v.dim}")
        best = 0.0
        for lo, hi, (ue, uo), (ve, vo) in _overlay(u, v):
            n_even, n_odd = parity_counts(lo, hi)
            if n_even:
                best = max(best, abs(ue - ve))
            if n_odd:
                best = max(best, abs(uo - vo))
        return best
    a = u.materialize() if isinstance(u, PcpVector) else as_dense(u)
    b = v.materialize() if isinstance(v, PcpVector) else as_dense(v)
    if a.size != b.size:
        raise DimMismatch(f"{a.size} != {b.size}")
    return float(np.max(np.abs(a - b)))


def to_dense(v: Vector) -> np.ndarray:
    return v.materialize() if isinstance(v, PcpVector) else as_dense(v)


def dim_of(v: Vector) -> int:
    return v.dim if isinstance(v, PcpVector) else int(np.asarray(v).size)


def from_blocks(dim: int, blocks: Sequence[tuple[int, int, float, float]]) -> PcpVector:
    """Build from blocks ``(lo_exclusive, hi, val_even, val_odd)`` meaning ``(lo, hi]``.

    Blocks must be increasing and non-overlapping; gaps are zero.
    """
    segs: list[Segment] = []
    pos = 1
    for lo, hi, ve, vo in blocks:
        if lo + 1 > hi:
            continue
        if lo + 1 < pos or hi > dim:
            raise ValueError(f"block ({lo}, {hi}] out of order or out of range")
        if lo + 1 > pos:
            segs.append((pos, lo, 0.0, 0.0))
        segs.append((lo + 1, hi, ve, vo))
        pos = hi + 1
    if pos <= dim:
        segs.append((pos, dim, 0.0, 0.0))
    return PcpVector(dim, tuple(segs))


def dumps_dense(x) -> str:
    return json.dumps([float(t) for t in as_dense(x)])
