"""Deliberately broken maps that claim properties they do not have."""

from dataclasses import replace

import numpy as np

from spheremaps.maps import (
    EQUIVARIANT,
    NONINCREASING,
    STEP,
    SUPPORT,
    SphereMap,
    const_uniform_map,
    normalize_map,
    phi_map,
)

K = 6


def non_step() -> SphereMap:
    # phi_1(t) = t, phi_2(t) = t^2: equal inputs give unequal outputs
    phis = [lambda t: t, lambda t: t * t] + [lambda t: t] * (K - 2)
    return replace(phi_map(phis, k=K, name="broken-non-step"), flags=frozenset({STEP}))


def non_support() -> SphereMap:
    return replace(const_uniform_map(), name="broken-non-support", flags=frozenset({SUPPORT}))


def support_growing() -> SphereMap:
    return replace(phi_map(lambda t: 1.0 + 0.0 * t, name="broken-support-growth"), flags=frozenset({NONINCREASING}))


def non_equivariant() -> SphereMap:
    base = normalize_map()

    def dense(x: np.ndarray) -> np.ndarray:
        y = base.dense_fn(x)
        return y[[1, 0, *range(2, x.size)]]

    return SphereMap("broken-swapped", base.target, dense, None, frozenset({EQUIVARIANT}))


BROKEN = {
    "non_step": (non_step, STEP),
    "non_support": (non_support, SUPPORT),
    "support_growing": (support_growing, NONINCREASING),
    "non_equivariant": (non_equivariant, EQUIVARIANT),
}
