import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import lr_norm
from spheremaps.norms import (
    L1,
    L2,
    LINF,
    LrNorm,
    NormOracle,
    NotBlockSequence,
    check_block_estimates,
    check_unconditional,
    get_oracle,
    growth_base,
    psi,
    psi_partition,
)
from spheremaps.vectors import PcpVector, SupportSet, from_blocks
from spheremaps.witnesses import EVENS, ODDS


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 3.0])
def test_pcp_eval_matches_reference(r):
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.choice([0.0, 0.3, -0.7, 1.0], size=int(rng.integers(1, 60)))
        v = PcpVector.from_dense(x)
        assert LrNorm(r).eval(v) == pytest.approx(lr_norm(x.tolist(), r), rel=1e-13)
        assert LrNorm(r).eval(x) == pytest.approx(lr_norm(x.tolist(), r), rel=1e-13)


def test_psi_values():
    assert psi(L1, 7) == 7.0
    assert psi(L2, 4) == 2.0
    assert psi(LrNorm(3), 10**6) == 100.0
    assert psi(LINF, 10**9) == 1.0
    assert psi(L1, 0) == 0.0


def test_l1_norm_of_huge_pcp_is_exact():
    k = 10**15
    v = PcpVector(k, ((1, k, 1.0, 0.0),))
    assert L1.eval(v) == k // 2


def test_generic_oracle_psi_is_memoized():
    calls = []

    def f(x):
        calls.append(x.size)
        return float(np.sum(np.abs(x)))

    X = NormOracle("custom-l1", f)
    assert X.psi(5) == 5.0 and X.psi(5) == 5.0
    assert calls == [5]


def test_psi_partition_parity_and_mask():
    assert psi_partition(L1, EVENS, 7) == 3.0
    assert psi_partition(L1, ODDS, 7) == 3.0
    mask = np.array([True, False, True, True])
    assert psi_partition(L1, mask, 4) == 1.0
    assert psi_partition(L1, SupportSet(4, (1, 3, 4)), 4) == 1.0


@pytest.mark.parametrize("oracle", [L1, L2, LrNorm(3)])
def test_block_estimates_hold_for_lr(oracle):
    rng = np.random.default_rng(1)
    blocks = []
    for lo, hi in [(0, 3), (3, 4), (6, 10)]:
        blocks.append(from_blocks(12, [(lo, hi, rng.normal(), rng.normal())]))
    assert check_block_estimates(oracle, blocks).passed


def test_block_estimates_catch_a_false_claim():
    # l1 claiming a lower 1-estimate is fine; claiming an upper 2-estimate is not
    wrong = NormOracle("l1-claims-upper-2", lambda x: float(np.sum(np.abs(x))), block_q=2.0, block_p=2.0)
    blocks = [from_blocks(4, [(0, 1, 1.0, 1.0)]), from_blocks(4, [(2, 3, 1.0, 1.0)])]
    assert check_block_estimates(wrong, blocks).verdict == "fail"


def test_overlapping_blocks_rejected():
    a = from_blocks(4, [(0, 2, 1.0, 1.0)])
    b = from_blocks(4, [(1, 3, 1.0, 1.0)])
    with pytest.raises(NotBlockSequence):
        check_block_estimates(L1, [a, b])


def test_unconditional_spot_check():
    assert check_unconditional(L2, 10, trials=200, seed=0).passed
    # a weighted norm that is not normalized on the basis
    skew = NormOracle("skew", lambda x: float(np.sum(np.abs(x) * np.arange(1, x.size + 1))))
    assert not check_unconditional(skew, 10, trials=20, seed=0).passed


def test_growth_base_closed_form():
    assert growth_base(1, 0.5) == 19
    assert growth_base(2, 0.5) == 361
    assert growth_base(1, 0.25) == 35
    assert growth_base(1, 0.5, 32, 2) == 66
    assert growth_base(1.5, 0.5) == math.ceil(19**1.5)


@pytest.mark.parametrize("spec,name", [("l1", "l1"), ("L2", "l2"), ("lr:1.5", "lr:1.5"), ("linf", "linf")])
def test_get_oracle(spec, name):
    assert get_oracle(spec).name == name


@pytest.mark.parametrize("spec", ["l0", "lr:abc", "lr:0.5"])
def test_get_oracle_rejects(spec):
    with pytest.raises(ValueError):
        get_oracle(spec)


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=30), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_norm_is_absolutely_homogeneous(xs, r):
    x = np.array(xs)
    X = LrNorm(r)
    assert X.eval(-2.5 * x) == pytest.approx(2.5 * X.eval(x), rel=1e-12, abs=1e-300)
