import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import lemma32_dense
from spheremaps.analysis import (
    check_concentration,
    check_lemma32,
    check_separation,
    divergence_bound,
    divergence_source,
    divergence_table,
    integral_roundtrip,
    lemma32_sweep,
    lemma32_values,
    local_q_certificate,
    mazur_roundtrip,
    modulus_lower_bound,
    random_source,
    readouts,
    run_theorem_1_1,
    run_theorem_1_2,
    staircase_source,
)
from spheremaps.maps import (
    abs_wrapper,
    const_uniform_map,
    get_map,
    integral_homeo,
    normalize_map,
    symmetrize,
)
from spheremaps.norms import L1, L2, LrNorm
from spheremaps.reports import HypothesisViolated, InequalityReport
from spheremaps.vectors import PcpVector, sup_distance, to_dense
from spheremaps.witnesses import (
    EVENS,
    ODDS,
    BadTuple,
    InterlacedPair,
    Profile,
    build_growth_set,
    greedy_partition,
    staircase_profile,
    witness_x,
)

G1 = build_growth_set(L1, EVENS, 1, 0.5, 5)


def test_modulus_of_constant_map_is_zero():
    est = modulus_lower_bound(const_uniform_map(), 0.3, [random_source(30, 0.3, 50, seed=1), divergence_source(30, [0.3])])
    assert est.lower_bound == 0.0 and est.pairs_tried > 0


def test_modulus_divergence_pair():
    est = modulus_lower_bound(normalize_map(), 0.1, [divergence_source(101, [0.1])])
    assert est.lower_bound >= 10 / 11 - 1e-15
    x, y = est.witness_pair
    assert sup_distance(x, y) <= 0.1
    assert L1.eval(normalize_map()(x) - normalize_map()(y)) == est.lower_bound


def test_modulus_staircase_pairs():
    est = modulus_lower_bound(normalize_map(), 1.0, [staircase_source(G1, 1, 20)])
    assert est.lower_bound >= 0.5
    assert est.source.startswith("staircase")


def test_modulus_ignores_pairs_beyond_t():
    est = modulus_lower_bound(normalize_map(), 0.05, [divergence_source(101, [0.1])])
    assert est.pairs_tried == 0 and est.witness_pair is None
    with pytest.raises(ValueError):
        modulus_lower_bound(normalize_map(), 0.0, [])


def test_interlacing_zero_lambda():
    rep = check_lemma32(L1, EVENS, G1, (1,), (19,), [0.0], "P")
    assert rep.passed and rep.conclusion_value == 0.0


def test_interlacing_single_block_example():
    lam = 1 / 9  # |(0, 19] & evens| = 9
    rep = check_lemma32(L1, EVENS, G1, (1,), (19,), [lam], "P")
    assert rep.passed
    assert rep.hypothesis_values["premise_n"] == pytest.approx(1.0)
    assert rep.details["conclusion_n"] == pytest.approx(1 / 9)
    assert rep.threshold == 0.125


def test_interlacing_premise_failure_is_not_a_pass():
    rep = check_lemma32(L1, EVENS, G1, (1,), (19,), [50.0], "Pc")
    assert rep.verdict == "hypothesis_not_met"


def test_interlacing_rejects_bad_tuples():
    with pytest.raises(BadTuple):
        check_lemma32(L1, EVENS, G1, (19,), (1,), [1.0], "P")
    with pytest.raises(BadTuple):
        check_lemma32(L1, EVENS, G1, (2,), (19,), [1.0], "P")
    with pytest.raises(ValueError):
        check_lemma32(L1, EVENS, G1, (1,), (19,), [1.0], "Q")


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([1.0, 2.0, 3.0]),
    st.sampled_from(["evens", "odds", "greedy"]),
    st.integers(1, 3).flatmap(lambda d: st.lists(st.integers(1, 60), min_size=2 * d, max_size=2 * d, unique=True)),
    st.booleans(),
    st.data(),
)
def test_interlacing_values_match_dense_reference(r, kind, cuts, q_in_p, data):
    cuts = sorted(cuts)
    m, n = tuple(cuts[0::2]), tuple(cuts[1::2])
    lambdas = data.draw(st.lists(st.floats(-3, 3), min_size=len(m), max_size=len(m)))
    oracle = LrNorm(r)
    part = {"evens": EVENS, "odds": ODDS, "greedy": greedy_partition(oracle, 60)}[kind]
    got = lemma32_values(oracle, part, m, n, lambdas, "P" if q_in_p else "Pc")
    ref = lemma32_dense(r, part.contains, m, n, lambdas, q_in_p)
    keys = ("premise_n", "conclusion_n", "premise_m", "conclusion_m")
    for key, want in zip(keys, ref):
        assert got[key] == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("oracle", [L1, L2, LrNorm(3)], ids=lambda o: o.name)
@pytest.mark.parametrize("eps", [0.25, 0.5, 1.0])
def test_interlacing_sweep_has_no_failures(oracle, eps):
    rep = lemma32_sweep(oracle, 2, eps, trials=200, seed=3)
    assert rep.passed, rep.details["first_failure"]


def _dense_normalize(x):
    return x / np.sum(np.abs(x))


def test_separation_normalize_example():
    pair = InterlacedPair((1,), (19,), 362)
    rep = check_separation(normalize_map(), pair, staircase_profile(1))
    assert rep.passed
    assert rep.conclusion_value == pytest.approx(36 / 19, abs=1e-12)
    xm = np.zeros(362)
    xm[0] = 1.0
    xn = np.zeros(362)
    xn[:19] = 1.0
    dense = float(np.sum(np.abs(_dense_normalize(xm) - _dense_normalize(xn))))
    assert rep.conclusion_value == pytest.approx(dense, abs=1e-12)
    assert rep.block_readouts["gamma_m"] == 0.0
    assert max(rep.details["items"].values()) <= rep.details["items_bound"] + 1e-12


def test_separation_integral_example():
    rep = check_separation(integral_homeo(), InterlacedPair((1,), (19,), 362), staircase_profile(1))
    assert rep.passed and rep.conclusion_value > 0.5


def test_separation_constant_map_violates_tail():
    with pytest.raises(HypothesisViolated) as info:
        check_separation(const_uniform_map(), InterlacedPair((1,), (19,), 362), staircase_profile(1))
    assert info.value.hypothesis == "tail_zero"
    rep = info.value.report
    assert rep.verdict == "hypothesis_not_met"
    assert rep.block_readouts["gamma_m"] == pytest.approx(1 / 362)


def test_separation_reports_failed_growth_assumption():
    # (2, 4) is not drawn from any growth set
    rep = check_separation(normalize_map(), InterlacedPair((2,), (4,), 6), staircase_profile(1), on_violation="report")
    assert rep.verdict == "hypothesis_not_met"
    assert "growth_assumption" in rep.details["failed_hypotheses"]


def test_separation_invariant_under_abs_and_exact_symmetrize():
    pair = InterlacedPair((2,), (4,), 6)
    u = staircase_profile(1)
    base = check_separation(normalize_map(), pair, u, on_violation="report")
    for G in (abs_wrapper(normalize_map()), symmetrize(normalize_map(), "exact")):
        rep = check_separation(G, pair, u, on_violation="report")
        assert rep.conclusion_value == pytest.approx(base.conclusion_value, abs=1e-9)
        assert rep.verdict == base.verdict


def test_readouts_on_dense_partition():
    part = greedy_partition(L1, 50)
    u = Profile((0.5,), (-1.0,), 0.0)
    x = witness_x((10,), u, 20, part)
    r = readouts(x, (10,), 20, part)
    assert r["alpha"] == [0.5] and r["beta"] == [-1.0] and r["gamma"] == 0.0
    assert r["spread"] == 0.0


@pytest.mark.parametrize("name", ["normalize", "integral"])
@pytest.mark.parametrize("d", [1, 2])
def test_staircase_runner(name, d):
    rep = run_theorem_1_1(get_map(name), d)
    assert rep.passed
    assert rep.inputs["k"] == 19 ** (2 * d - 1) + 1
    assert rep.details["margin_over_1_minus_eps"] > 1e-9
    assert all(row["domain_distance"] == pytest.approx(1 / d, abs=1e-15) for row in rep.details["pairs"])


def test_staircase_runner_pipeline_small():
    rep = run_theorem_1_1(normalize_map(), 1, pipeline=True)
    assert rep.passed and rep.inputs["pipeline"]


def test_staircase_runner_constant_map_is_not_a_pass():
    rep = run_theorem_1_1(const_uniform_map(), 1)
    assert rep.verdict == "hypothesis_not_met"
    assert rep.hypothesis_values["support_preserving"] is False


def test_path_root_runner_normalize_l1():
    rep = run_theorem_1_2(normalize_map(), 1)
    assert rep.passed
    assert rep.inputs["k"] == 362 and rep.inputs["m"] == [19] and rep.inputs["n"] == [361]
    assert rep.details["t_root"] == pytest.approx(0.5, abs=1e-9)
    u = Profile(**rep.details["profile"])
    xm = to_dense(witness_x((19,), u, 362, EVENS))
    xn = to_dense(witness_x((361,), u, 362, EVENS))
    dense = float(np.sum(np.abs(_dense_normalize(xm) - _dense_normalize(xn))))
    assert rep.conclusion_value == pytest.approx(dense, abs=1e-10)
    assert rep.conclusion_value == pytest.approx(2 * (1 - 19 / 361), abs=1e-10)


def test_path_root_runner_normalize_l2():
    rep = run_theorem_1_2(normalize_map(L2), 1)
    assert rep.passed and rep.details["a"] == 361


def test_path_root_runner_rejects_even_maps():
    with pytest.raises(HypothesisViolated, match="F\\(1"):
        run_theorem_1_2(get_map("phi:t*t"), 1)


def test_path_root_runner_rejects_positive_only_maps():
    with pytest.raises(HypothesisViolated):
        run_theorem_1_2(integral_homeo(), 1)


def test_concentration_constant_uniform_is_branch_b():
    rep = check_concentration(const_uniform_map(), 1, 0.5)
    assert rep.details["branch"] == "B" and rep.passed
    assert rep.conclusion_value <= 1e-12
    assert rep.inputs["a"] == 66


def test_concentration_abs_normalize_is_branch_a():
    rep = check_concentration(abs_wrapper(normalize_map()), 1, 0.5)
    assert rep.details["branch"] == "A"
    assert rep.verdict == "hypothesis_not_met"
    w = rep.details["witness"]
    assert w["domain_distance"] <= 1.0
    assert w["image_distance"] > 0.5 / 8
    m1, n1 = rep.inputs["m"][0], 66**2
    assert w["image_distance"] == pytest.approx(2 * (1 - m1 / n1), abs=1e-9)


def test_concentration_shifted_phi_map_is_consistent():
    rep = check_concentration(get_map("phi:3+t"), 1, 0.5, seed=4)
    if rep.details["branch"] == "A":
        assert rep.details["witness"]["image_distance"] > rep.threshold
        assert rep.verdict == "hypothesis_not_met"
    else:
        assert rep.passed == (rep.conclusion_value <= 0.5)


def test_concentration_rejects_non_positive_image():
    with pytest.raises(HypothesisViolated):
        check_concentration(get_map("phi:t-0.5"), 1, 0.5)


def test_local_q_certificate():
    rep = local_q_certificate(const_uniform_map(), 1, 0.5, 0.1)
    assert rep.checker == "local_property_q"
    assert rep.hypothesis_values["modulus_threshold"] == pytest.approx(0.05)
    assert rep.details["branch"] == "B"


def test_divergence_table():
    reps = divergence_table(normalize_map(), [10**2, 10**6], [0.1, 0.01])
    assert all(r.passed for r in reps)
    assert reps[-1].conclusion_value >= 0.99
    assert divergence_bound(101, 0.1) == pytest.approx(10 / 11)


def test_roundtrips():
    assert integral_roundtrip(16, 50, seed=0).passed
    assert mazur_roundtrip(1.5, 16, 50, seed=0).passed


def test_report_json_roundtrip():
    rep = run_theorem_1_1(normalize_map(), 1)
    obj = json.loads(rep.to_json())
    assert obj["verdict"] == "pass" and obj["checker"] == "theorem_1_1"
    with pytest.raises(ValueError):
        InequalityReport("x", {}, {}, 0.0, 0.0, 0.0, "maybe")


def test_pcp_and_dense_images_agree_on_witness():
    x = witness_x((19,), staircase_profile(1), 362, EVENS)
    F = normalize_map()
    assert np.allclose(to_dense(F(x)), F(to_dense(x)), atol=1e-15)
    assert isinstance(F(x), PcpVector)
