"""Exact checks of separation and concentration inequalities for maps between
the unit spheres of ``l_inf^k`` and ``l_r^k``-like spaces."""

__version__ = "0.1.0"

from .vectors import DENSE_LIMIT, PcpVector, SupportSet, from_blocks, sup_distance, support, to_dense
from .norms import L1, L2, LINF, LrNorm, NormOracle, get_oracle, psi, psi_partition
from .maps import (
    SphereMap,
    abs_wrapper,
    const_uniform_map,
    get_map,
    integral_homeo,
    integral_homeo_inverse,
    mazur_inverse,
    mazur_map,
    normalize_map,
    phi_map,
    symmetrize,
)
from .witnesses import (
    EVENS,
    ODDS,
    GrowthSet,
    InterlacedPair,
    Partition,
    Profile,
    TwoSegmentPath,
    build_growth_set,
    enumerate_interlaced,
    find_tail_zero,
    greedy_partition,
    staircase_z,
    witness_x,
    witness_y,
)
from .analysis import (
    check_concentration,
    check_lemma32,
    check_separation,
    divergence_table,
    local_q_certificate,
    modulus_lower_bound,
    run_theorem_1_1,
    run_theorem_1_2,
)
from .reports import HypothesisViolated, InequalityReport, ModulusEstimate
