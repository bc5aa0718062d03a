import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import H_SMALL
from markov_jscd.ldpc_code import (
    DegreeDistribution,
    InfeasibleRateError,
    TannerGraph,
    build_code,
    code_rate,
    degree_targets,
    derive_check_distribution,
    encode,
    girth,
    gf2_rank,
    lambda_A,
    lambda_B,
    make_systematic,
    peg_construct,
    quantize_degrees,
    syndrome,
)


def brute_rank(H):
    """GF(2) rank as log2 of the row-space size, by enumerating row combinations."""
    H = np.asarray(H, dtype=np.uint8)
    span = {tuple(np.zeros(H.shape[1], dtype=np.uint8))}
    for row in H:
        span |= {tuple(np.bitwise_xor(np.array(v, dtype=np.uint8), row)) for v in span}
    return int(np.log2(len(span)))


@pytest.fixture(scope="module")
def code_1024():
    return build_code(1024, 0.5, lambda_A(), 5)


# -- degree distributions --------------------------------------------------

def test_named_distributions():
    a, b = lambda_A(), lambda_B()
    assert a.as_dict() == {2: 0.25105, 3: 0.30938, 4: 0.00104, 10: 0.43853}
    assert b.as_dict() == {2: 0.3127, 3: 0.3582, 7: 0.04, 10: 0.2891}
    assert sum(a.fractions) == pytest.approx(1.0, abs=1e-12)
    assert sum(b.fractions) == pytest.approx(1.0, abs=1e-12)
    assert a.max_degree == 10 and b.max_degree == 10


def test_distribution_validation():
    with pytest.raises(ValueError):
        DegreeDistribution((2, 3), (0.5, 0.4))
    with pytest.raises(ValueError):
        DegreeDistribution((2, 2), (0.5, 0.5))


@pytest.mark.parametrize("lam, rate, inv_mean, avg, degrees", [
    (lambda_A(), 0.5, 0.25105 / 2 + 0.30938 / 3 + 0.00104 / 4 + 0.43853 / 10, 7.33, (7, 8)),
    (lambda_B(), 0.32, 0.3127 / 2 + 0.3582 / 3 + 0.04 / 7 + 0.2891 / 10, 4.74, (4, 5)),
])
def test_derive_check_distribution(lam, rate, inv_mean, avg, degrees):
    # direct summation of lambda_i / i
    assert lam.inverse_mean == pytest.approx(inv_mean, abs=1e-12)
    rho = derive_check_distribution(lam, rate)
    assert rho.degrees == degrees
    assert rho.average_node_degree == pytest.approx(avg, abs=0.005)
    assert rho.inverse_mean == pytest.approx((1 - rate) * lam.inverse_mean, abs=1e-12)


def test_derive_check_distribution_regular():
    rho = derive_check_distribution(DegreeDistribution((3,), (1.0,)), 0.5)
    assert rho.as_dict() == {6: 1.0}


def test_derive_check_distribution_infeasible():
    with pytest.raises(InfeasibleRateError):
        derive_check_distribution(DegreeDistribution((1,), (1.0,)), 0.2)


def test_quantize_degrees_largest_remainder():
    lam = lambda_A()
    seq = quantize_degrees(lam, 4096)
    assert seq.size == 4096 and np.all(np.diff(seq) >= 0)
    fr = lam.node_fractions()
    for d, count in degree_targets(lam, 4096).items():
        assert abs(count - 4096 * fr[d]) < 1


# -- PEG ----------------------------------------------------------------------

def test_peg_regular_2_4_small():
    lam = DegreeDistribution((2,), (1.0,))
    rho = DegreeDistribution((4,), (1.0,))
    g = peg_construct(8, 4, lam, rho, np.random.default_rng(0))
    assert np.all(g.var_degrees == 2)
    assert np.all(g.chk_degrees == 4)
    # 8 degree-2 variables need 8 check pairs but only C(4,2) = 6 exist,
    # so some pair repeats and a 4-cycle is forced
    assert girth(g) == 4


def test_peg_regular_2_3_reaches_girth_six():
    # 6 variables over 4 checks: PEG must use every check pair once (K4)
    lam = DegreeDistribution((2,), (1.0,))
    g = peg_construct(6, 4, lam, DegreeDistribution((3,), (1.0,)), np.random.default_rng(0))
    assert np.all(g.chk_degrees == 3)
    assert girth(g) == 6


def test_girth_oracle_on_known_cycles():
    # a 4-cycle: two variables sharing the same two checks
    assert girth(TannerGraph.from_dense([[1, 1], [1, 1]])) == 4
    assert girth(TannerGraph.from_dense([[1, 0], [0, 1]])) == float("inf")


def test_peg_degree_spectrum_4096():
    lam = lambda_A()
    g = peg_construct(4096, 2048, lam, derive_check_distribution(lam, 0.5), np.random.default_rng(1))
    counts = np.bincount(g.var_degrees, minlength=11)
    for d, target in degree_targets(lam, 4096).items():
        assert abs(counts[d] - target) <= 1
    assert g.var_degrees.sum() == g.chk_degrees.sum() == g.num_edges
    assert set(np.unique(g.chk_degrees)) <= {7, 8}
    assert g.is_well_formed()


def test_peg_deterministic():
    lam = lambda_A()
    rho = derive_check_distribution(lam, 0.5)
    g1 = peg_construct(256, 128, lam, rho, np.random.default_rng(9))
    g2 = peg_construct(256, 128, lam, rho, np.random.default_rng(9))
    assert np.array_equal(g1.edge_check, g2.edge_check)
    assert np.array_equal(g1.edge_var, g2.edge_var)


def test_peg_girth_beats_four_on_moderate_code():
    lam = DegreeDistribution((3,), (1.0,))
    g = peg_construct(96, 48, lam, DegreeDistribution((6,), (1.0,)), np.random.default_rng(2))
    assert girth(g) >= 6


# -- Tanner graph -------------------------------------------------------------

def test_tanner_graph_roundtrip_and_parallel_edges():
    g = TannerGraph.from_dense(H_SMALL)
    assert np.array_equal(g.to_dense(), H_SMALL)
    assert g.check_neighbors(1).tolist() == [0, 1, 3]
    assert g.var_neighbors(0).tolist() == [0, 1]
    with pytest.raises(ValueError):
        TannerGraph(2, 1, np.array([0, 0]), np.array([1, 1]))


# -- systematic form and encoding -----------------------------------------------

def test_make_systematic_hand_example():
    code = make_systematic(TannerGraph.from_dense(H_SMALL))
    assert code.rank == 2 and code.k == 2
    assert (code.info_positions + 1).tolist() == [1, 2]
    assert encode(code, [1, 0]).tolist() == [1, 0, 1, 1]
    assert encode(code, [0, 0]).tolist() == [0, 0, 0, 0]


def test_duplicated_row_rank():
    rng = np.random.default_rng(3)
    H = rng.integers(0, 2, (3, 8)).astype(np.uint8)
    H = np.vstack([H, H[1]])
    assert brute_rank(H) == gf2_rank(H)
    g = TannerGraph.from_dense(H)
    code = make_systematic(g)
    r = brute_rank(H)
    assert code.k == 8 - r
    assert code_rate(g) == pytest.approx(1 - r / 8)


def test_duplicated_row_rank_full_rank_base():
    H = np.array([[1, 1, 0, 1, 0, 0, 0, 0],
                  [0, 1, 1, 0, 1, 0, 0, 0],
                  [1, 0, 0, 0, 0, 1, 1, 0],
                  [0, 1, 1, 0, 1, 0, 0, 0]], dtype=np.uint8)
    g = TannerGraph.from_dense(H)
    assert make_systematic(g).k == 5
    assert code_rate(g) == 0.625


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_rank_matches_enumeration(m, n, seed):
    H = np.random.default_rng(seed).integers(0, 2, (m, n))
    assert gf2_rank(H) == brute_rank(H)


def test_code_rate_edge_cases(code_1024):
    assert code_rate(TannerGraph(4, 0, np.zeros(0), np.zeros(0))) == 1.0
    g = code_1024.graph
    if code_1024.full_rank:
        assert code_rate(g) == 1 - g.m / g.n
    assert 0 < code_rate(g) <= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_encode_then_syndrome_is_zero(code_1024, seed):
    u = np.random.default_rng(seed).integers(0, 2, code_1024.k)
    c = encode(code_1024, u)
    assert not syndrome(code_1024.graph, c).any()
    assert np.array_equal(c[code_1024.info_positions], u)


def test_encode_exhaustive_small():
    H = np.array([[1, 1, 0, 1, 1, 0, 0],
                  [1, 0, 1, 1, 0, 1, 0],
                  [0, 1, 1, 1, 0, 0, 1]])
    code = make_systematic(TannerGraph.from_dense(H))
    words = {tuple(encode(code, u)) for u in itertools.product([0, 1], repeat=code.k)}
    # the code is exactly the null space of H
    null = {w for w in itertools.product([0, 1], repeat=7) if not (H @ np.array(w) % 2).any()}
    assert words == null


def test_encode_length_mismatch(code_1024):
    with pytest.raises(ValueError):
        encode(code_1024, np.zeros(code_1024.k + 1))


def test_syndrome_examples(code_1024):
    g = TannerGraph.from_dense(H_SMALL)
    assert syndrome(g, [1, 1, 1, 0]).tolist() == [0, 0]
    c = encode(code_1024, np.random.default_rng(0).integers(0, 2, code_1024.k))
    j = 17
    c[j] ^= 1
    s = syndrome(code_1024.graph, c)
    assert np.flatnonzero(s).tolist() == sorted(code_1024.graph.var_neighbors(j).tolist())
    with pytest.raises(ValueError):
        syndrome(g, [1, 0, 1])


def test_batch_syndrome_matches_single(code_1024):
    W = np.random.default_rng(1).integers(0, 2, (5, code_1024.n))
    batch = syndrome(code_1024.graph, W)
    for w, s in zip(W, batch):
        assert np.array_equal(syndrome(code_1024.graph, w), s)
