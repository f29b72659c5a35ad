import pytest

from lensj.jcalc import FAIL, PASS, compute_j_group, pick_unit_generator, thm8_valuation
from lensj.ktheory import (
    build_k_presentation,
    filtration_in,
    groupring_from_eta_powers,
    groupring_to_mu,
)
from lensj.kqcalc import (
    adams_minus_one_matrix,
    compute_kq_group,
    omega0,
    omega_next,
    omegas,
    quadratic_relation_check,
    thm12_order_check,
    thm13_check,
)

from oracles import FiniteQuotient, cokernel_invariants, kernel_invariants_via_counts


def status(res, name):
    return next(c.status for c in res.checks if c.name == name)


# ---------------------------------------------------------------- Omega classes

def test_omega0_examples():
    om = omega0(3, 1, 4)
    assert om.as_groupring == groupring_from_eta_powers([(1, 1), (2, 1), (0, -2)], 3, 1)
    assert om.as_mu.coeffs == (3, 1, 0, 0)
    om = omega0(3, 2, 6)
    assert om.as_groupring == groupring_from_eta_powers(
        [(s, 1) for s in (1, 2, 4, 5, 7, 8)] + [(0, -6)], 3, 2)
    assert om.as_groupring.augmentation == 0
    assert groupring_to_mu(om.as_groupring, 6) == om.as_mu


def test_omega_next_examples():
    om1 = omega_next(omega0(3, 2, 6), 3)
    assert om1.t == 1
    assert om1.as_groupring == groupring_from_eta_powers([(3, 1), (6, 1), (0, -2)], 3, 2)
    with pytest.raises(ValueError):
        omega_next(omega0(3, 1, 4), 3)


@pytest.mark.parametrize("p,r", [(3, 1), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)])
def test_omega_recursion_divides_exactly(p, r):
    levels = omegas(p, r, 6)
    assert len(levels) == r
    for om in levels:
        assert om.as_groupring.augmentation == 0
        assert om.as_mu.constant == 0


def test_adams_matrix_columns():
    P = build_k_presentation(3, 1, 3)
    A = adams_minus_one_matrix(P, 2)
    # psi^2(mu) - mu = mu + mu^2; psi^2(mu^2) - mu^2 = 3 mu^2 + 4 mu^3 (truncated)
    assert [A[i, 0] for i in range(3)] == [1, 1, 0]
    assert [A[i, 1] for i in range(3)] == [0, 3, 4]


# ---------------------------------------------------------------- the kernel

def test_compute_kq_examples():
    res = compute_kq_group(3, 1, 4)
    assert res.kq_decomposition.torsion == (9,)
    assert res.omega_orders == (9,)
    assert res.bridge_check
    assert compute_kq_group(5, 1, 3).kq_decomposition.is_trivial


def test_kq_at_3_2_6_is_not_cyclic():
    # the kernel is Z/3 + Z/27 while J is Z/81: equal orders, different structure
    res = compute_kq_group(3, 2, 6)
    assert res.kq_decomposition.torsion == (3, 27)
    assert compute_j_group(3, 2, 6).j_decomposition.torsion == (81,)
    assert not res.bridge_check
    assert status(res, "kernel_cokernel_bridge") == FAIL
    assert status(res, "complex_cokernel_is_j") == PASS


@pytest.mark.parametrize("p,r,k", [
    (3, 1, 4), (3, 1, 9), (5, 1, 8), (3, 2, 3), (3, 2, 4), (3, 2, 6), (3, 2, 7), (3, 2, 12),
    (5, 2, 20), (3, 3, 9), (3, 3, 12), (7, 2, 14),
])
def test_kq_against_counting_oracle(p, r, k):
    P = build_k_presentation(p, r, k)
    R = P.relation_lattice.hnf.to_rows()
    image = adams_minus_one_matrix(P, pick_unit_generator(p, r)).transpose().to_rows()
    res = compute_kq_group(p, r, k)
    assert res.kq_decomposition.torsion == kernel_invariants_via_counts(R, image, p)
    # the complex cokernel reproduces the real J-group
    assert cokernel_invariants(R, image) == compute_j_group(p, r, k).j_decomposition.torsion


def test_frozen_kernel_cokernel_pairs():
    # (KQ, J) recorded from the counting oracle and sympy SNF
    table = {
        (3, 2, 12): ((9, 729), (3, 2187)),
        (3, 2, 18): ((27, 19683), (9, 59049)),
        (5, 2, 20): ((5, 3125), (15625,)),
    }
    for (p, r, k), (kq, j) in table.items():
        res = compute_kq_group(p, r, k)
        assert res.kq_decomposition.torsion == kq
        assert compute_j_group(p, r, k).j_decomposition.torsion == j


@pytest.mark.parametrize("p,r,k", [(3, 1, 6), (3, 2, 6), (3, 2, 10), (5, 2, 9), (3, 3, 10)])
def test_omega_orders_against_enumeration(p, r, k):
    # an element's order in the kernel equals its order in the whole group
    P = build_k_presentation(p, r, k)
    G = FiniteQuotient(P.relation_lattice.hnf.to_rows())
    res = compute_kq_group(p, r, k)
    for om, order in zip(omegas(p, r, k), res.omega_orders):
        assert order == G.order_of_key(G.key(om.as_mu.coeffs))


def test_omega_fixed_by_adams():
    for p, r in [(3, 1), (3, 2), (5, 2), (3, 3)]:
        for k in (2, 5, 9):
            assert status(compute_kq_group(p, r, k), "omega_adams_fixed") == PASS


# ---------------------------------------------------------------- relations

def test_quadratic_examples():
    for k in range(4, 12):
        assert quadratic_relation_check(3, 1, k, 0)
    for k in range(8, 14):
        assert quadratic_relation_check(5, 1, k, 0)
    assert isinstance(quadratic_relation_check(3, 2, 9, 1), bool)
    with pytest.raises(ValueError):
        quadratic_relation_check(3, 2, 9, 2)


def test_quadratic_relation_recorded_for_r2():
    # t = 0 fails from k = 4 on while t = 1 holds; recorded, never raised
    assert not quadratic_relation_check(3, 2, 6, 0)
    assert quadratic_relation_check(3, 2, 6, 1)
    res = compute_kq_group(3, 2, 6)
    assert res.quadratic_checks == (False, True)


def test_thm13_examples():
    assert thm13_check(3, 4)
    res = compute_kq_group(3, 1, 4)
    om = omega0(3, 1, 4).as_groupring
    P = build_k_presentation(3, 1, 4)
    assert P.relation_lattice.contains(groupring_to_mu(om ** 3, 4).coeffs)
    assert thm13_check(3, 2)
    assert compute_kq_group(3, 1, 2).kq_decomposition.torsion == (3,)
    for k in range(8, 12):
        P = build_k_presentation(3, 1, k)
        sq = groupring_to_mu(om ** 2, k)
        assert filtration_in(P.relation_lattice, sq.coeffs) == 4
    assert status(res, "thm13_closed_form") == PASS


def test_thm12_examples():
    assert thm12_order_check(3, 1, 4)
    assert compute_kq_group(3, 1, 4).omega_orders == (9,)
    assert all(thm12_order_check(p, 1, k) for p in (3, 5, 7) for k in range(0, p - 1))


def test_thm12_mismatches_are_recorded():
    # at (3,2,4) the bridge holds but Omega_1 has order 3 while a_1 = 1
    res = compute_kq_group(3, 2, 4)
    assert res.bridge_check
    assert res.omega_orders == (9, 3)
    assert [3 ** thm8_valuation(3, 2, 4, t) for t in range(2)] == [9, 1]
    assert not thm12_order_check(3, 2, 4)
    assert status(res, "thm12_omega_orders") == "report"
    # at (3,2,6) Omega_0 has order 27 although a_0 = 81: the kernel has exponent 27
    assert compute_kq_group(3, 2, 6).omega_orders == (27, 3)


def test_r1_checks_all_pass():
    for p in (3, 5, 7):
        for k in range(0, 16):
            res = compute_kq_group(p, 1, k)
            assert not res.hard_failures, (p, k, res.hard_failures)
            assert res.kq_decomposition.order == p ** (k // (p - 1))
