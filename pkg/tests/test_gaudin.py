from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_problem, make_tensor
from gaudin_oper import exact
from gaudin_oper.errors import DegenerateInputError
from gaudin_oper.gaudin import (
    GaudinProblem,
    apply_gaudin_hamiltonian,
    casimir_matrix,
    gaudin_hamiltonian,
    invariant_form,
    joint_spectrum,
    omega_matrix,
    sugawara_generating,
    sugawara_partial_fractions,
)
from gaudin_oper.liealg import Weight, type_a_data
from gaudin_oper.repmod import irreducible_rep, singular_space

DESK = [
    (1, (0, 1, 3), [[1], [1], [1]]),
    (1, (0, Fraction(1, 2), 2), [[2], [1], [1]]),
    (2, (0, 1, 3), [[1, 0], [0, 1], [1, 0]]),
    (2, (0, 2), [[1, 0], [0, 1]]),
]


@pytest.mark.parametrize("lam,value", [([0], 0), ([1], Fraction(3, 4)), ([2], 2)])
def test_casimir_rank_one(lam, value):
    rep = irreducible_rep(type_a_data(1), Weight(lam))
    C = casimir_matrix(rep)
    assert (C == exact.eye(rep.dim) * value).all()


@pytest.mark.parametrize("rank,lam", [(2, [1, 0]), (2, [1, 1]), (3, [0, 1, 0])])
def test_casimir_is_scalar(rank, lam):
    rd = type_a_data(rank)
    rep = irreducible_rep(rd, Weight(lam))
    assert (casimir_matrix(rep) == exact.eye(rep.dim) * rd.casimir_value(Weight(lam))).all()


def test_trace_form_duality():
    rep = irreducible_rep(type_a_data(2), Weight([1, 0]))
    form = invariant_form(rep)
    for a, Ja in enumerate(form.basis):
        for b, Jb in enumerate(form.dual):
            assert np.trace(Ja @ Jb) == int(a == b)


def test_omega_matrix_two_doublets(two_site):
    p, T = two_site
    h = Fraction(1, 2)
    expected = exact.frac_array([[h, 0, 0, 0], [0, -h, 1, 0], [0, 1, -h, 0], [0, 0, 0, h]])
    assert (omega_matrix(T, 0, 1) == expected).all()
    assert (gaudin_hamiltonian(p, T, 0) == expected * (1 / (p.z[0] - p.z[1]))).all()


def test_single_site_hamiltonian_vanishes():
    p = make_problem(1, (3,), [[2]])
    T = make_tensor(p)
    assert exact.is_zero(gaudin_hamiltonian(p, T, 0))


def test_singlet_eigenvalue(two_site):
    p, T = two_site
    (phi,) = singular_space(T, Weight([0]))
    out = apply_gaudin_hamiltonian(p, T, 0, phi)
    theta = Fraction(-3, 2) / (p.z[0] - p.z[1])
    assert (out == phi * theta).all()


def test_apply_matches_matrix(three_site):
    p, T = three_site
    rng = np.random.default_rng(1)
    v = rng.normal(size=T.dim) + 1j * rng.normal(size=T.dim)
    for i in range(3):
        full = exact.to_complex(gaudin_hamiltonian(p, T, i))
        assert np.allclose(full @ v, apply_gaudin_hamiltonian(p, T, i, v))


@pytest.mark.parametrize("rank,z,weights", DESK)
def test_commutativity_sum_rule_invariance(rank, z, weights):
    p = make_problem(rank, z, weights)
    T = make_tensor(p)
    H = [gaudin_hamiltonian(p, T, i) for i in range(p.N)]
    for a in range(p.N):
        for b in range(a + 1, p.N):
            assert exact.is_zero(H[a] @ H[b] - H[b] @ H[a])
    assert exact.is_zero(sum(H[1:], H[0]))
    for i in range(1, rank + 1):
        for name in ("E", "F"):
            X = T.total(name, i)
            for h in H:
                assert exact.is_zero(h @ X - X @ h)


@pytest.mark.parametrize("rank,z,weights", DESK)
def test_sugawara_identity(rank, z, weights):
    p = make_problem(rank, z, weights)
    T = make_tensor(p)
    rng = np.random.default_rng(5)
    for _ in range(5):
        u = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 9))) + Fraction(1, 97)
        assert (sugawara_generating(p, T, u) == sugawara_partial_fractions(p, T, u)).all()


def test_sugawara_single_site():
    p = make_problem(1, (Fraction(1, 3),), [[2]])
    T = make_tensor(p)
    u = Fraction(7, 5)
    expected = casimir_matrix(T.factors[0]) / (u - p.z[0]) ** 2
    assert (sugawara_generating(p, T, u) == expected).all()


def test_sugawara_at_large_u(three_site):
    p, T = three_site
    u = Fraction(10**6)
    total = sum((T.site_operator(casimir_matrix(f), s) for s, f in enumerate(T.factors)), exact.zeros((T.dim, T.dim)))
    for a in range(p.N):
        for b in range(a + 1, p.N):
            total = total + omega_matrix(T, a, b)
    lhs = exact.to_complex(sugawara_generating(p, T, u) * u * u)
    assert np.max(np.abs(lhs - exact.to_complex(total))) < 1e-5


def test_problem_validation():
    rd = type_a_data(1)
    with pytest.raises(DegenerateInputError):
        GaudinProblem(rd, (0, 0), (Weight([1]), Weight([1])))
    with pytest.raises(DegenerateInputError):
        GaudinProblem(rd, (0.0, 1e-12), (Weight([1]), Weight([1])))
    with pytest.raises(ValueError):
        GaudinProblem(rd, (0, 1), (Weight([1]), Weight([-1])))
    with pytest.raises(ValueError):
        GaudinProblem(rd, (0, 1), (Weight([1]),))


def test_spectrum_two_site(two_site):
    p, T = two_site
    rec = joint_spectrum(p, T, Weight([0]))
    (ev,) = rec.eigenvalues
    assert np.allclose(ev.values, [1.5, -1.5])
    assert max(ev.residuals) < 1e-12
    (top,) = joint_spectrum(p, T, Weight([2])).eigenvalues
    assert np.allclose(top.values, [0.5 / (0 - 1), -0.5 / (0 - 1)])


def test_spectrum_three_site(three_site):
    p, T = three_site
    rec = joint_spectrum(p, T, Weight([1]))
    assert rec.dimension == 2 and len(rec.eigenvalues) == 2
    for ev in rec.eigenvalues:
        assert abs(sum(ev.values)) < 1e-10
        assert max(ev.residuals) < 1e-10


def test_spectrum_empty_and_degenerate():
    p = make_problem(2, (0, 1), [[1, 1], [1, 1]])
    T = make_tensor(p)
    assert joint_spectrum(p, T, Weight([3, 0])).dimension == 1
    assert joint_spectrum(p, T, Weight([5, 5])).dimension == 0
    rec = joint_spectrum(p, T, Weight([1, 1]))
    # adjoint appears twice in 8 (x) 8 and Xi_1 is the same scalar on both copies
    assert rec.dimension == 2
    (ev,) = rec.eigenvalues
    assert ev.multiplicity == 2 and not ev.jordan
    assert rec.quadratic_only


def test_complex_points_agree_with_exact(three_site):
    p, T = three_site
    exact_vals = sorted(tuple(np.round(ev.values, 10)) for ev in joint_spectrum(p, T, Weight([1])).eigenvalues)
    pc = p.to_complex()
    cplx_vals = sorted(tuple(np.round(ev.values, 10)) for ev in joint_spectrum(pc, T, Weight([1])).eigenvalues)
    assert np.allclose(exact_vals, cplx_vals)


@given(st.lists(st.fractions(-5, 5, max_denominator=5), min_size=3, max_size=3, unique=True))
def test_random_points_commute(z):
    p = make_problem(1, z, [[1], [2], [1]])
    T = make_tensor(p)
    H = [gaudin_hamiltonian(p, T, i) for i in range(3)]
    assert exact.is_zero(H[0] @ H[1] - H[1] @ H[0])
    assert exact.is_zero(H[0] + H[1] + H[2])
