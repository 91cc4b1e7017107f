"""Acceptance criteria AC-1 .. AC-12, each at its stated tolerance."""

import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import make_problem, make_tensor
from gaudin_oper import exact
from gaudin_oper.bethe import (
    BetheSolution,
    admissible_color_counts,
    bae_jacobian,
    bae_residual,
    bethe_vector,
    colors_from_counts,
    highest_weight_defect,
    solution_weight,
    solve_bae,
)
from gaudin_oper.cli import main
from gaudin_oper.gaudin import (
    apply_gaudin_hamiltonian,
    gaudin_hamiltonian,
    joint_spectrum,
    sugawara_generating,
    sugawara_partial_fractions,
)
from gaudin_oper.liealg import Weight
from gaudin_oper.opers import (
    closed_form_eigenvalues,
    fit_kappa_pair,
    frobenius_obstruction,
    infinity_consistency,
    miura_oper,
    miura_sl2,
    miura_sln,
    oper_residues,
    predicted_eigenvalues,
    regularity_check,
)
from gaudin_oper.ratfun import DiffOp, RationalFunction as RF, diffop_compose
from gaudin_oper.repmod import singular_space

pytestmark = pytest.mark.acceptance

rng_seed = 20240611


def rational(rng, lo=-3, hi=3, den=6):
    return Fraction(int(rng.integers(lo * den, hi * den + 1)), den)


def distinct_rationals(rng, k, **kw):
    out: list = []
    while len(out) < k:
        x = rational(rng, **kw)
        if x not in out:
            out.append(x)
    return out


def random_ratfun(rng, max_poles=4):
    locs = distinct_rationals(rng, int(rng.integers(0, max_poles + 1)))
    poles = {x: [rational(rng) for _ in range(int(rng.integers(1, 3)))] for x in locs}
    poly = [rational(rng) for _ in range(int(rng.integers(0, 3)))]
    return RF(poles, poly)


def all_solutions(p):
    pc = p.to_complex()
    return [(pc, s) for n in admissible_color_counts(p) for s in solve_bae(pc, colors_from_counts(n))]


AC4 = make_problem(1, (0, 1), [[1], [1]])
AC5 = make_problem(1, (0, 1, 2), [[1], [1], [1]])


@pytest.fixture(scope="module")
def ac4_solution():
    (s,) = solve_bae(AC4.to_complex(), (1,))
    return s


@pytest.fixture(scope="module")
def ac5_solutions():
    return list(solve_bae(AC5.to_complex(), (1,)))


COMMUTING_SPACES = [
    (1, (0, Fraction(1, 2), 3), [[1], [1], [1]]),
    (2, (Fraction(-1, 3), 2), [[1, 0], [0, 1]]),
]


def test_ac01_commutativity():
    for rank, z, weights in COMMUTING_SPACES:
        p = make_problem(rank, z, weights)
        T = make_tensor(p)
        xi = [gaudin_hamiltonian(p, T, i) for i in range(p.N)]
        assert T.dim in (8, 9)
        for i in range(p.N):
            for j in range(i + 1, p.N):
                assert exact.is_zero(xi[i] @ xi[j] - xi[j] @ xi[i])


def test_ac02_sum_rule():
    for rank, z, weights in COMMUTING_SPACES:
        p = make_problem(rank, z, weights)
        T = make_tensor(p)
        total = sum(gaudin_hamiltonian(p, T, i) for i in range(p.N))
        assert exact.is_zero(total)


def test_ac03_sugawara_identity():
    p = make_problem(1, (0, Fraction(2, 3)), [[1], [1]])
    T = make_tensor(p)
    rng = np.random.default_rng(rng_seed)
    us = [u for u in distinct_rationals(rng, 8, lo=-5, hi=5, den=7) if u not in p.z][:5]
    assert len(us) == 5
    for u in us:
        assert (sugawara_generating(p, T, u) == sugawara_partial_fractions(p, T, u)).all()


def test_ac04_sl2_dictionary(ac4_solution):
    s = ac4_solution
    p, pc = AC4, AC4.to_complex()
    T = make_tensor(p)
    assert abs(s.w[0] - 0.5) < 1e-12 and s.residual < 1e-12
    phi = bethe_vector(pc, s, T)
    assert highest_weight_defect(T, phi) < 1e-10
    (oracle,) = joint_spectrum(pc, T, Weight([0])).eigenvalues
    theta1 = oracle.values[0]
    # Xi_1 = Omega/(z_1 - z_2) and Omega = -3/2 on the singlet
    assert abs(theta1 * (p.z[0] - p.z[1]) - (-1.5)) < 1e-10
    miura = predicted_eigenvalues(pc, s).residues[0]
    assert abs(miura - theta1) <= 1e-10 * abs(theta1)


def test_ac05_completeness(ac5_solutions):
    sols = ac5_solutions
    T = make_tensor(AC5)
    assert len(sols) == 2 == len(singular_space(T, Weight([1])))
    roots = sorted(s.w[0].real for s in sols)
    assert np.allclose(roots, [1 - 1 / np.sqrt(3), 1 + 1 / np.sqrt(3)], atol=1e-12)
    for s in sols:
        assert s.residual < 1e-12
        assert abs(3 * s.w[0] ** 2 - 6 * s.w[0] + 2) < 1e-10
    pc = AC5.to_complex()
    oracle = [np.array(e.values) for e in joint_spectrum(pc, T, Weight([1])).eigenvalues]
    predicted = [np.array(predicted_eigenvalues(pc, s).residues, dtype=complex) for s in sols]
    assert len(oracle) == 2
    for pr in predicted:
        assert min(np.max(np.abs(pr - o)) for o in oracle) < 1e-8
    for o in oracle:
        assert min(np.max(np.abs(pr - o)) for pr in predicted) < 1e-8


def test_ac06_miura_factorization():
    rng = np.random.default_rng(rng_seed + 6)
    for _ in range(20):
        u = random_ratfun(rng)
        L = diffop_compose(DiffOp.first_order(-u), DiffOp.first_order(u))
        assert L == DiffOp([-(u * u - u.derive()), RF.zero()])
        assert miura_sl2(u).projective == u * u - u.derive()
    a, b = Fraction(3, 2), Fraction(-2, 5)
    o = miura_sln([RF.constant(a), RF.constant(b), RF.constant(-a - b)])
    assert o.v[0] == RF.constant(-(a * a + a * b + b * b))
    assert o.v[1] == RF.constant(a * b * (a + b))


def test_ac07_bae_regularity(ac4_solution, ac5_solutions):
    cases = [(AC4.to_complex(), ac4_solution)] + [(AC5.to_complex(), s) for s in ac5_solutions]
    for pc, s in cases:
        o = miura_oper(pc, s)
        for w in s.w:
            assert regularity_check(o, w).max_singular < 1e-9
        for j in range(s.m):
            off = s.perturbed(j, 1e-3)
            r = regularity_check(miura_oper(pc, off), off.w[j])
            assert r.max_singular > 1e-4


def test_ac08_monodromy_obstruction(ac4_solution, ac5_solutions):
    rng = np.random.default_rng(rng_seed + 8)
    for _ in range(10):
        g = random_ratfun(rng).without_pole(0)
        v_1 = rational(rng)
        v = g + RF.pole(0, v_1)
        o = miura_sl2(RF.zero()).from_diffop(DiffOp([-v, RF.zero()]))
        assert frobenius_obstruction(o, 0, 0) == [v_1]
    cases = [(AC4, ac4_solution)] + [(AC5, s) for s in ac5_solutions]
    for p, s in cases:
        pc = p.to_complex()
        o = miura_oper(pc, s)
        for zi, lam in zip(pc.z, p.weights):
            assert abs(frobenius_obstruction(o, zi, lam[0])[0]) < 1e-9


INFINITY_RUNS = [
    (1, (0, 1), [[1], [1]]),
    (1, (0, 1, 2), [[1], [1], [1]]),
    (1, (0, 1, 3), [[2], [1], [2]]),
    (2, (0, 1, 3), [[1, 0], [1, 0], [1, 0]]),
    (2, (0, 1, 3), [[1, 0], [0, 1], [1, 1]]),
]


def test_ac09_infinity_bookkeeping():
    for rank, z, weights in INFINITY_RUNS:
        p = make_problem(rank, z, weights)
        # exact run: the zero-root solution
        o = miura_oper(p, BetheSolution((), ()))
        assert sum(oper_residues(o, zi).laurent[0].get(-1, 0) for zi in p.z) == 0
        assert infinity_consistency(p, BetheSolution((), ()))[0]
        for pc, s in all_solutions(p):
            pred = predicted_eigenvalues(pc, s)
            assert abs(sum(pred.residues)) < 1e-10
            ok, lam_inf, _, got, expected = infinity_consistency(pc, s)
            assert ok, (s, got, expected)
            assert lam_inf is not None and lam_inf.is_dominant_integral()


def test_ac10_kappa_normalization(ac4_solution):
    T4 = make_tensor(AC4)
    (o4,) = joint_spectrum(AC4.to_complex(), T4, Weight([0])).eigenvalues
    kappa = fit_kappa_pair(AC4.to_complex(), ac4_solution, o4.values)
    assert abs(kappa - 0.5) < 1e-10
    kappa = Fraction(round(kappa.real * 2), 2)
    rng = np.random.default_rng(rng_seed + 10)
    checked = 0
    for _ in range(10):
        z = distinct_rationals(rng, 3, den=4)
        lams = [[int(rng.integers(1, 3))] for _ in range(3)]
        p = make_problem(1, z, lams)
        pc = p.to_complex()
        T = make_tensor(p)
        for n in admissible_color_counts(p):
            if n == (0,):
                continue
            colors = colors_from_counts(n)
            oracle = [np.array(e.values) for e in joint_spectrum(pc, T, solution_weight(p, colors)).eigenvalues]
            for s in solve_bae(pc, colors):
                cf = np.array(closed_form_eigenvalues(pc, s, kappa), dtype=complex)
                scale = max(1.0, np.max(np.abs(cf)))
                assert min(np.max(np.abs(cf - o)) for o in oracle) < 1e-8 * scale
                checked += 1
    assert checked >= 10


def test_ac11_jacobian():
    rng = np.random.default_rng(rng_seed + 11)
    problems = [
        make_problem(1, (0, 1, 3), [[1], [2], [1]]),
        make_problem(2, (0, 1, 3), [[1, 0], [0, 1], [1, 1]]),
    ]
    colorings = [(1, 1, 1), (1, 1, 2, 2)]
    for k in range(20):
        p, colors = problems[k % 2].to_complex(), colorings[k % 2]
        w = tuple(complex(x) for x in 3 * (rng.normal(size=len(colors)) + 1j * rng.normal(size=len(colors))))
        s = BetheSolution(w, colors)
        J = bae_jacobian(p, s)
        h = 1e-6
        for j in range(s.m):
            fd = (np.array(bae_residual(p, s.perturbed(j, h))) - np.array(bae_residual(p, s.perturbed(j, -h)))) / (2 * h)
            assert np.linalg.norm(J[:, j] - fd) <= 1e-6 * np.linalg.norm(J[:, j])


def test_ac12_determinism(tmp_path, capsys, monkeypatch):
    doc = {"schema": 1, "algebra": {"type": "A", "rank": 2}, "points": ["0", "1", "3"], "weights": [[1, 0], [0, 1], [1, 1]]}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(doc))
    outs = []
    for threads in ("1", "1", "4", "4"):
        monkeypatch.setenv("GAUDIN_THREADS", threads)
        assert main(["solve", str(f), "--seed", "11"]) == 0
        outs.append(capsys.readouterr().out)
    assert len(set(outs)) == 1
    assert json.loads(outs[0])["summary"]["solutions"] > 0
