"""Cartan connections, Miura transformations and oper residue data.

A PGL_n oper is stored as the scalar operator
``d^n + v_1 d^(n-2) + ... + v_(n-1)``.  For ``n = 2`` the familiar form is
``d^2 - p`` with ``p = -v_1``; :attr:`Oper.projective` returns ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bethe import BetheSolution
from .errors import DegenerateInputError
from .gaudin import GaudinProblem
from .liealg import RootData, Weight
from .ratfun import (
    INFINITY,
    DiffOp,
    RationalFunction,
    compose_mobius,
    diffop_compose,
    laurent_expand,
)

__all__ = [
    "CartanConnection",
    "Oper",
    "ResidueRecord",
    "RegularityResult",
    "PredictedEigenvalues",
    "cartan_connection",
    "miura_sl2",
    "miura_sln",
    "connection_components",
    "miura_oper",
    "oper_residues",
    "indicial_exponents",
    "regularity_check",
    "frobenius_obstruction",
    "transform_projective_connection",
    "pullback_at_infinity",
    "predicted_eigenvalues",
    "closed_form_eigenvalues",
    "fit_kappa_pair",
    "infinity_consistency",
    "KAPPA_PAIR",
]

# cross-term constant of the closed-form eigenvalue evaluator; fixed by the
# two-point spectrum, see fit_kappa_pair
KAPPA_PAIR = Fraction(1, 2)

FROBENIUS_GUARD = 8


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class CartanConnection:
    """``d_t + lam(t)`` with ``lam(t)`` given by one rational function per fundamental coordinate."""

    rd: RootData
    components: tuple[RationalFunction, ...]

    @property
    def field(self) -> str:
        return self.components[0].field

    def residue(self, x) -> Weight | tuple:
        vals = tuple(c.residue(x) for c in self.components)
        return Weight(vals) if self.field == "Q" else vals

    def constant_term(self, x) -> tuple:
        """Degree-zero Laurent coefficient at ``x`` (``mu_{j,0}`` at a Bethe root)."""
        return tuple(laurent_expand(c, x, 0)[0] for c in self.components)


def cartan_connection(p: GaudinProblem, s: BetheSolution) -> CartanConnection:
    """``lam(t) = sum_i lam_i/(t - z_i) - sum_j alpha_{c_j}/(t - w_j)``."""
    pts = tuple(p.z) + tuple(s.w)
    exact_pts = all(_exact(x) for x in pts)
    field = "Q" if exact_pts else "C"
    if not exact_pts:
        pts = tuple(complex(x) for x in pts)
    if len(set(pts)) != len(pts):
        raise DegenerateInputError("Bethe roots must be distinct from each other and from the marked points")
    rd = p.rd
    comps = []
    for c in range(rd.rank):
        poles: dict = {}
        for zi, lam in zip(pts[: p.N], p.weights):
            poles[zi] = [lam[c]]
        for wj, col in zip(pts[p.N :], s.colors):
            poles[wj] = [-rd.alpha(col)[c]]
        comps.append(RationalFunction(poles, (), field=field))
    return CartanConnection(rd, tuple(comps))


def connection_components(c: CartanConnection) -> list[RationalFunction]:
    """``eps``-coordinates ``u_1..u_n`` (summing to zero) of the connection."""
    rd = c.rd
    n = rd.n
    zero = RationalFunction.zero(c.field)
    u = [zero] * n
    for k, comp in enumerate(c.components):
        eps = rd.epsilon_coordinates(rd.fundamental_weights[k])
        for a in range(n):
            if eps[a]:
                coef = eps[a] if c.field == "Q" else complex(eps[a])
                u[a] = u[a] + comp.scale(coef)
    return u


@dataclass(frozen=True)
class Oper:
    """``d^n + v_1 d^(n-2) + ... + v_(n-1)``."""

    rank: int
    v: tuple[RationalFunction, ...]
    diffop: DiffOp

    @property
    def field(self) -> str:
        return self.diffop.field

    @property
    def projective(self) -> RationalFunction:
        """``p`` in ``d^2 - p`` (rank 2 only)."""
        if self.rank != 2:
            raise ValueError("projective form only exists for rank-2 opers")
        return -self.v[0]

    @classmethod
    def from_diffop(cls, L: DiffOp) -> "Oper":
        n = L.order
        if not L.is_traceless():
            raise ValueError("oper operators have no d^(n-1) term")
        return cls(n, tuple(L.coefficient(n - 1 - k) for k in range(1, n)), L)


def miura_sln(u_list: Sequence[RationalFunction], tol: float = 1e-12) -> Oper:
    """``(d - u_1) ... (d - u_n)`` for traceless ``u``."""
    n = len(u_list)
    if n < 2:
        raise ValueError("need n >= 2")
    total = u_list[0]
    for u in u_list[1:]:
        total = total + u
    if total.field == "Q":
        if not total.is_zero():
            raise ValueError("u_1 + ... + u_n must vanish")
    elif total.max_abs_coefficient() > tol:
        raise ValueError("u_1 + ... + u_n must vanish")
    L = DiffOp.first_order(-u_list[0])
    for u in u_list[1:]:
        L = diffop_compose(L, DiffOp.first_order(-u))
    if total.field == "C":
        # drop roundoff in the d^(n-1) coefficient, which is -sum(u)
        L = DiffOp(L.coeffs[:-1] + (RationalFunction.zero("C"),))
    return Oper.from_diffop(L)


def miura_sl2(u: RationalFunction) -> Oper:
    """Miura transform ``v = u^2 - u'``, i.e. ``(d - u)(d + u) = d^2 - v``."""
    o = miura_sln([u, -u])
    v = u * u - u.derive()
    assert o.projective == v, "Miura factorization failed"
    return o


def miura_oper(p: GaudinProblem, s: BetheSolution) -> Oper:
    """Full pipeline: Cartan connection, eps-coordinates, Miura transform."""
    return miura_sln(connection_components(cartan_connection(p, s)))


# -- coordinate changes ---------------------------------------------------


def transform_projective_connection(v: RationalFunction, a, b, c, d) -> RationalFunction:
    """``v(phi(s)) phi'(s)^2`` for ``phi(s) = (a s + b)/(c s + d)``.

    The Schwarzian of a Moebius map vanishes, so no extra term appears.
    """
    if a * d - b * c == 0:
        raise ValueError("degenerate Moebius map (ad - bc = 0)")
    det = v._scalar(a * d - b * c)
    if c == 0:
        dphi2 = RationalFunction.constant((det / (v._scalar(d) ** 2)) ** 2, v.field)
    else:
        # phi'(s) = det / (c s + d)^2 = (det/c^2) / (s + d/c)^2
        x = -v._scalar(d) / v._scalar(c)
        dphi2 = RationalFunction.pole(x, (det / v._scalar(c) ** 2) ** 2, order=4, field=v.field)
    return compose_mobius(v, a, b, c, d) * dphi2


def pullback_at_infinity(L: DiffOp) -> DiffOp:
    """Rewrite ``L`` in the coordinate ``s = 1/t`` and make it monic again."""
    n = L.order
    field = L.field
    s2 = RationalFunction({}, (0, 0, -1), field=field)  # d_t = -s^2 d_s
    # D^k as a list of coefficients of d_s^j
    powers = [[RationalFunction.constant(1, field)]]
    for _ in range(n):
        prev = powers[-1]
        nxt = [RationalFunction.zero(field)] * (len(prev) + 1)
        for j, cj in enumerate(prev):
            nxt[j] = nxt[j] + s2 * cj.derive()
            nxt[j + 1] = nxt[j + 1] + s2 * cj
        powers.append(nxt)
    out = [RationalFunction.zero(field)] * (n + 1)
    for k in range(n + 1):
        ak = compose_mobius(L.coefficient(k), 0, 1, 1, 0)
        for j, c in enumerate(powers[k]):
            out[j] = out[j] + ak * c
    lead = out[n]
    # lead is (-1)^n s^(2n)
    inv = RationalFunction.pole(0, (-1) ** n, order=2 * n, field=field)
    assert lead * inv == RationalFunction.constant(1, field)
    return DiffOp([c * inv for c in out[:n]])


# -- residues --------------------------------------------------------------


@dataclass(frozen=True)
class ResidueRecord:
    """Singular data of an oper at a point.

    ``c``/``mu`` are the ``(t-x)^-2`` and ``(t-x)^-1`` coefficients of the
    projective coefficient (rank 2 only; at infinity they refer to the
    pulled-back coefficient at ``s = 0``).  ``laurent[k]`` holds the
    negative-order coefficients of ``v_(k+1)``.
    """

    point: object
    c: object
    mu: object
    laurent: tuple[dict, ...]
    indicial: tuple
    exponents: tuple[complex, ...]


def _falling(k: int) -> np.ndarray:
    """Coefficients (low to high) of ``x (x-1) ... (x-k+1)``."""
    poly = np.array([1.0 + 0j])
    for r in range(k):
        poly = np.convolve(poly, np.array([-r, 1.0]))
    return poly


def indicial_exponents(L: DiffOp, x) -> tuple[tuple, tuple[complex, ...]]:
    """Indicial polynomial (monomial coefficients, low to high) and its roots at a finite ``x``."""
    n = L.order
    coeffs = np.zeros(n + 1, dtype=complex)
    exact_poly = [Fraction(0)] * (n + 1) if L.field == "Q" else None
    for k in range(n + 1):
        a = L.coefficient(k)
        b = laurent_expand(a, x, k - n)[k - n] if k < n else a._scalar(1)
        if b == 0:
            continue
        coeffs[: k + 1] += complex(b) * _falling(k)
        if exact_poly is not None:
            fall = [Fraction(1)]
            for r in range(k):
                fall = [(fall[i - 1] if i > 0 else 0) - r * (fall[i] if i < len(fall) else 0) for i in range(len(fall) + 1)]
            for i, f in enumerate(fall):
                exact_poly[i] += b * f
    roots = np.roots(coeffs[::-1])
    roots = tuple(sorted((complex(r) for r in roots), key=lambda r: (round(r.real, 9), round(r.imag, 9))))
    return (tuple(exact_poly) if exact_poly is not None else tuple(coeffs)), roots


def _local_operator(o: Oper, x):
    if x is INFINITY:
        return pullback_at_infinity(o.diffop), 0
    return o.diffop, x


def oper_residues(o: Oper, x) -> ResidueRecord:
    """Singular data at a finite point or at ``INFINITY`` (via ``s = 1/t``)."""
    L, x0 = _local_operator(o, x)
    lau = tuple(
        laurent_expand(L.coefficient(o.rank - 1 - k), x0, -1).negative_part() for k in range(1, o.rank)
    )
    c = mu = None
    if o.rank == 2:
        q = o.projective if x is not INFINITY else transform_projective_connection(o.projective, 0, 1, 1, 0)
        ser = laurent_expand(q, x0, -1)
        c, mu = ser[-2], ser[-1]
    poly, roots = indicial_exponents(L, x0)
    return ResidueRecord(x, c, mu, lau, poly, roots)


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    singular_part: tuple[dict, ...]
    max_singular: float

    def __bool__(self):
        return self.regular


def regularity_check(o: Oper, x, tol: float = 1e-9) -> RegularityResult:
    """Whether every ``v_k`` is holomorphic at ``x`` (exactly, or up to ``tol`` over C)."""
    parts = tuple(laurent_expand(vk, x, -1).negative_part() for vk in o.v)
    worst = max((abs(c) for d in parts for c in d.values()), default=0.0)
    if o.field == "Q":
        ok = all(c == 0 for d in parts for c in d.values())
    else:
        ok = worst < tol
    return RegularityResult(ok, parts, float(worst))


def frobenius_obstruction(o: Oper, x, lam: int, tol: float = 1e-9) -> list:
    """Resonance obstruction of ``d^2 - p`` at ``x`` for residue ``lam`` (rank 2).

    Runs the power-series recursion from the exponent ``-lam/2``; the
    coefficient at the resonant step ``lam + 1`` cannot be solved for and
    the right-hand side left over there is returned.  It vanishes exactly
    when there is no monodromy; for ``lam = 0`` it is the residue ``v_{-1}``.
    """
    if o.rank != 2:
        raise ValueError("Frobenius obstruction is implemented for rank-2 opers")
    if lam < 0 or lam != int(lam):
        raise ValueError("lam must be a non-negative integer")
    lam = int(lam)
    q = o.projective
    gap = lam + 1
    ser = laurent_expand(q, x, gap + FROBENIUS_GUARD)
    c = ser[-2]
    expected = Fraction(lam * (lam + 2), 4)
    if (q.field == "Q" and c != expected) or (q.field == "C" and abs(c - complex(expected)) > tol):
        raise ValueError(f"double-pole coefficient {c} does not match lam = {lam}")

    def vn(n):
        return ser[n]

    zero = q._scalar(0)
    a = [q._scalar(1)]
    obstruction = None
    for k in range(1, gap + FROBENIUS_GUARD + 1):
        rhs = sum((vn(nn) * a[k - 2 - nn] for nn in range(-1, k - 1)), zero)
        denom = k * (k - gap)
        if k == gap:
            obstruction = rhs
            a.append(zero)
        else:
            a.append(rhs / denom)
    return [obstruction]


# -- eigenvalue dictionary --------------------------------------------------


@dataclass(frozen=True)
class PredictedEigenvalues:
    """Per-site first-order residues of ``-v_1`` (the eigenvalues) plus the closed-form cross-check."""

    residues: tuple
    double_poles: tuple
    closed_form: tuple
    kappa_pair: object


def _inner(rd: RootData, a, b):
    return sum(a[i] * rd.inverse_cartan[i][j] * b[j] for i in range(rd.rank) for j in range(rd.rank))


def closed_form_eigenvalues(p: GaudinProblem, s: BetheSolution, kappa=KAPPA_PAIR) -> tuple:
    """``2 kappa sum_j (lam_i, lam_j)/(z_i - z_j) - sum_k (lam_i, alpha_k)/(z_i - w_k)``.

    For sl2 with weights as integers, ``2 (lam_i, lam_j) = lam_i lam_j``.
    """
    rd = p.rd
    out = []
    for i, (zi, li) in enumerate(zip(p.z, p.weights)):
        cross = sum((_inner(rd, li, lj) / (zi - zj) for j, (zj, lj) in enumerate(zip(p.z, p.weights)) if j != i), 0 * zi)
        roots = sum((_inner(rd, li, rd.alpha(c)) / (zi - wk) for wk, c in zip(s.w, s.colors)), 0 * zi)
        out.append(2 * kappa * cross - roots)
    return tuple(out)


def predicted_eigenvalues(p: GaudinProblem, s: BetheSolution, kappa=KAPPA_PAIR) -> PredictedEigenvalues:
    o = miura_oper(p, s)
    minus_v1 = -o.v[0]
    res, dbl = [], []
    for zi in p.z:
        zi = zi if minus_v1.field == "Q" else complex(zi)
        ser = laurent_expand(minus_v1, zi, -1)
        dbl.append(ser[-2])
        res.append(ser[-1])
    return PredictedEigenvalues(tuple(res), tuple(dbl), closed_form_eigenvalues(p, s, kappa), kappa)


def fit_kappa_pair(p: GaudinProblem, s: BetheSolution, oracle: Sequence) -> complex:
    """Least-squares ``kappa`` making the closed form reproduce ``oracle`` eigenvalues."""
    base = np.array([complex(x) for x in closed_form_eigenvalues(p, s, 0)])
    unit = np.array([complex(x) for x in closed_form_eigenvalues(p, s, 1)]) - base
    target = np.array([complex(x) for x in oracle]) - base
    if np.linalg.norm(unit) == 0:
        raise ValueError("cross term vanishes; kappa is not determined")
    return complex(np.vdot(unit, target) / np.vdot(unit, unit))


def infinity_consistency(p: GaudinProblem, s: BetheSolution, o: Oper | None = None, tol: float = 1e-8):
    """Compare exponents at infinity with the classification of the solution weight.

    Returns ``(ok, lam_inf, w, exponents, expected)``.  Solutions ``t^r``
    near infinity correspond to exponents ``-r`` at ``s = 0``; for
    ``mu = w(nu + rho) - rho`` with ``nu = -w0(lam_inf)`` they form the
    multiset ``eps(nu + rho) + (n-1)/2``.
    """
    from .bethe import solution_weight
    from .liealg import classify_weight_at_infinity

    o = o or miura_oper(p, s)
    rd = p.rd
    mu = solution_weight(p, s.colors)
    cls = classify_weight_at_infinity(rd, mu)
    rec = oper_residues(o, INFINITY)
    got = sorted((-r for r in rec.exponents), key=lambda r: (r.real, r.imag))
    if cls is None:
        return False, None, None, tuple(got), None
    lam_inf, w = cls
    nu = -rd.w0(lam_inf)
    shift = Fraction(rd.n - 1, 2)
    expected = sorted(e + shift for e in rd.epsilon_coordinates(nu + rd.rho))
    ok = all(abs(g - complex(e)) < tol for g, e in zip(got, expected))
    if o.rank == 2:
        cas = rd.casimir_value(lam_inf)
        ok = ok and abs(complex(rec.c) - complex(cas)) < tol
    return ok, lam_inf, w, tuple(got), tuple(expected)
