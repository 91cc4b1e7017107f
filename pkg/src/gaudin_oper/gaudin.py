"""Quadratic Gaudin Hamiltonians, Casimirs, the Sugawara generating function,
and a brute-force joint-spectrum oracle.

Sites are 0-based positions in the tensor product.  Matrices are exact
(``Fraction`` object arrays) when the marked points are rational and
``complex128`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .errors import DegenerateInputError, ResourceCapError
from .liealg import RootData, Weight
from .repmod import Representation, TensorRep, singular_space

__all__ = [
    "GaudinProblem",
    "InvariantForm",
    "JointEigenvalue",
    "SpectrumRecord",
    "invariant_form",
    "casimir_matrix",
    "omega_matrix",
    "gaudin_hamiltonian",
    "apply_gaudin_hamiltonian",
    "sugawara_generating",
    "sugawara_partial_fractions",
    "joint_spectrum",
]

DEFAULT_POINT_TOL = 1e-9
DEFAULT_SPECTRUM_CAP = 400


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class GaudinProblem:
    """Marked points ``z``, dominant integral weights, optional weight at infinity."""

    rd: RootData
    z: tuple
    weights: tuple[Weight, ...]
    lam_inf: Weight | None = None
    point_tol: float = DEFAULT_POINT_TOL

    def __post_init__(self):
        z = tuple(Fraction(x) if isinstance(x, int) else x for x in self.z)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(z) != len(self.weights):
            raise ValueError("need one weight per marked point")
        exact_pts = all(_is_exact(x) for x in z)
        if not exact_pts:
            object.__setattr__(self, "z", tuple(complex(x) for x in z))
        for a in range(len(z)):
            for b in range(a + 1, len(z)):
                d = abs(self.z[a] - self.z[b])
                if d == 0 or (not exact_pts and d < self.point_tol):
                    raise DegenerateInputError(f"marked points {a} and {b} coincide")
        for lam in self.weights:
            if lam.rank != self.rd.rank or not lam.is_dominant_integral():
                raise ValueError(f"{lam} is not a dominant integral weight of rank {self.rd.rank}")

    @property
    def N(self) -> int:
        return len(self.z)

    @property
    def field(self) -> str:
        return "Q" if all(_is_exact(x) for x in self.z) else "C"

    def total_weight(self) -> Weight:
        acc = self.rd.zero()
        for lam in self.weights:
            acc = acc + lam
        return acc

    def to_complex(self) -> "GaudinProblem":
        return GaudinProblem(self.rd, tuple(complex(x) for x in self.z), self.weights, self.lam_inf, self.point_tol)


@dataclass
class InvariantForm:
    """Matched lists ``basis[a]`` and ``dual[a]`` with ``tr(J_a J^b) = delta`` in the defining rep."""

    basis: list[np.ndarray]
    dual: list[np.ndarray]

    def __len__(self):
        return len(self.basis)

    def pairs(self):
        return zip(self.basis, self.dual)


def invariant_form(rep: Representation) -> InvariantForm:
    """Dual bases of ``sl_n`` realized in ``rep``.

    Root vectors are nested commutators ``e_{[i,j+1]} = [e_{[i,j]}, E_{j+1}]``
    and ``f_{[i,j+1]} = [F_{j+1}, f_{[i,j]}]``, which are elementary matrices
    in the defining representation; the Cartan part is dualized with the
    inverse Cartan matrix.
    """
    rd = rep.rd
    basis, dual = [], []
    for i in range(1, rd.rank + 1):
        e, f = rep.E(i), rep.F(i)
        for j in range(i, rd.rank + 1):
            if j > i:
                e = e @ rep.E(j) - rep.E(j) @ e
                f = rep.F(j) @ f - f @ rep.F(j)
            basis += [e, f]
            dual += [f, e]
    for k in range(1, rd.rank + 1):
        basis.append(rep.H(k))
        h_dual = exact.zeros((rep.dim, rep.dim))
        for l in range(1, rd.rank + 1):
            h_dual = h_dual + rd.inverse_cartan[k - 1][l - 1] * rep.H(l)
        dual.append(h_dual)
    return InvariantForm(basis, dual)


def casimir_matrix(rep: Representation) -> np.ndarray:
    """``Delta = 1/2 sum_a J_a J^a``."""
    form = invariant_form(rep)
    acc = exact.zeros((rep.dim, rep.dim))
    for a, b in form.pairs():
        acc = acc + a @ b
    return acc * Fraction(1, 2)


def _forms(T: TensorRep) -> list[InvariantForm]:
    cache = T.__dict__.setdefault("_gaudin_cache", {})
    if "forms" not in cache:
        cache["forms"] = [invariant_form(f) for f in T.factors]
    return cache["forms"]


def omega_matrix(T: TensorRep, i: int, j: int) -> np.ndarray:
    """``Omega^{(ij)} = sum_a J_a^{(i)} J^{a(j)}`` as an exact full matrix."""
    cache = T.__dict__.setdefault("_gaudin_cache", {})
    key = ("omega", min(i, j), max(i, j))
    if key not in cache:
        fi, fj = _forms(T)[i], _forms(T)[j]
        acc = exact.zeros((T.dim, T.dim))
        for (a, _), (_, b) in zip(fi.pairs(), fj.pairs()):
            acc = acc + T.site_operator(a, i) @ T.site_operator(b, j)
        cache[key] = acc
    return cache[key]


def _check_site(p: GaudinProblem, T: TensorRep, i: int):
    if T.n_sites != p.N:
        raise ValueError("tensor product and problem have different numbers of sites")
    if not 0 <= i < p.N:
        raise IndexError(f"site {i} outside 0..{p.N - 1}")


def _numeric(p: GaudinProblem, m: np.ndarray) -> np.ndarray:
    return m if p.field == "Q" else exact.to_complex(m)


def gaudin_hamiltonian(p: GaudinProblem, T: TensorRep, i: int) -> np.ndarray:
    """``Xi_i = sum_{j != i} Omega^{(ij)} / (z_i - z_j)``."""
    _check_site(p, T, i)
    acc = exact.zeros((T.dim, T.dim)) if p.field == "Q" else np.zeros((T.dim, T.dim), dtype=complex)
    for j in range(p.N):
        if j != i:
            acc = acc + _numeric(p, omega_matrix(T, i, j)) * (1 / (p.z[i] - p.z[j]))
    return acc


def apply_gaudin_hamiltonian(p: GaudinProblem, T: TensorRep, i: int, vec: np.ndarray) -> np.ndarray:
    """``Xi_i vec`` via per-site application (no full matrices).

    Object-dtype vectors are treated exactly; anything else in complex arithmetic.
    """
    _check_site(p, T, i)
    vec = np.asarray(vec)
    exact_vec = vec.dtype == object
    forms = _forms(T) if exact_vec else _complex_forms(T)
    acc = exact.zeros(T.dim) if exact_vec else np.zeros(T.dim, dtype=complex)
    for j in range(p.N):
        if j == i:
            continue
        part = None
        for (a, _), (_, b) in zip(forms[i].pairs(), forms[j].pairs()):
            w = T.apply_site(a, i, T.apply_site(b, j, vec))
            part = w if part is None else part + w
        scale = 1 / (p.z[i] - p.z[j])
        acc = acc + part * (scale if exact_vec else complex(scale))
    return acc


def _complex_forms(T: TensorRep) -> list[InvariantForm]:
    cache = T.__dict__.setdefault("_gaudin_cache", {})
    if "cforms" not in cache:
        cache["cforms"] = [
            InvariantForm([exact.to_complex(a) for a in f.basis], [exact.to_complex(b) for b in f.dual])
            for f in _forms(T)
        ]
    return cache["cforms"]


def _loop_current(p: GaudinProblem, T: TensorRep, mats_per_site: Sequence[np.ndarray], u) -> np.ndarray:
    # J_{-1}(u) = -sum_i J^{(i)} / (z_i - u)
    acc = None
    for s, m in enumerate(mats_per_site):
        term = T.site_operator(m, s) * (-1 / (p.z[s] - u))
        acc = term if acc is None else acc + term
    return acc


def sugawara_generating(p: GaudinProblem, T: TensorRep, u) -> np.ndarray:
    """``Phi_u(S) = 1/2 sum_a J^a_{-1}(u) J_{a,-1}(u)`` from the loop currents."""
    if any(u == z for z in p.z):
        raise DegenerateInputError("u coincides with a marked point")
    forms = _forms(T)
    acc = exact.zeros((T.dim, T.dim))
    for a in range(len(forms[0])):
        upper = _loop_current(p, T, [f.dual[a] for f in forms], u)
        lower = _loop_current(p, T, [f.basis[a] for f in forms], u)
        acc = acc + upper @ lower
    return _numeric(p, acc * Fraction(1, 2))


def sugawara_partial_fractions(p: GaudinProblem, T: TensorRep, u) -> np.ndarray:
    """``sum_i Xi_i/(u - z_i) + sum_i Delta^{(i)}/(u - z_i)^2``."""
    if any(u == z for z in p.z):
        raise DegenerateInputError("u coincides with a marked point")
    acc = None
    for i, f in enumerate(T.factors):
        term = gaudin_hamiltonian(p, T, i) * (1 / (u - p.z[i]))
        term = term + _numeric(p, T.site_operator(casimir_matrix(f), i)) * (1 / (u - p.z[i]) ** 2)
        acc = term if acc is None else acc + term
    return acc


@dataclass
class JointEigenvalue:
    values: tuple  # eigenvalue of Xi_0, ..., Xi_{N-1}
    multiplicity: int
    vectors: list[np.ndarray] = field(repr=False)
    residuals: tuple  # max ||Xi_i v - theta_i v|| / ||v|| over the eigenspace
    jordan: bool = False

    @property
    def sum(self) -> complex:
        return sum(self.values)


@dataclass
class SpectrumRecord:
    weight: Weight
    dimension: int
    eigenvalues: list[JointEigenvalue]
    restricted: list[np.ndarray] = field(repr=False)
    quadratic_only: bool = False
    retried: bool = False

    def values(self) -> list[tuple]:
        return [e.values for e in self.eigenvalues]


def _restrict(p: GaudinProblem, T: TensorRep, basis: list[np.ndarray]) -> tuple[list[np.ndarray], np.ndarray]:
    B = np.stack(basis, axis=1)
    mats = []
    for i in range(p.N):
        if p.field == "Q":
            image = np.stack([apply_gaudin_hamiltonian(p, T, i, b) for b in basis], axis=1)
            mats.append(exact.to_complex(exact.solve(B, image)))
        else:
            Bc = exact.to_complex(B)
            image = np.stack([apply_gaudin_hamiltonian(p, T, i, bc) for bc in Bc.T], axis=1)
            mats.append(np.linalg.lstsq(Bc, image, rcond=None)[0])
    return mats, exact.to_complex(B)


def _cluster(vals: np.ndarray, tol: float) -> list[list[int]]:
    order = sorted(range(len(vals)), key=lambda k: (vals[k].real, vals[k].imag))
    groups: list[list[int]] = []
    for k in order:
        for g in groups:
            if any(abs(vals[k] - vals[m]) <= tol for m in g):
                g.append(k)
                break
        else:
            groups.append([k])
    return groups


def _try_split(mats: list[np.ndarray], coeffs: np.ndarray, tol: float):
    M = sum(c * m for c, m in zip(coeffs, mats))
    vals, vecs = np.linalg.eig(M)
    scale = max(1.0, max(np.linalg.norm(m, 2) for m in mats))
    out = []
    ok = True
    for group in _cluster(vals, tol * scale):
        block = vecs[:, group]
        u, s, _ = np.linalg.svd(block, full_matrices=False)
        rank = int(np.sum(s > 1e-8 * s[0]))
        Q = u[:, :rank]
        jordan = rank < len(group)
        thetas, scalar = [], True
        for m in mats:
            r = Q.conj().T @ m @ Q
            theta = np.trace(r) / rank
            if np.linalg.norm(r - theta * np.eye(rank)) > tol * scale:
                scalar = False
            thetas.append(theta)
        ok &= scalar
        out.append((Q, tuple(thetas), len(group), jordan))
    return ok, out


def joint_spectrum(
    p: GaudinProblem,
    T: TensorRep,
    mu: Weight,
    seed: int = 0,
    cap: int = DEFAULT_SPECTRUM_CAP,
    tol: float = 1e-8,
) -> SpectrumRecord:
    """Joint eigenvalues of ``Xi_0..Xi_{N-1}`` on the singular vectors of weight ``mu``."""
    if T.dim > 50 * cap:
        raise ResourceCapError(f"tensor product dimension {T.dim} too large")
    basis = singular_space(T, mu)
    d = len(basis)
    if d > cap:
        raise ResourceCapError(f"singular space dimension {d} exceeds cap {cap}")
    quad_only = T.rd.rank > 1
    if d == 0:
        return SpectrumRecord(mu, 0, [], [], quadratic_only=quad_only)
    mats, B = _restrict(p, T, basis)
    rng = np.random.default_rng(seed)
    ok, groups = _try_split(mats, rng.normal(size=p.N), tol)
    retried = False
    if not ok:
        retried = True
        ok, groups = _try_split(mats, rng.normal(size=p.N), tol)
    entries = []
    for Q, thetas, mult, jordan in groups:
        vecs = [B @ Q[:, k] for k in range(Q.shape[1])]
        res = []
        for i in range(p.N):
            worst = 0.0
            for v in vecs:
                xv = apply_gaudin_hamiltonian(p, T, i, v)
                worst = max(worst, float(np.linalg.norm(xv - thetas[i] * v) / np.linalg.norm(v)))
            res.append(worst)
        entries.append(JointEigenvalue(thetas, mult, vecs, tuple(res), jordan or not ok))
    entries.sort(key=lambda e: tuple((v.real, v.imag) for v in e.values))
    return SpectrumRecord(mu, d, entries, mats, quadratic_only=quad_only, retried=retried)
