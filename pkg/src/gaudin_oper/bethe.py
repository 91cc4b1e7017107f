"""Bethe Ansatz equations: residuals, Jacobian, a multistart Newton solver,
and Bethe vectors from the ordered-partition formula.

Colours (simple-root labels) are 1-based; sites are 0-based.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import exact
from .errors import DegenerateInputError, ResourceCapError
from .gaudin import GaudinProblem
from .liealg import Weight
from .repmod import TensorRep

__all__ = [
    "BetheSolution",
    "SolverConfig",
    "SolveResult",
    "bae_residual",
    "bae_jacobian",
    "solve_bae",
    "bethe_vector",
    "solution_weight",
    "admissible_color_counts",
    "colors_from_counts",
    "highest_weight_defect",
]

log = logging.getLogger(__name__)

BETHE_VECTOR_CAP = 6


@dataclass(frozen=True)
class BetheSolution:
    """Coloured points ``(w_j, i_j)``; ``residual`` is the max-norm of the BAE residual."""

    w: tuple
    colors: tuple[int, ...]
    residual: float = float("nan")
    jacobian_cond: float = float("nan")
    degenerate: bool = False

    def __post_init__(self):
        if len(self.w) != len(self.colors):
            raise ValueError("one colour per Bethe root")

    @property
    def m(self) -> int:
        return len(self.w)

    def canonical(self) -> "BetheSolution":
        """Sort by colour, then by (real, imag) inside each colour."""
        order = sorted(range(self.m), key=lambda k: (self.colors[k],) + _point_key(self.w[k]))
        return replace(self, w=tuple(self.w[k] for k in order), colors=tuple(self.colors[k] for k in order))

    def perturbed(self, j: int, delta) -> "BetheSolution":
        w = list(self.w)
        w[j] = w[j] + delta
        return replace(self, w=tuple(w), residual=float("nan"))


def _point_key(x):
    x = complex(x)
    # rounding keeps the order stable against last-digit noise
    return (round(x.real, 9), round(x.imag, 9))


def _check_distinct(p: GaudinProblem, w: Sequence, colors: Sequence[int]):
    for j, wj in enumerate(w):
        for i, zi in enumerate(p.z):
            if wj == zi:
                raise DegenerateInputError(f"w_{j} coincides with z_{i}")
        for s in range(j + 1, len(w)):
            if wj == w[s]:
                raise DegenerateInputError(f"w_{j} coincides with w_{s}")
    for c in colors:
        p.rd._index(c)


def _coupling(p: GaudinProblem, colors: Sequence[int]):
    """``L[j][i] = <lam_i, a_{c_j}^vee>`` and ``A[s][j] = <a_{c_s}, a_{c_j}^vee>``."""
    L = [[lam[c - 1] for lam in p.weights] for c in colors]
    A = [[p.rd.cartan[cs - 1][cj - 1] for cj in colors] for cs in colors]
    return L, A


def bae_residual(p: GaudinProblem, s: BetheSolution) -> list:
    """``r_j = sum_i <lam_i, a_j^vee>/(w_j - z_i) - sum_{s != j} <a_s, a_j^vee>/(w_j - w_s)``."""
    _check_distinct(p, s.w, s.colors)
    L, A = _coupling(p, s.colors)
    out = []
    for j, wj in enumerate(s.w):
        r = sum((L[j][i] / (wj - zi) for i, zi in enumerate(p.z)), 0 * wj)
        r -= sum((A[t][j] / (wj - s.w[t]) for t in range(s.m) if t != j), 0 * wj)
        out.append(r)
    return out


def bae_jacobian(p: GaudinProblem, s: BetheSolution) -> np.ndarray:
    """``d r_j / d w_k`` in closed form (``m x m``)."""
    _check_distinct(p, s.w, s.colors)
    L, A = _coupling(p, s.colors)
    m = s.m
    exact_pts = all(isinstance(x, (int, Fraction)) for x in tuple(s.w) + p.z)
    J = exact.zeros((m, m)) if exact_pts else np.zeros((m, m), dtype=complex)
    for j, wj in enumerate(s.w):
        diag = -sum((L[j][i] / (wj - zi) ** 2 for i, zi in enumerate(p.z)), 0 * wj)
        for k in range(m):
            if k == j:
                continue
            d = (wj - s.w[k]) ** 2
            diag += A[k][j] / d
            J[j, k] = -A[k][j] / d
        J[j, j] = diag
    return J


class _Numeric:
    """Vectorized residual/Jacobian for the solver (complex arithmetic)."""

    def __init__(self, p: GaudinProblem, colors: Sequence[int]):
        L, A = _coupling(p, colors)
        self.z = np.array([complex(x) for x in p.z])
        self.L = np.array(L, dtype=float)
        self.A = np.array(A, dtype=float)
        self.m = len(colors)
        self.mask = self.L != 0
        self.scale = max(1.0, float(np.max(np.abs(self.z))))

    @staticmethod
    def _inv_diff(w: np.ndarray) -> np.ndarray:
        dw = w[:, None] - w[None, :]
        np.fill_diagonal(dw, 1.0)
        inv = 1.0 / dw
        np.fill_diagonal(inv, 0.0)
        return inv

    def residual(self, w: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            dz = 1.0 / (w[:, None] - self.z[None, :])
            inv = self._inv_diff(w)
            return (self.L * dz).sum(axis=1) - (self.A.T * inv).sum(axis=1)

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            dz2 = 1.0 / (w[:, None] - self.z[None, :]) ** 2
            inv2 = self._inv_diff(w) ** 2
            J = -self.A.T * inv2
            np.fill_diagonal(J, -(self.L * dz2).sum(axis=1) + (self.A.T * inv2).sum(axis=1))
            return J

    def cleared(self, w: np.ndarray):
        """``g_j = q_j(w_j) r_j`` with ``q_j = prod (w_j - z_i)/scale`` over sites coupled to colour j.

        Same finite roots as the residual, but ``g`` does not decay as a root
        runs off to infinity, so the line search is not drawn there.
        """
        r = self.residual(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = (w[:, None] - self.z[None, :]) / self.scale
            q = np.where(self.mask, d, 1.0).prod(axis=1)
        return r, q * r, q

    def cleared_jacobian(self, w: np.ndarray, r: np.ndarray, q: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            dlogq = np.where(self.mask, 1.0 / (w[:, None] - self.z[None, :]), 0.0).sum(axis=1)
        J = q[:, None] * self.jacobian(w)
        J[np.diag_indices(self.m)] += q * dlogq * r
        return J


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    starts: int | None = None  # default 64 * m
    tol: float = 1e-12
    dedup: float = 1e-8
    max_iter: int = 200
    max_halvings: int = 20
    collision: float = 1e-6
    degenerate_cond: float = 1e10
    threads: int | None = None  # default: GAUDIN_THREADS or 1

    def n_starts(self, m: int) -> int:
        return self.starts if self.starts is not None else 64 * m

    def n_threads(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        return max(1, int(os.environ.get("GAUDIN_THREADS", "1")))


@dataclass
class SolveResult:
    """Outcome of :func:`solve_bae`; iterating yields the regular solutions."""

    colors: tuple[int, ...]
    solutions: list[BetheSolution]
    collisions: list[BetheSolution] = field(default_factory=list)
    converged_starts: int = 0
    total_starts: int = 0

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]


def _initial_points(p: GaudinProblem, m: int, cfg: SolverConfig) -> list[np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    z = np.array([complex(x) for x in p.z])
    R = 2.0 * max(1.0, float(np.max(np.abs(z))))
    n = cfg.n_starts(m)
    mids = [(a + b) / 2 for a, b in itertools.combinations(z, 2)] or list(z)
    starts = []
    for k in range(n):
        if k % 4 == 0:
            # midpoints between marked points, jittered
            picks = rng.integers(len(mids), size=m)
            jitter = 0.1 * R * (rng.normal(size=m) + 1j * rng.normal(size=m)) / 4
            starts.append(np.array([mids[q] for q in picks]) + jitter)
        else:
            rad = R * np.sqrt(rng.random(m))
            ang = 2 * np.pi * rng.random(m)
            starts.append(rad * np.exp(1j * ang))
    return starts


def _newton(f: _Numeric, w0: np.ndarray, cfg: SolverConfig, escape: float):
    w = w0.astype(complex)
    r, g, q = f.cleared(w)
    if not np.all(np.isfinite(g)):
        return None
    norm = np.linalg.norm(g)
    polish = 0
    for _ in range(cfg.max_iter):
        if np.max(np.abs(r)) < cfg.tol:
            polish += 1
            if polish > 2:
                break
        J = f.cleared_jacobian(w, r, q)
        try:
            step = np.linalg.solve(J, -g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        for _h in range(cfg.max_halvings + 1):
            w_new = w + lam * step
            r_new, g_new, q_new = f.cleared(w_new)
            n_new = np.linalg.norm(g_new)
            if np.all(np.isfinite(g_new)) and n_new < norm:
                break
            lam /= 2
        else:
            break
        w, r, g, q, norm = w_new, r_new, g_new, q_new, n_new
        if np.max(np.abs(w)) > escape:
            return None
    if np.all(np.isfinite(r)) and np.max(np.abs(r)) < cfg.tol:
        return w, float(np.max(np.abs(r)))
    return None


def _match_distance(a: BetheSolution, b: BetheSolution) -> float:
    worst = 0.0
    for c in set(a.colors):
        xa = np.array([complex(w) for w, k in zip(a.w, a.colors) if k == c])
        xb = np.array([complex(w) for w, k in zip(b.w, b.colors) if k == c])
        cost = np.abs(xa[:, None] - xb[None, :])
        rows, cols = linear_sum_assignment(cost)
        worst = max(worst, float(cost[rows, cols].max()))
    return worst


def _is_collision(p: GaudinProblem, s: BetheSolution, radius: float) -> bool:
    for j, wj in enumerate(s.w):
        if any(abs(wj - complex(z)) < radius for z in p.z):
            return True
        for t in range(j + 1, s.m):
            if s.colors[t] == s.colors[j] and abs(wj - s.w[t]) < radius:
                return True
    return False


def solve_bae(p: GaudinProblem, colors: Sequence[int], cfg: SolverConfig | None = None) -> SolveResult:
    """All Bethe roots with the given colours found by multistart damped Newton.

    Solutions are deduplicated modulo permutations of equal colours; roots
    within ``cfg.collision`` of a marked point or of a same-coloured root go
    to the ``collisions`` bucket.
    """
    cfg = cfg or SolverConfig()
    colors = tuple(sorted(colors))
    for c in colors:
        p.rd._index(c)
    m = len(colors)
    if m == 0:
        return SolveResult(colors, [BetheSolution((), (), 0.0, 1.0)], [], 1, 1)
    f = _Numeric(p, colors)
    starts = _initial_points(p, m, cfg)
    escape = 1e6 * max(1.0, max(abs(complex(z)) for z in p.z))

    def run(w0):
        return _newton(f, w0, cfg, escape)

    threads = cfg.n_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(w0) for w0 in starts]

    found = []
    for res in results:
        if res is None:
            continue
        w, resid = res
        s = BetheSolution(tuple(complex(x) for x in w), colors, resid).canonical()
        found.append(s)
    converged = len(found)
    # deterministic representative choice: canonical key, then residual
    found.sort(key=lambda s: (tuple(_point_key(x) for x in s.w), s.residual))

    clusters: list[BetheSolution] = []
    for s in found:
        if any(_match_distance(s, c) < cfg.dedup for c in clusters):
            continue
        clusters.append(s)

    good, bad = [], []
    for s in clusters:
        J = f.jacobian(np.array(s.w))
        cond = float(np.linalg.cond(J))
        s = replace(s, jacobian_cond=cond, degenerate=not np.isfinite(cond) or cond > cfg.degenerate_cond)
        (bad if _is_collision(p, s, cfg.collision) else good).append(s)
    log.debug("colors %s: %d/%d starts converged, %d solutions", colors, converged, len(starts), len(good))
    return SolveResult(colors, good, bad, converged, len(starts))


def solution_weight(p: GaudinProblem, colors: Sequence[int]) -> Weight:
    """``mu = sum_i lam_i - sum_j alpha_{c_j}``."""
    mu = p.total_weight()
    for c in colors:
        mu = mu - p.rd.alpha(c)
    return mu


def admissible_color_counts(p: GaudinProblem) -> list[tuple[int, ...]]:
    """Colour counts ``n`` with ``sum lam_i - sum n_k alpha_k`` dominant (and equal to
    ``-w0(lam_inf)`` when a weight at infinity is fixed)."""
    rd = p.rd
    total = p.total_weight()
    bound = [int(c) for c in rd.root_coordinates(total)]
    target = -rd.w0(p.lam_inf) if p.lam_inf is not None else None
    out = []
    for n in itertools.product(*(range(b + 1) for b in bound)):
        mu = total - rd.from_root_coordinates(n)
        if not mu.is_dominant_integral():
            continue
        if target is not None and mu != target:
            continue
        out.append(n)
    out.sort(key=lambda n: (sum(n), n))
    return out


def colors_from_counts(counts: Sequence[int]) -> tuple[int, ...]:
    return tuple(c for c, n in enumerate(counts, start=1) for _ in range(n))


def bethe_vector(p: GaudinProblem, s: BetheSolution, T: TensorRep, cap: int = BETHE_VECTOR_CAP) -> np.ndarray:
    """Bethe vector as a sum over ordered partitions of ``{1..m}`` among the sites.

    Exact (object dtype) when all points are rational, complex otherwise.
    The per-site sum over orderings is memoized on (first root, remaining set).
    """
    if s.m > cap:
        raise ResourceCapError(f"Bethe vector with m={s.m} exceeds cap {cap}")
    _check_distinct(p, s.w, s.colors)
    if T.n_sites != p.N:
        raise ValueError("tensor product and problem have different numbers of sites")
    exact_pts = all(isinstance(x, (int, Fraction)) for x in tuple(s.w) + p.z)
    conv = (lambda a: a) if exact_pts else exact.to_complex
    Fm = [[conv(f.F(c)) for c in range(1, p.rd.rank + 1)] for f in T.factors]
    w = s.w
    m = s.m

    def top(site):  # highest weight vector of the site factor
        v = exact.zeros(T.factors[site].dim) if exact_pts else np.zeros(T.factors[site].dim, dtype=complex)
        v[0] = 1
        return v

    caches = [_site_sum(Fm[site], s, p.z[site], top(site)) for site in range(p.N)]

    phi = exact.zeros(T.dim) if exact_pts else np.zeros(T.dim, dtype=complex)
    for assign in itertools.product(range(p.N), repeat=m):
        vec = None
        for site in range(p.N):
            S = frozenset(k for k in range(m) if assign[k] == site)
            piece = caches[site](S)
            vec = piece if vec is None else np.kron(vec, piece)
        phi = phi + vec
    return phi * (-1) ** m


def _site_sum(F: list, s: BetheSolution, z, v):
    """Memoized sum over orderings of a subset of roots acting on one factor."""
    w = s.w

    @lru_cache(maxsize=None)
    def chain(first, rest):
        # orderings (k_2..k_a) of rest: F..F v / ((w_first - w_k2) ... (w_ka - z))
        if not rest:
            return v * (1 / (w[first] - z))
        acc = None
        for k in sorted(rest):
            term = (F[s.colors[k] - 1] @ chain(k, rest - {k})) * (1 / (w[first] - w[k]))
            acc = term if acc is None else acc + term
        return acc

    @lru_cache(maxsize=None)
    def block(S):
        if not S:
            return v
        acc = None
        for k in sorted(S):
            term = F[s.colors[k] - 1] @ chain(k, S - {k})
            acc = term if acc is None else acc + term
        return acc

    return block


def highest_weight_defect(T: TensorRep, phi: np.ndarray) -> float:
    """``max_i ||E_i phi|| / ||phi||`` for the diagonal action (complex arithmetic)."""
    v = exact.to_complex(phi) if phi.dtype == object else phi
    norm = np.linalg.norm(v)
    if norm == 0:
        return float("inf")
    worst = 0.0
    for i in range(1, T.rd.rank + 1):
        acc = np.zeros_like(v)
        for site, f in enumerate(T.factors):
            acc = acc + T.apply_site(exact.to_complex(f.E(i)), site, v)
        worst = max(worst, float(np.linalg.norm(acc) / norm))
    return worst
