"""Highest-weight representations of ``sl_n`` with exact Chevalley matrices.

Verma modules are built weight space by weight space from words
``F_{i1} ... F_{ik} v``.  The linear relations among words (they live in
``U(n_-)`` and do not depend on the highest weight) are detected with the
contravariant form at an auxiliary weight chosen off every reducibility
hyperplane (strictly antidominant after the rho shift).  Irreducibles are the quotient of a truncated Verma module by
the kernel of its contravariant (Shapovalov) form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import exact
from .errors import ResourceCapError
from .liealg import RootData, Weight

__all__ = [
    "Representation",
    "TensorRep",
    "irreducible_rep",
    "verma_rep",
    "tensor_rep",
    "singular_space",
    "DEFAULT_DIM_CAP",
]

DEFAULT_DIM_CAP = 2000


@dataclass(eq=False)
class Representation:
    """Finite weight basis with exact matrices ``E_i, F_i, H_i`` (1-based ``i``).

    ``kind`` is ``"irreducible"`` or ``"verma"``; a Verma module is truncated
    at root height ``depth`` and its ``F_i`` kill the top layer.
    """

    rd: RootData
    highest_weight: Weight
    weights: list[Weight]
    labels: list[tuple[int, ...]]
    E_mats: list[np.ndarray] = field(repr=False)
    F_mats: list[np.ndarray] = field(repr=False)
    kind: str = "irreducible"
    depth: int | None = None

    @property
    def dim(self) -> int:
        return len(self.weights)

    def E(self, i: int) -> np.ndarray:
        return self.E_mats[self.rd._index(i)]

    def F(self, i: int) -> np.ndarray:
        return self.F_mats[self.rd._index(i)]

    def H(self, i: int) -> np.ndarray:
        return self._H[self.rd._index(i)]

    @cached_property
    def _H(self) -> list[np.ndarray]:
        out = []
        for i in range(self.rd.rank):
            h = exact.zeros((self.dim, self.dim))
            for k, w in enumerate(self.weights):
                h[k, k] = w[i]
            out.append(h)
        return out

    def weight_multiplicities(self) -> dict[tuple, int]:
        mult: dict[tuple, int] = {}
        for w in self.weights:
            mult[w.coords] = mult.get(w.coords, 0) + 1
        return mult

    def states_of_weight(self, mu: Weight) -> list[int]:
        return [k for k, w in enumerate(self.weights) if w == mu]


def _generic_weight(rank: int) -> Weight:
    # lam + rho strictly antidominant: <lam + rho, beta^vee> < 0 for every
    # positive root, so M_lam is irreducible and its form nondegenerate
    return Weight([-2] * rank)


def _levels(rank: int, depth: int, box: Sequence[int] | None):
    out = []
    for h in range(depth + 1):
        level = []
        for beta in itertools.product(range(h + 1), repeat=rank):
            if sum(beta) != h:
                continue
            if box is not None and any(b > m for b, m in zip(beta, box)):
                continue
            level.append(beta)
        level.sort(key=lambda b: tuple(-x for x in b))
        out.extend(level)
    return out


def _shift(beta, i, sign=1):
    b = list(beta)
    b[i] += sign
    return tuple(b) if b[i] >= 0 else None


class _VermaBuilder:
    """Weight-space data of a truncated Verma module.

    ``basis[beta]`` lists words; ``F[i][beta]`` maps level ``beta`` to
    ``beta + e_i``; ``E[i][beta]`` maps ``beta`` to ``beta - e_i`` (at the
    actual highest weight); ``gram`` is the form at the auxiliary weight.
    """

    def __init__(self, rd: RootData, lam: Weight, depth: int, box=None):
        self.rd = rd
        self.lam = lam
        self.aux = _generic_weight(rd.rank)
        self.levels = _levels(rd.rank, depth, box)
        self.basis: dict[tuple, list[tuple[int, ...]]] = {}
        self.F: list[dict] = [dict() for _ in range(rd.rank)]
        self.E: list[dict] = [dict() for _ in range(rd.rank)]
        self.E_aux: list[dict] = [dict() for _ in range(rd.rank)]
        self.gram: dict[tuple, np.ndarray] = {}
        # for each basis word at beta: (first letter i, index of tail at beta - e_i)
        self.origin: dict[tuple, list[tuple[int, int]]] = {}
        for beta in self.levels:
            self._add_level(beta)

    def _weight_pair(self, base: Weight, beta) -> Weight:
        return base - self.rd.from_root_coordinates(beta)

    def _add_level(self, beta):
        rank = self.rd.rank
        if not any(beta):
            self.basis[beta] = [()]
            self.gram[beta] = exact.eye(1)
            self.origin[beta] = []
            for i in range(rank):
                self.E[i][beta] = exact.zeros((0, 1))
                self.E_aux[i][beta] = exact.zeros((0, 1))
            return
        cands = []  # (i, tail index)
        for i in range(rank):
            lower = _shift(beta, i, -1)
            if lower is None or lower not in self.basis:
                continue
            cands.extend((i, k) for k in range(len(self.basis[lower])))
        ncand = len(cands)
        gram = exact.zeros((ncand, ncand))
        for a, (i, b) in enumerate(cands):
            lo_i = _shift(beta, i, -1)
            g_lo = self.gram[lo_i]
            for c, (j, bp) in enumerate(cands):
                if c < a:
                    gram[a, c] = gram[c, a]
                    continue
                # <F_i b, F_j b'> = <b, F_j E_i b'> + delta_ij <wt b', a_i^vee> <b, b'>
                lo_j = _shift(beta, j, -1)
                vec = exact.zeros(len(self.basis[lo_i]))
                lo_ij = _shift(lo_j, i, -1)
                if lo_ij is not None and lo_ij in self.basis:
                    e_col = self.E_aux[i][lo_j][:, bp]
                    vec = vec + self.F[j][lo_ij] @ e_col
                if i == j:
                    m = self._weight_pair(self.aux, lo_j)[i]
                    vec[bp] += m
                gram[a, c] = exact.dot(g_lo[b], vec)
        sel = exact.independent_rows(gram.tolist())
        words = []
        for a in sel:
            i, b = cands[a]
            words.append((i + 1,) + self.basis[_shift(beta, i, -1)][b])
        self.basis[beta] = words
        self.origin[beta] = [cands[a] for a in sel]
        g_sel = gram[np.ix_(sel, sel)]
        self.gram[beta] = g_sel
        coords = exact.solve(g_sel, gram[sel, :])  # candidate -> basis coordinates
        for i in range(rank):
            lower = _shift(beta, i, -1)
            if lower is None or lower not in self.basis:
                continue
            cols = [a for a, (ci, _) in enumerate(cands) if ci == i]
            self.F[i][lower] = coords[:, cols]
        for i in range(rank):
            self.E[i][beta] = self._raise(beta, i, self.lam, self.E)
            self.E_aux[i][beta] = self._raise(beta, i, self.aux, self.E_aux)

    def _raise(self, beta, i, base: Weight, E):
        lower = _shift(beta, i, -1)
        n_here = len(self.basis[beta])
        if lower is None or lower not in self.basis:
            return exact.zeros((0, n_here))
        out = exact.zeros((len(self.basis[lower]), n_here))
        for col, (j, bp) in enumerate(self.origin[beta]):
            lo_j = _shift(beta, j, -1)
            lo_ij = _shift(lo_j, i, -1)
            # E_i F_j b' = F_j E_i b' + delta_ij <wt b', a_i^vee> b'
            if lo_ij is not None and lo_ij in self.basis:
                out[:, col] = out[:, col] + self.F[j][lo_ij] @ E[i][lo_j][:, bp]
            if i == j:
                out[bp, col] += self._weight_pair(base, lo_j)[i]
        return out


def _assemble(rd: RootData, lam: Weight, levels, basis, E, F, kind, depth) -> Representation:
    offsets = {}
    weights, labels = [], []
    for beta in levels:
        if beta not in basis or not basis[beta]:
            continue
        offsets[beta] = len(weights)
        mu = lam - rd.from_root_coordinates(beta)
        for w in basis[beta]:
            weights.append(mu)
            labels.append(w)
    dim = len(weights)
    E_mats, F_mats = [], []
    for i in range(rd.rank):
        Em, Fm = exact.zeros((dim, dim)), exact.zeros((dim, dim))
        for beta, off in offsets.items():
            n = len(basis[beta])
            up = _shift(beta, i, 1)
            if up in offsets and beta in F[i]:
                blk = F[i][beta]
                Fm[offsets[up]:offsets[up] + blk.shape[0], off:off + n] = blk
            lo = _shift(beta, i, -1)
            if lo in offsets:
                blk = E[i][beta]
                Em[offsets[lo]:offsets[lo] + blk.shape[0], off:off + n] = blk
        E_mats.append(Em)
        F_mats.append(Fm)
    return Representation(rd, lam, weights, labels, E_mats, F_mats, kind=kind, depth=depth)


def verma_rep(rd: RootData, lam: Weight, depth: int) -> Representation:
    """Verma module ``M_lam`` truncated to root height ``<= depth``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    b = _VermaBuilder(rd, lam, depth)
    return _assemble(rd, lam, b.levels, b.basis, b.E, b.F, "verma", depth)


def irreducible_rep(rd: RootData, lam: Weight, dim_cap: int = DEFAULT_DIM_CAP) -> Representation:
    """Finite-dimensional irreducible ``V_lam`` as a Shapovalov quotient of ``M_lam``."""
    if lam.rank != rd.rank:
        raise ValueError("weight rank does not match root data")
    if not lam.is_dominant_integral():
        raise ValueError(f"{lam} is not dominant integral")
    expected = rd.weyl_dimension(lam)
    if expected > dim_cap:
        raise ResourceCapError(f"dim V_{lam} = {expected} exceeds cap {dim_cap}")
    box = [int(c) for c in rd.root_coordinates(lam - rd.w0(lam))]
    depth = sum(box)
    vb = _VermaBuilder(rd, lam, depth, box=box)

    # contravariant form at lam, level by level: <F_i b, y> = <b, E_i y>
    shap: dict[tuple, np.ndarray] = {}
    for beta in vb.levels:
        n = len(vb.basis[beta])
        if not any(beta):
            shap[beta] = exact.eye(1)
            continue
        g = exact.zeros((n, n))
        for a, (i, b) in enumerate(vb.origin[beta]):
            lo = _shift(beta, i, -1)
            g[a, :] = shap[lo][b, :] @ vb.E[i][beta]
        shap[beta] = g

    keep: dict[tuple, list[int]] = {}
    proj: dict[tuple, np.ndarray] = {}
    for beta in vb.levels:
        g = shap[beta]
        sel = exact.independent_rows(g.tolist())
        keep[beta] = sel
        if sel:
            proj[beta] = exact.solve(g[np.ix_(sel, sel)], g[sel, :])

    basis = {beta: [vb.basis[beta][k] for k in keep[beta]] for beta in vb.levels if keep[beta]}
    E = [dict() for _ in range(rd.rank)]
    F = [dict() for _ in range(rd.rank)]
    for beta in basis:
        sel = keep[beta]
        for i in range(rd.rank):
            up = _shift(beta, i, 1)
            if up in basis and beta in vb.F[i]:
                F[i][beta] = proj[up] @ vb.F[i][beta][:, sel]
            lo = _shift(beta, i, -1)
            if lo in basis:
                E[i][beta] = proj[lo] @ vb.E[i][beta][:, sel]
    rep = _assemble(rd, lam, vb.levels, basis, E, F, "irreducible", None)
    assert rep.dim == expected, f"quotient has dim {rep.dim}, Weyl formula gives {expected}"
    return rep


@dataclass(eq=False)
class TensorRep:
    """Tensor product of representations; basis ordered with the first factor slowest."""

    factors: list[Representation]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one factor")
        rd = self.factors[0].rd
        if any(f.rd != rd for f in self.factors):
            raise ValueError("factors have mismatched root data")
        self.rd = rd

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_sites(self) -> int:
        return len(self.factors)

    @cached_property
    def weights(self) -> list[Weight]:
        out = []
        for combo in itertools.product(*(f.weights for f in self.factors)):
            acc = combo[0]
            for w in combo[1:]:
                acc = acc + w
            out.append(acc)
        return out

    def weight_multiplicities(self) -> dict[tuple, int]:
        mult: dict[tuple, int] = {}
        for w in self.weights:
            mult[w.coords] = mult.get(w.coords, 0) + 1
        return mult

    def states_of_weight(self, mu: Weight) -> list[int]:
        return [k for k, w in enumerate(self.weights) if w == mu]

    def site_operator(self, op: np.ndarray, site: int) -> np.ndarray:
        """Full matrix of ``op`` acting in factor ``site`` (0-based)."""
        out = None
        for k, f in enumerate(self.factors):
            piece = op if k == site else exact.eye(f.dim)
            out = piece if out is None else np.kron(out, piece)
        return out

    def apply_site(self, op: np.ndarray, site: int, vec: np.ndarray) -> np.ndarray:
        """``op^{(site)} vec`` without forming the full matrix."""
        t = np.asarray(vec).reshape(self.dims)
        t = np.tensordot(op, t, axes=([1], [site]))
        t = np.moveaxis(t, 0, site)
        return t.reshape(-1)

    def total(self, name: str, i: int) -> np.ndarray:
        """Diagonal action of a Chevalley generator: ``sum_site X^{(site)}``."""
        acc = None
        for s, f in enumerate(self.factors):
            m = self.site_operator(getattr(f, name)(i), s)
            acc = m if acc is None else acc + m
        return acc

    def apply_total(self, name: str, i: int, vec: np.ndarray) -> np.ndarray:
        acc = None
        for s, f in enumerate(self.factors):
            v = self.apply_site(getattr(f, name)(i), s, vec)
            acc = v if acc is None else acc + v
        return acc

    def highest_vector(self) -> np.ndarray:
        v = exact.zeros(self.dim)
        v[0] = Fraction(1)
        return v


def tensor_rep(factors: Sequence[Representation]) -> TensorRep:
    return TensorRep(list(factors))


def singular_space(T: TensorRep, mu: Weight) -> list[np.ndarray]:
    """Exact basis of vectors of weight ``mu`` killed by every total ``E_i``."""
    idx = T.states_of_weight(mu)
    if not idx:
        return []
    rows = []
    for i in range(1, T.rd.rank + 1):
        target = T.states_of_weight(mu + T.rd.alpha(i))
        if not target:
            continue
        block = exact.zeros((len(target), len(idx)))
        for c, k in enumerate(idx):
            e = exact.zeros(T.dim)
            e[k] = Fraction(1)
            out = T.apply_total("E", i, e)
            block[:, c] = out[target]
        rows.append(block)
    if rows:
        kernel = exact.nullspace(np.concatenate(rows, axis=0))
    else:
        kernel = exact.nullspace(exact.zeros((0, len(idx))), ncols=len(idx))
    basis = []
    for v in kernel:
        full = exact.zeros(T.dim)
        full[idx] = v
        basis.append(full)
    return basis
