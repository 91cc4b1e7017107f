"""Type A root data, weights in fundamental-weight coordinates, and the Weyl group.

Simple-root indices are 1-based throughout (``1 <= i <= rank``), matching
the colour labels of Bethe roots in problem files.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

__all__ = [
    "RootData",
    "Weight",
    "WeylElement",
    "type_a_data",
    "pairing",
    "shifted_weyl_action",
    "classify_weight_at_infinity",
    "weyl_group",
]


@dataclass(frozen=True)
class Weight:
    """Weight given by its coordinates ``m_i = <lambda, alpha_i^vee>``."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight([a + b for a, b in zip(self.coords, other.coords, strict=True)])

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight([a - b for a, b in zip(self.coords, other.coords, strict=True)])

    def __neg__(self) -> "Weight":
        return Weight([-a for a in self.coords])

    def __mul__(self, c) -> "Weight":
        return Weight([c * a for a in self.coords])

    __rmul__ = __mul__

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_dominant_integral(self) -> bool:
        return self.is_integral() and all(c >= 0 for c in self.coords)

    def __repr__(self):
        return "Weight(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class RootData:
    """Root data of ``sl_{rank+1}``.

    ``simple_roots[i-1]`` is ``alpha_i`` in fundamental coordinates (the i-th
    row of the Cartan matrix); ``inverse_cartan`` converts fundamental to
    root coordinates and is the Gram matrix of the trace-form pairing on
    weights.
    """

    rank: int
    cartan: tuple[tuple[int, ...], ...]
    inverse_cartan: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def n(self) -> int:
        """Size of the defining representation."""
        return self.rank + 1

    @cached_property
    def simple_roots(self) -> tuple[Weight, ...]:
        return tuple(Weight(row) for row in self.cartan)

    @cached_property
    def fundamental_weights(self) -> tuple[Weight, ...]:
        return tuple(Weight([int(i == j) for j in range(self.rank)]) for i in range(self.rank))

    @cached_property
    def rho(self) -> Weight:
        return Weight([1] * self.rank)

    def zero(self) -> Weight:
        return Weight([0] * self.rank)

    def alpha(self, i: int) -> Weight:
        return self.simple_roots[self._index(i)]

    def omega(self, i: int) -> Weight:
        return self.fundamental_weights[self._index(i)]

    def _index(self, i: int) -> int:
        if not 1 <= i <= self.rank:
            raise IndexError(f"simple index {i} outside 1..{self.rank}")
        return i - 1

    def root_coordinates(self, lam: Weight) -> tuple[Fraction, ...]:
        """Coefficients of ``lam`` on the simple roots."""
        return tuple(
            sum((self.inverse_cartan[i][j] * lam[j] for j in range(self.rank)), Fraction(0))
            for i in range(self.rank)
        )

    def from_root_coordinates(self, coeffs: Sequence) -> Weight:
        out = self.zero()
        for i, c in enumerate(coeffs, start=1):
            out = out + self.alpha(i) * Fraction(c)
        return out

    def inner(self, lam: Weight, mu: Weight) -> Fraction:
        """Invariant pairing normalized by the defining trace form, ``(alpha, alpha) = 2``."""
        return sum(
            (lam[i] * self.inverse_cartan[i][j] * mu[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def epsilon_coordinates(self, lam: Weight) -> tuple[Fraction, ...]:
        """Coordinates in ``eps_1..eps_n`` (summing to zero); ``omega_k = eps_1+..+eps_k - k/n sum eps``."""
        n = self.n
        out = []
        for j in range(1, n + 1):
            out.append(sum((lam[k - 1] * (Fraction(int(j <= k)) - Fraction(k, n)) for k in range(1, n)), Fraction(0)))
        return tuple(out)

    def from_epsilon(self, eps: Sequence) -> Weight:
        return Weight([Fraction(eps[i]) - Fraction(eps[i + 1]) for i in range(self.rank)])

    def w0(self, lam: Weight) -> Weight:
        """Action of the longest Weyl element: ``w0(lam)``."""
        return Weight([-c for c in reversed(lam.coords)])

    def reflect(self, i: int, lam: Weight) -> Weight:
        return lam - self.alpha(i) * lam[self._index(i)]

    def casimir_value(self, lam: Weight) -> Fraction:
        """Eigenvalue of the quadratic Casimir on ``V_lam``: ``(lam, lam + 2 rho)/2``."""
        return self.inner(lam, lam + self.rho * 2) / 2

    def weyl_dimension(self, lam: Weight) -> int:
        """Weyl dimension formula for ``V_lam``."""
        num, den = Fraction(1), Fraction(1)
        for root in self.positive_roots():
            coeffs = self.root_coordinates(root)
            # alpha^vee = alpha for simply laced; <lam, alpha^vee> = sum c_i m_i
            num *= sum((c * (lam[i] + 1) for i, c in enumerate(coeffs)), Fraction(0))
            den *= sum(coeffs, Fraction(0))
        val = num / den
        assert val.denominator == 1
        return int(val)

    def positive_roots(self) -> list[Weight]:
        """``alpha_i + ... + alpha_j`` for ``1 <= i <= j <= rank``."""
        out = []
        for i in range(1, self.rank + 1):
            acc = self.zero()
            for j in range(i, self.rank + 1):
                acc = acc + self.alpha(j)
                out.append(acc)
        return out


def type_a_data(rank: int) -> RootData:
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    cartan = tuple(
        tuple(2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(rank)) for i in range(rank)
    )
    n = rank + 1
    # inverse Cartan matrix of A_l: min(i,j) (n - max(i,j)) / n  (1-based)
    inv = tuple(
        tuple(Fraction(min(i, j) * (n - max(i, j)), n) for j in range(1, rank + 1)) for i in range(1, rank + 1)
    )
    return RootData(rank, cartan, inv)


def pairing(rd: RootData, lam: Weight, i: int) -> Fraction:
    """``<lam, alpha_i^vee>``."""
    return lam[rd._index(i)]


@dataclass(frozen=True, eq=False)
class WeylElement:
    """Element of the Weyl group written as a word ``s_{i1} s_{i2} ... s_{ik}``.

    The word acts right to left: ``s_{ik}`` is applied first.
    """

    rank: int
    word: tuple[int, ...] = ()

    @classmethod
    def identity(cls, rank: int) -> "WeylElement":
        return cls(rank, ())

    def act(self, rd: RootData, lam: Weight) -> Weight:
        for i in reversed(self.word):
            lam = rd.reflect(i, lam)
        return lam

    @cached_property
    def _rho_image(self) -> tuple[Fraction, ...]:
        rd = type_a_data(self.rank)
        return self.act(rd, rd.rho).coords

    @property
    def length(self) -> int:
        rd = type_a_data(self.rank)
        eps = rd.epsilon_coordinates(Weight(self._rho_image))
        return sum(1 for a in range(len(eps)) for b in range(a + 1, len(eps)) if eps[a] < eps[b])

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.rank, self.word + other.word)

    def inverse(self) -> "WeylElement":
        return WeylElement(self.rank, tuple(reversed(self.word)))

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.rank == other.rank and self._rho_image == other._rho_image

    def __hash__(self):
        return hash((self.rank, self._rho_image))

    def __repr__(self):
        return "WeylElement(" + ("".join(f"s{i}" for i in self.word) or "1") + ")"


def weyl_group(rd: RootData) -> list[WeylElement]:
    """All Weyl group elements with reduced words, in breadth-first (length) order."""
    start = WeylElement.identity(rd.rank)
    seen = {rd.rho.coords: start}
    order = [start]
    queue = deque([start])
    while queue:
        w = queue.popleft()
        image = w.act(rd, rd.rho)
        for i in range(1, rd.rank + 1):
            img = rd.reflect(i, image).coords
            if img not in seen:
                nw = WeylElement(rd.rank, (i,) + w.word)
                seen[img] = nw
                order.append(nw)
                queue.append(nw)
    return order


def iter_weyl(rd: RootData) -> Iterator[WeylElement]:
    yield from weyl_group(rd)


def shifted_weyl_action(rd: RootData, w: WeylElement, lam: Weight) -> Weight:
    """``w . lam = w(lam + rho) - rho``."""
    return w.act(rd, lam + rd.rho) - rd.rho


def classify_weight_at_infinity(rd: RootData, mu: Weight) -> tuple[Weight, WeylElement] | None:
    """Find dominant integral ``lam_inf`` and ``w`` with ``mu = w(-w0(lam_inf) + rho) - rho``.

    Enumerates the Weyl group, so it is meant for small ranks.  Returns
    ``None`` when ``mu + rho`` lies on a wall (no such pair exists).
    """
    if not mu.is_integral():
        raise ValueError(f"{mu} is not integral")
    shifted = mu + rd.rho
    hits = []
    for w in weyl_group(rd):
        nu = w.inverse().act(rd, shifted) - rd.rho
        if nu.is_dominant_integral():
            hits.append((nu, w))
    if not hits:
        return None
    assert len(hits) == 1, "mu + rho regular should have a unique dominant conjugate"
    nu, w = hits[0]
    lam_inf = -rd.w0(nu)
    return lam_inf, w
