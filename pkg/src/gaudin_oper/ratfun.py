"""Univariate rational functions in partial-fraction form, and scalar
linear differential operators with rational-function coefficients.

A :class:`RationalFunction` is stored as

    poly(t) + sum_x sum_{m=1}^{M_x} c_{x,m} / (t - x)^m

over one of two scalar fields: ``"Q"`` (``Fraction`` scalars, exact) or
``"C"`` (python ``complex``, with explicit tolerances).  Residues and
Laurent data are then dictionary lookups or short series manipulations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from numbers import Number
from typing import Iterable, Mapping, Sequence

from .errors import FieldMismatchError, PoleCollisionError

__all__ = [
    "INFINITY",
    "RationalFunction",
    "LaurentSeries",
    "DiffOp",
    "rf_arith",
    "laurent_expand",
    "diffop_compose",
    "compose_mobius",
]

DEFAULT_COLLISION_TOL = 1e-9


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def _coerce(x, field: str):
    if field == "Q":
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise FieldMismatchError(f"{type(x).__name__} scalar in exact field")
    if isinstance(x, (complex, float, int, Fraction)):
        return complex(x)
    raise FieldMismatchError(f"{type(x).__name__} scalar in complex field")


def _sort_key(x):
    if isinstance(x, complex):
        return (x.real, x.imag)
    return (x, 0)


def _field_of(x) -> str:
    return "C" if isinstance(x, (complex, float)) else "Q"


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated Laurent series ``sum_{k=start}^{start+len-1} coeffs[k-start] s^k``."""

    start: int
    coeffs: tuple

    @property
    def stop(self) -> int:
        return self.start + len(self.coeffs) - 1

    def __getitem__(self, k: int):
        if k > self.stop and self.coeffs:
            raise IndexError(f"exponent {k} beyond truncation order {self.stop}")
        if k < self.start:
            return 0 * self.coeffs[0] if self.coeffs else 0
        return self.coeffs[k - self.start]

    def negative_part(self) -> dict[int, object]:
        return {k: self[k] for k in range(self.start, min(0, self.stop + 1))}

    def as_dict(self) -> dict[int, object]:
        return {self.start + i: c for i, c in enumerate(self.coeffs)}


class RationalFunction:
    """Immutable rational function of ``t`` in partial-fraction form.

    ``poles`` maps a location ``x`` to ``(c_1, ..., c_M)``, the coefficients
    of ``1/(t-x)^1 .. 1/(t-x)^M``; ``poly`` lists ``a_0, a_1, ...``.
    """

    __slots__ = ("field", "poles", "poly", "zero_tol", "collision_tol")

    def __init__(
        self,
        poles: Mapping | None = None,
        poly: Sequence = (),
        field: str | None = None,
        zero_tol: float = 0.0,
        collision_tol: float = DEFAULT_COLLISION_TOL,
    ):
        poles = dict(poles or {})
        if field is None:
            scalars = list(poly) + list(poles)
            for cs in poles.values():
                scalars.extend(cs)
            field = "C" if any(_field_of(s) == "C" for s in scalars) else "Q"
        if field not in ("Q", "C"):
            raise ValueError(f"unknown field {field!r}")
        self.field = field
        self.zero_tol = zero_tol
        self.collision_tol = collision_tol

        def nonzero(c):
            return abs(c) > zero_tol if field == "C" else c != 0

        clean = {}
        for x, cs in poles.items():
            x = _coerce(x, field)
            cs = [_coerce(c, field) for c in cs]
            while cs and not nonzero(cs[-1]):
                cs.pop()
            if cs:
                if x in clean:
                    raise ValueError(f"duplicate pole location {x}")
                clean[x] = tuple(cs)
        if field == "C":
            _check_collisions(clean.keys(), collision_tol)
        self.poles = {x: clean[x] for x in sorted(clean, key=_sort_key)}
        p = [_coerce(c, field) for c in poly]
        while p and not nonzero(p[-1]):
            p.pop()
        self.poly = tuple(p)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, field: str = "Q") -> "RationalFunction":
        return cls({}, (), field=field)

    @classmethod
    def constant(cls, c, field: str | None = None) -> "RationalFunction":
        return cls({}, (c,), field=field or _field_of(c))

    @classmethod
    def t(cls, field: str = "Q") -> "RationalFunction":
        return cls({}, (0, 1), field=field)

    @classmethod
    def pole(cls, x, coeff=1, order: int = 1, field: str | None = None) -> "RationalFunction":
        """``coeff / (t - x)^order``."""
        field = field or ("C" if "C" in (_field_of(x), _field_of(coeff)) else "Q")
        cs = [0] * (order - 1) + [coeff]
        return cls({x: cs}, (), field=field)

    def _like(self, poles, poly) -> "RationalFunction":
        return RationalFunction(
            poles, poly, field=self.field, zero_tol=self.zero_tol, collision_tol=self.collision_tol
        )

    def to_complex(self) -> "RationalFunction":
        return RationalFunction(
            {complex(x): [complex(c) for c in cs] for x, cs in self.poles.items()},
            [complex(c) for c in self.poly],
            field="C",
            zero_tol=self.zero_tol,
            collision_tol=self.collision_tol,
        )

    # -- queries ------------------------------------------------------
    @property
    def locations(self) -> list:
        return list(self.poles)

    def pole_order(self, x) -> int:
        return len(self.poles.get(x, ()))

    def residue(self, x):
        cs = self.poles.get(x)
        return cs[0] if cs else self._scalar(0)

    def degree(self) -> int:
        """Degree of the polynomial part (``-1`` if it vanishes)."""
        return len(self.poly) - 1

    def is_zero(self) -> bool:
        return not self.poles and not self.poly

    def _scalar(self, c):
        return _coerce(c, self.field)

    def __call__(self, t):
        val = self._scalar(0)
        tp = self._scalar(1)
        for a in self.poly:
            val += a * tp
            tp *= t
        for x, cs in self.poles.items():
            d = t - x
            if d == 0:
                raise ZeroDivisionError(f"evaluation at pole {x}")
            inv = 1 / d
            p = inv
            for c in cs:
                val += c * p
                p *= inv
        return val

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "RationalFunction"):
        if other.field != self.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} functions")

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            self._check(other)
            return other
        if isinstance(other, Number):
            return RationalFunction({}, (self._scalar(other),), field=self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.field == "C":
            _check_collisions(set(self.poles) | set(other.poles), self.collision_tol)
        poles = {x: list(cs) for x, cs in self.poles.items()}
        for x, cs in other.poles.items():
            acc = poles.setdefault(x, [])
            for k, c in enumerate(cs):
                if k < len(acc):
                    acc[k] += c
                else:
                    acc.append(c)
        n = max(len(self.poly), len(other.poly))
        zero = self._scalar(0)
        poly = [
            (self.poly[k] if k < len(self.poly) else zero)
            + (other.poly[k] if k < len(other.poly) else zero)
            for k in range(n)
        ]
        return self._like(poles, poly)

    __radd__ = __add__

    def __neg__(self):
        return self._like({x: [-c for c in cs] for x, cs in self.poles.items()}, [-c for c in self.poly])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "RationalFunction":
        c = self._scalar(c)
        return self._like({x: [c * a for a in cs] for x, cs in self.poles.items()}, [c * a for a in self.poly])

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _multiply(self, other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return self.scale(1 / self._scalar(c))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = RationalFunction.constant(self._scalar(1), self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derive(self) -> "RationalFunction":
        poles = {}
        for x, cs in self.poles.items():
            poles[x] = [self._scalar(0)] + [-(m + 1) * c for m, c in enumerate(cs)]
        poly = [k * a for k, a in enumerate(self.poly)][1:]
        return self._like(poles, poly)

    def singular_part(self, x) -> "RationalFunction":
        return self._like({x: self.poles[x]} if x in self.poles else {}, ())

    def without_pole(self, x) -> "RationalFunction":
        return self._like({y: cs for y, cs in self.poles.items() if y != x}, self.poly)

    def laurent(self, x0, order: int) -> LaurentSeries:
        return laurent_expand(self, x0, order)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Number):
            other = RationalFunction.constant(other, self.field)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.field == other.field and self.poles == other.poles and self.poly == other.poly

    def __hash__(self):
        return hash((self.field, tuple(self.poles.items()), self.poly))

    def isclose(self, other: "RationalFunction", tol: float) -> bool:
        diff = self - other if self.field == other.field else self.to_complex() - other.to_complex()
        vals = list(diff.poly) + [c for cs in diff.poles.values() for c in cs]
        return all(abs(v) <= tol for v in vals)

    def max_abs_coefficient(self) -> float:
        vals = list(self.poly) + [c for cs in self.poles.values() for c in cs]
        return max((abs(v) for v in vals), default=0.0)

    def __repr__(self):
        terms = []
        for x, cs in self.poles.items():
            for m, c in enumerate(cs, start=1):
                if c != 0:
                    terms.append(f"({c})/(t-{x})" + (f"^{m}" if m > 1 else ""))
        for k, a in enumerate(self.poly):
            if a != 0:
                terms.append(f"({a})" + ("" if k == 0 else "*t" if k == 1 else f"*t^{k}"))
        return f"RationalFunction[{self.field}](" + (" + ".join(terms) or "0") + ")"


def _check_collisions(locs: Iterable, tol: float) -> None:
    locs = sorted(locs, key=_sort_key)
    for i, x in enumerate(locs):
        for y in locs[i + 1:]:
            if x != y and abs(x - y) < tol:
                raise PoleCollisionError(f"poles {x} and {y} collide within {tol}")


def _binom_neg(m: int, r: int) -> int:
    """Coefficient of ``s^r`` in ``(1 + s)^(-m)``."""
    return (-1) ** r * comb(m + r - 1, r)


def _taylor_shift(poly: Sequence, x) -> list:
    """Coefficients of ``p(t)`` in powers of ``(t - x)``."""
    n = len(poly)
    out = []
    for k in range(n):
        acc = 0 * x
        for j in range(k, n):
            acc += poly[j] * comb(j, k) * x ** (j - k)
        out.append(acc)
    return out


def _multiply(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    if f.field == "C":
        _check_collisions(set(f.poles) | set(g.poles), f.collision_tol)
    zero = f._scalar(0)
    poles: dict = {}
    poly: dict[int, object] = {}

    def add_pole(x, m, c):
        acc = poles.setdefault(x, [])
        while len(acc) < m:
            acc.append(zero)
        acc[m - 1] += c

    def add_poly(k, c):
        poly[k] = poly.get(k, zero) + c

    def pole_times_poly(x, m, c, p):
        # c/(t-x)^m * p(t) with p re-expanded about x
        for k, q in enumerate(_taylor_shift(p, x)):
            if k < m:
                add_pole(x, m - k, c * q)
            else:
                e = k - m
                for i in range(e + 1):
                    add_poly(i, c * q * comb(e, i) * (-x) ** (e - i))

    for i, a in enumerate(f.poly):
        for j, b in enumerate(g.poly):
            add_poly(i + j, a * b)
    for x, cs in f.poles.items():
        for m, c in enumerate(cs, start=1):
            if g.poly:
                pole_times_poly(x, m, c, g.poly)
    for x, cs in g.poles.items():
        for m, c in enumerate(cs, start=1):
            if f.poly:
                pole_times_poly(x, m, c, f.poly)
    for a, acs in f.poles.items():
        for m, c in enumerate(acs, start=1):
            if c == 0:
                continue
            for b, bcs in g.poles.items():
                for n, d in enumerate(bcs, start=1):
                    if d == 0:
                        continue
                    if a == b:
                        add_pole(a, m + n, c * d)
                        continue
                    # 1/(t-a)^m (t-b)^n split into principal parts at a and at b
                    for k in range(1, m + 1):
                        r = m - k
                        add_pole(a, k, c * d * _binom_neg(n, r) * (a - b) ** (-n - r))
                    for k in range(1, n + 1):
                        r = n - k
                        add_pole(b, k, c * d * _binom_neg(m, r) * (b - a) ** (-m - r))
    deg = max(poly, default=-1)
    return f._like(poles, [poly.get(k, zero) for k in range(deg + 1)])


def rf_arith(op: str, f: RationalFunction, g: RationalFunction | None = None) -> RationalFunction:
    """Dispatch ``add``/``mul``/``derive`` on rational functions."""
    if op == "derive":
        if g is not None:
            raise TypeError("derive takes a single operand")
        return f.derive()
    if g is None:
        raise TypeError(f"{op} needs two operands")
    if f.field != g.field:
        raise FieldMismatchError(f"cannot combine {f.field} and {g.field} functions")
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def laurent_expand(f: RationalFunction, x0, order: int) -> LaurentSeries:
    """Laurent coefficients of ``f`` at ``x0`` up to exponent ``order``.

    At ``x0 = INFINITY`` the series is in ``u = 1/t``, i.e. of ``f(1/u)``.
    The series starts at the most negative exponent present (never above 0).
    """
    zero = f._scalar(0)
    coeffs: dict[int, object] = {}

    def put(k, c):
        if k <= order:
            coeffs[k] = coeffs.get(k, zero) + c

    if x0 is INFINITY:
        start = min(0, -f.degree())
        for k, a in enumerate(f.poly):
            put(-k, a)
        for x, cs in f.poles.items():
            for m, c in enumerate(cs, start=1):
                # c u^m (1 - x u)^(-m)
                for r in range(0, max(0, order - m) + 1):
                    put(m + r, c * comb(m + r - 1, r) * x ** r)
    else:
        x0 = f._scalar(x0)
        start = min(0, -f.pole_order(x0))
        for k, q in enumerate(_taylor_shift(f.poly, x0)):
            put(k, q)
        for x, cs in f.poles.items():
            if x == x0:
                for m, c in enumerate(cs, start=1):
                    put(-m, c)
                continue
            d = x0 - x
            for m, c in enumerate(cs, start=1):
                # c (s + d)^(-m), s = t - x0
                for r in range(0, max(0, order) + 1):
                    put(r, c * _binom_neg(m, r) * d ** (-m - r))
    if order < start:
        return LaurentSeries(start, ())
    return LaurentSeries(start, tuple(coeffs.get(k, zero) for k in range(start, order + 1)))


def compose_mobius(f: RationalFunction, a, b, c, d) -> RationalFunction:
    """``f((a s + b)/(c s + d))`` as a rational function of ``s``."""
    a, b, c, d = (f._scalar(v) for v in (a, b, c, d))
    if a * d - b * c == 0:
        raise ValueError("degenerate Moebius map (ad - bc = 0)")
    one = RationalFunction.constant(f._scalar(1), f.field)
    s = RationalFunction.t(f.field)
    if c == 0:
        T = s.scale(a / d) + b / d
    else:
        s_inf = -d / c
        T = RationalFunction.pole(s_inf, (b * c - a * d) / (c * c), field=f.field) + a / c

    def inv_shift(x):
        # 1/(T - x)
        if c == 0:
            return RationalFunction.pole((x * d - b) / a, d / a, field=f.field)
        s_inf = -d / c
        K, L = a / c, (b * c - a * d) / (c * c)
        if K == x:
            return (s - s_inf).scale(1 / L)
        s_x = s_inf - L / (K - x)
        return (one + RationalFunction.pole(s_x, s_x - s_inf, field=f.field)).scale(1 / (K - x))

    out = RationalFunction.zero(f.field)
    tp = one
    for k, coef in enumerate(f.poly):
        if k:
            tp = tp * T
        out = out + tp.scale(coef)
    for x, cs in f.poles.items():
        base = inv_shift(x)
        p = base
        for m, coef in enumerate(cs, start=1):
            if m > 1:
                p = p * base
            out = out + p.scale(coef)
    return out


class DiffOp:
    """Monic operator ``d^n + a_{n-1} d^{n-1} + ... + a_0`` in ``d = d/dt``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence[RationalFunction]):
        self.coeffs = tuple(coeffs)
        self.order = len(self.coeffs)
        fields = {c.field for c in self.coeffs}
        if len(fields) > 1:
            raise FieldMismatchError("mixed scalar fields among coefficients")

    @property
    def field(self) -> str:
        return self.coeffs[0].field if self.coeffs else "Q"

    @classmethod
    def d(cls, order: int = 1, field: str = "Q") -> "DiffOp":
        return cls([RationalFunction.zero(field)] * order)

    @classmethod
    def first_order(cls, a0: RationalFunction) -> "DiffOp":
        """``d + a0``."""
        return cls([a0])

    def coefficient(self, k: int) -> RationalFunction:
        """Coefficient of ``d^k`` (``1`` for ``k == order``)."""
        if k == self.order:
            return RationalFunction.constant(1, self.field)
        return self.coeffs[k]

    def is_traceless(self) -> bool:
        return self.order == 0 or self.coeffs[-1].is_zero()

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"DiffOp(order={self.order}, coeffs={list(self.coeffs)!r})"


def diffop_compose(D1: DiffOp, D2: DiffOp) -> DiffOp:
    """Operator product ``D1 o D2`` by the Leibniz rule."""
    if D1.order and D2.order and D1.field != D2.field:
        raise FieldMismatchError("cannot compose operators over different fields")
    field = D1.field if D1.order else D2.field
    n = D1.order + D2.order
    out = [RationalFunction.zero(field) for _ in range(n + 1)]
    # derivatives of D2's coefficients, computed lazily
    derivs: dict[tuple[int, int], RationalFunction] = {}

    def deriv(l, r):
        key = (l, r)
        if key not in derivs:
            derivs[key] = D2.coefficient(l) if r == 0 else deriv(l, r - 1).derive()
        return derivs[key]

    for k in range(D1.order + 1):
        a = D1.coefficient(k)
        if a.is_zero():
            continue
        for l in range(D2.order + 1):
            if D2.coefficient(l).is_zero():
                continue
            for r in range(k + 1):
                term = deriv(l, r)
                if term.is_zero():
                    continue
                out[k - r + l] = out[k - r + l] + a * term.scale(comb(k, r))
    top = out[n]
    assert top == RationalFunction.constant(1, field), "composition lost monicity"
    return DiffOp(out[:n])
