"""Exact Laurent-polynomial coefficients over the Gaussian rationals.

A :class:`Coefficient` is a finite sum ``sum_k c_k * prod_j q_j**e_kj`` where the
``c_k`` are complex numbers with rational real and imaginary parts and the
``q_j`` are commuting formal parameters (``hbar``, ``m``, ``t`` ...).  Exponents
may be negative.  Instances are immutable and hashable; two coefficients are
equal iff their canonical term maps are equal.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple, Union

Monomial = Tuple[Tuple[str, int], ...]
Gauss = Tuple[Fraction, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in exps.items() if e != 0))


def _gauss_mul(x: Gauss, y: Gauss) -> Gauss:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        # floats are accepted only when they are exactly representable ratios
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def _to_gauss(x) -> Gauss:
    if isinstance(x, tuple) and len(x) == 2:
        return (_to_fraction(x[0]), _to_fraction(x[1]))
    if isinstance(x, complex):
        return (Fraction(x.real), Fraction(x.imag))
    return (_to_fraction(x), _ZERO)


class Coefficient:
    """Immutable element of ``Q(i)[q_1^{+-1}, ..., q_r^{+-1}]``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Gauss] | None = None):
        clean: Dict[Monomial, Gauss] = {}
        if terms:
            for mono, val in terms.items():
                re, im = _to_gauss(val)
                if re or im:
                    clean[tuple(sorted((n, e) for n, e in mono if e != 0))] = (re, im)
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def const(cls, re=0, im=0) -> "Coefficient":
        return cls({(): (_to_fraction(re), _to_fraction(im))})

    @classmethod
    def param(cls, name: str, power: int = 1) -> "Coefficient":
        return cls({((name, power),): (_ONE, _ZERO)})

    @classmethod
    def coerce(cls, x) -> "Coefficient":
        if isinstance(x, Coefficient):
            return x
        re, im = _to_gauss(x)
        return cls({(): (re, im)})

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Gauss]) -> "Coefficient":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Gauss]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant_value(self) -> Gauss:
        return self._terms.get((), (_ZERO, _ZERO))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def params(self) -> set:
        return {n for mono in self._terms for n, _ in mono}

    def is_real(self) -> bool:
        return all(im == 0 for _, im in self._terms.values())

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Coefficient":
        other = Coefficient.coerce(other)
        out = dict(self._terms)
        for mono, (re, im) in other._terms.items():
            if mono in out:
                r0, i0 = out[mono]
                r, i = r0 + re, i0 + im
                if r or i:
                    out[mono] = (r, i)
                else:
                    del out[mono]
            else:
                out[mono] = (re, im)
        return Coefficient._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Coefficient":
        return Coefficient._raw({m: (-r, -i) for m, (r, i) in self._terms.items()})

    def __sub__(self, other) -> "Coefficient":
        return self + (-Coefficient.coerce(other))

    def __rsub__(self, other) -> "Coefficient":
        return Coefficient.coerce(other) - self

    def __mul__(self, other) -> "Coefficient":
        other = Coefficient.coerce(other)
        if not self._terms or not other._terms:
            return ZERO
        out: Dict[Monomial, Gauss] = {}
        for m1, v1 in self._terms.items():
            for m2, v2 in other._terms.items():
                mono = _mono_mul(m1, m2)
                re, im = _gauss_mul(v1, v2)
                if mono in out:
                    r0, i0 = out[mono]
                    re, im = r0 + re, i0 + im
                out[mono] = (re, im)
        return Coefficient._raw({m: v for m, v in out.items() if v[0] or v[1]})

    __rmul__ = __mul__

    def inverse(self) -> "Coefficient":
        """Inverse of a single Laurent monomial; anything else is not a unit."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"coefficient {self} is not invertible in the Laurent ring")
        ((mono, (re, im)),) = self._terms.items()
        den = re * re + im * im
        return Coefficient._raw({tuple((n, -e) for n, e in mono): (re / den, -im / den)})

    def __truediv__(self, other) -> "Coefficient":
        return self * Coefficient.coerce(other).inverse()

    def __rtruediv__(self, other) -> "Coefficient":
        return Coefficient.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Coefficient":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Coefficient":
        """Complex conjugation; formal parameters are real."""
        return Coefficient._raw({m: (r, -i) for m, (r, i) in self._terms.items()})

    # -- calculus / substitution -------------------------------------------

    def diff(self, name: str) -> "Coefficient":
        out: Dict[Monomial, Gauss] = {}
        for mono, (re, im) in self._terms.items():
            exps = dict(mono)
            e = exps.get(name, 0)
            if e == 0:
                continue
            exps[name] = e - 1
            key = tuple(sorted((n, k) for n, k in exps.items() if k != 0))
            out[key] = (re * e, im * e)
        return Coefficient._raw(out)

    def subs(self, values: Mapping[str, "Coefficient"]) -> "Coefficient":
        """Substitute parameters; negative powers need invertible values."""
        out = ZERO
        for mono, val in self._terms.items():
            term = Coefficient._raw({(): val})
            rest = []
            for name, e in mono:
                if name in values:
                    term = term * Coefficient.coerce(values[name]) ** e
                else:
                    rest.append((name, e))
            if rest:
                term = term * Coefficient._raw({tuple(rest): (_ONE, _ZERO)})
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0j
        for mono, (re, im) in self._terms.items():
            v = complex(float(re), float(im))
            for name, e in mono:
                v *= complex(values[name]) ** e
            total += v
        return total

    # -- protocol -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coefficient):
            try:
                other = Coefficient.coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sort_key(self):
        return sorted((mono, v) for mono, v in self._terms.items())

    def __repr__(self) -> str:
        return f"Coefficient({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, (re, im) in sorted(self._terms.items()):
            num = _format_gauss(re, im)
            factors = [n if e == 1 else f"{n}^{e}" for n, e in mono]
            if factors:
                if num == "1":
                    parts.append("*".join(factors))
                elif num == "-1":
                    parts.append("-" + "*".join(factors))
                else:
                    parts.append(num + "*" + "*".join(factors))
            else:
                parts.append(num)
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _format_gauss(re: Fraction, im: Fraction) -> str:
    if im == 0:
        return _fmt_frac(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return _fmt_frac(im) + "*i"
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    imag = "i" if mag == 1 else _fmt_frac(mag) + "*i"
    return f"({_fmt_frac(re)} {sign} {imag})"


ZERO = Coefficient()
ONE = Coefficient.const(1)
IMAG = Coefficient.const(0, 1)


def coefficient_sum(items: Iterable[Coefficient]) -> Coefficient:
    out = ZERO
    for c in items:
        out = out + c
    return out


Scalar = Union[Coefficient, int, Fraction, complex]
