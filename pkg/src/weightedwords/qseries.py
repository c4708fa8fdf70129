"""Exact arithmetic for q-polynomials and truncated q-series.

Coefficients live in ``Z[a, b, c]`` (the color markers).  Four value types
are provided:

``MarkerPoly``
    sparse polynomial in the markers, stored as ``{packed exponent: int}``.
``QPolynomial``
    dense polynomial in ``q`` with integer coefficients (q-binomials, the
    finite sum identities).
``Polynomial``
    exact polynomial in ``q`` and the markers, stored as
    ``{packed marker exponent: dense q-coefficient tuple}``.
``QSeries``
    power series in ``q`` truncated at a fixed order ``N`` (coefficients of
    ``q^0 .. q^(N-1)`` are known), with ``MarkerPoly`` coefficients.

Marker exponents are packed into one int (21 bits per marker), so the
product of two monomials is the sum of their keys.

A ``QSeries`` also records a *density* guarantee: every monomial
``a^i b^j c^k q^e`` in the full (untruncated) series satisfies
``e >= density * (i + j + k)``.  ``substitute`` uses it to work out how
many input terms a substitution like ``a -> a/q`` needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import (
    DivergentProduct,
    InsufficientTruncation,
    NegativeExponent,
    NotAUnit,
    ZeroValuation,
)

MARKERS = ("a", "b", "c")
_BITS = 21
_FIELD = (1 << _BITS) - 1
_SHIFT = {"a": 0, "b": _BITS, "c": 2 * _BITS}

INF = None  # count value meaning an infinite product


def _pack(ea: int, eb: int, ec: int) -> int:
    if min(ea, eb, ec) < 0 or max(ea, eb, ec) > _FIELD:
        raise ValueError(f"marker exponent out of range: {(ea, eb, ec)}")
    return ea | (eb << _BITS) | (ec << (2 * _BITS))


def _unpack(key: int) -> tuple[int, int, int]:
    return key & _FIELD, (key >> _BITS) & _FIELD, key >> (2 * _BITS)


def _key_degree(key: int) -> int:
    return sum(_unpack(key))


def marker_key(name: str, exponent: int = 1) -> int:
    try:
        return exponent << _SHIFT[name]
    except KeyError:
        raise ValueError(f"unknown marker {name!r}; markers are a, b, c") from None


class MarkerMonomial(NamedTuple):
    e_a: int = 0
    e_b: int = 0
    e_c: int = 0

    @property
    def key(self) -> int:
        return _pack(self.e_a, self.e_b, self.e_c)

    @classmethod
    def from_key(cls, key: int) -> "MarkerMonomial":
        return cls(*_unpack(key))

    @property
    def degree(self) -> int:
        return self.e_a + self.e_b + self.e_c

    def __str__(self) -> str:
        return _key_str(self.key) or "1"


def _key_str(key: int) -> str:
    out = []
    for name, e in zip(MARKERS, _unpack(key)):
        if e == 1:
            out.append(name)
        elif e > 1:
            out.append(f"{name}^{e}")
    return "*".join(out)


def _coerce_key(m) -> int:
    if isinstance(m, MarkerMonomial):
        return m.key
    if isinstance(m, tuple):
        return _pack(*m)
    if isinstance(m, str):
        return marker_key(m)
    raise TypeError(f"cannot interpret {m!r} as a marker monomial")


# ---------------------------------------------------------------------------
# raw helpers on {key: int} dicts

def _dict_add(dst: dict, src: Mapping, scale: int = 1, shift: int = 0) -> None:
    """dst += scale * x^shift * src, dropping zeros."""
    for k, v in src.items():
        k += shift
        nv = dst.get(k, 0) + scale * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)


def _dict_mul(x: Mapping, y: Mapping) -> dict:
    if len(x) < len(y):
        x, y = y, x
    out: dict = {}
    for ky, vy in y.items():
        _dict_add(out, x, vy, ky)
    return out


class MarkerPoly:
    """Sparse polynomial in a, b, c with exact integer coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping | int | None = None):
        if terms is None:
            self._t = {}
        elif isinstance(terms, int):
            self._t = {0: terms} if terms else {}
        else:
            t: dict = {}
            for m, v in terms.items():
                if v:
                    k = _coerce_key(m)
                    t[k] = t.get(k, 0) + v
            self._t = {k: v for k, v in t.items() if v}

    @classmethod
    def _raw(cls, t: dict) -> "MarkerPoly":
        p = cls.__new__(cls)
        p._t = t
        return p

    @classmethod
    def marker(cls, name: str, exponent: int = 1) -> "MarkerPoly":
        return cls._raw({marker_key(name, exponent): 1})

    def terms(self) -> Iterator[tuple[MarkerMonomial, int]]:
        for k in sorted(self._t):
            yield MarkerMonomial.from_key(k), self._t[k]

    def __iter__(self):
        return self.terms()

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def constant(self) -> int:
        return self._t.get(0, 0)

    def is_constant(self) -> bool:
        return not self._t or set(self._t) == {0}

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._t.values())

    def evaluate(self, a: int = 1, b: int = 1, c: int = 1) -> int:
        total = 0
        for k, v in self._t.items():
            ea, eb, ec = _unpack(k)
            total += v * a**ea * b**eb * c**ec
        return total

    def __add__(self, other) -> "MarkerPoly":
        other = _as_marker_poly(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        _dict_add(t, other._t)
        return MarkerPoly._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "MarkerPoly":
        return MarkerPoly._raw({k: -v for k, v in self._t.items()})

    def __sub__(self, other) -> "MarkerPoly":
        other = _as_marker_poly(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        _dict_add(t, other._t, -1)
        return MarkerPoly._raw(t)

    def __rsub__(self, other) -> "MarkerPoly":
        return (-self) + other

    def __mul__(self, other) -> "MarkerPoly":
        other = _as_marker_poly(other)
        if other is NotImplemented:
            return other
        return MarkerPoly._raw(_dict_mul(self._t, other._t))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = _as_marker_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        return hash(frozenset(self._t.items()))

    def __repr__(self) -> str:
        return f"MarkerPoly({self})"

    def __str__(self) -> str:
        return _terms_str((k, v, 0) for k, v in sorted(self._t.items()))


def _as_marker_poly(x):
    if isinstance(x, MarkerPoly):
        return x
    if isinstance(x, int):
        return MarkerPoly(x)
    return NotImplemented


def _terms_str(terms: Iterable[tuple[int, int, int]]) -> str:
    """Render (marker key, coefficient, q exponent) triples."""
    parts = []
    for key, v, e in terms:
        mono = _key_str(key)
        if e == 1:
            mono = f"{mono}*q" if mono else "q"
        elif e > 1:
            mono = f"{mono}*q^{e}" if mono else f"q^{e}"
        sign = "-" if v < 0 else "+"
        mag = abs(v)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# dense integer q-polynomials

def _trim(c: Sequence[int]) -> tuple:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _padd(x: Sequence[int], y: Sequence[int], scale: int = 1) -> tuple:
    if len(x) < len(y):
        out = [scale * v for v in y]
        for i, v in enumerate(x):
            out[i] += v
    else:
        out = list(x)
        for i, v in enumerate(y):
            out[i] += scale * v
    return _trim(out)


def _pmul(x: Sequence[int], y: Sequence[int]) -> tuple:
    if not x or not y:
        return ()
    if len(x) < len(y):
        x, y = y, x
    out = [0] * (len(x) + len(y) - 1)
    for j, v in enumerate(y):
        if v:
            for i, u in enumerate(x, j):
                out[i] += u * v
    return _trim(out)


def _pshift(x: Sequence[int], k: int) -> tuple:
    if not x:
        return ()
    if k < 0:
        if any(x[:-k]):
            raise NegativeExponent("shift would produce a negative power of q")
        return tuple(x[-k:])
    return (0,) * k + tuple(x)


def _pstretch(x: Sequence[int], k: int) -> tuple:
    """q -> q^k."""
    if k == 1 or not x:
        return tuple(x)
    out = [0] * ((len(x) - 1) * k + 1)
    for i, v in enumerate(x):
        out[i * k] = v
    return tuple(out)


class QPolynomial:
    """Polynomial in q with arbitrary-precision integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        self.coeffs = _trim(list(coeffs))

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> "QPolynomial":
        if e < 0:
            raise NegativeExponent(f"q^{e}")
        return cls([0] * e + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __call__(self, x):
        acc = 0
        for v in reversed(self.coeffs):
            acc = acc * x + v
        return acc

    def __add__(self, other):
        other = _as_qpoly(other)
        if other is NotImplemented:
            return other
        return QPolynomial(_padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return QPolynomial(-v for v in self.coeffs)

    def __sub__(self, other):
        other = _as_qpoly(other)
        if other is NotImplemented:
            return other
        return QPolynomial(_padd(self.coeffs, other.coeffs, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_qpoly(other)
        if other is NotImplemented:
            return other
        return QPolynomial(_pmul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = QPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "QPolynomial":
        return QPolynomial(_pshift(self.coeffs, k))

    def stretch(self, k: int) -> "QPolynomial":
        return QPolynomial(_pstretch(self.coeffs, k))

    def __eq__(self, other):
        other = _as_qpoly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"QPolynomial({list(self.coeffs)})"

    def __str__(self):
        return _terms_str((0, v, e) for e, v in enumerate(self.coeffs) if v)


def _as_qpoly(x):
    if isinstance(x, QPolynomial):
        return x
    if isinstance(x, int):
        return QPolynomial([x])
    return NotImplemented


# ---------------------------------------------------------------------------
# exact polynomials in q and the markers

class Polynomial:
    """Exact polynomial in q, a, b, c.

    Stored as ``{marker key: dense q-coefficient tuple}``, which keeps the
    marker-free case (a single key) as fast as plain ``QPolynomial`` work.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping | None = None):
        """``terms`` maps ``(MarkerMonomial, q exponent)`` to a coefficient."""
        self._t = {}
        for (m, e), v in (terms or {}).items():
            if e < 0:
                raise NegativeExponent(f"q^{e}")
            k = _coerce_key(m)
            self._t[k] = _padd(self._t.get(k, ()), (0,) * e + (v,))
        self._t = {k: v for k, v in self._t.items() if v}

    @classmethod
    def _raw(cls, t: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._t = t
        return p

    @classmethod
    def constant(cls, c: int) -> "Polynomial":
        return cls._raw({0: (c,)} if c else {})

    @classmethod
    def q(cls, e: int = 1) -> "Polynomial":
        return cls._raw({0: _pshift((1,), e)})

    @classmethod
    def marker(cls, name: str, exponent: int = 1) -> "Polynomial":
        return cls._raw({marker_key(name, exponent): (1,)})

    @classmethod
    def monomial(cls, marker: MarkerMonomial | tuple | int = 0, e: int = 0, c: int = 1) -> "Polynomial":
        if not c:
            return cls._raw({})
        key = marker if isinstance(marker, int) else _coerce_key(marker)
        return cls._raw({key: _pshift((c,), e)})

    @classmethod
    def from_qpoly(cls, p: QPolynomial) -> "Polynomial":
        return cls._raw({0: p.coeffs} if p.coeffs else {})

    def terms(self) -> Iterator[tuple[MarkerMonomial, int, int]]:
        """Yield (marker monomial, q exponent, coefficient), q-major order."""
        flat = [(e, k, v) for k, cs in self._t.items() for e, v in enumerate(cs) if v]
        for e, k, v in sorted(flat):
            yield MarkerMonomial.from_key(k), e, v

    def __bool__(self):
        return bool(self._t)

    def is_marker_free(self) -> bool:
        return set(self._t) <= {0}

    def to_qpolynomial(self) -> QPolynomial:
        if not self.is_marker_free():
            raise ValueError("polynomial involves color markers")
        return QPolynomial(self._t.get(0, ()))

    def as_monomial(self) -> tuple[int, int, int] | None:
        """(coefficient, marker key, q exponent) if a single term, else None."""
        if len(self._t) != 1:
            return None
        (k, cs), = self._t.items()
        nz = [(e, v) for e, v in enumerate(cs) if v]
        if len(nz) != 1:
            return None
        e, v = nz[0]
        return v, k, e

    @property
    def q_degree(self) -> int:
        return max((len(cs) - 1 for cs in self._t.values()), default=-1)

    def q_valuation(self) -> int | None:
        vals = [next(e for e, v in enumerate(cs) if v) for cs in self._t.values()]
        return min(vals) if vals else None

    def density(self) -> Fraction | None:
        best = None
        for k, cs in self._t.items():
            d = _key_degree(k)
            if d == 0:
                continue
            e = next(i for i, v in enumerate(cs) if v)
            r = Fraction(e, d)
            best = r if best is None else min(best, r)
        return best

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(_poly_combine(self._t, other._t, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(_poly_combine(self._t, other._t, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Polynomial._raw({k: tuple(-v for v in cs) for k, cs in self._t.items()})

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, c1 in self._t.items():
            for k2, c2 in other._t.items():
                k = k1 + k2
                out[k] = _padd(out.get(k, ()), _pmul(c1, c2))
        return Polynomial._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise NegativeExponent("negative power of a polynomial")
        out = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def evaluate(self, q=1, a=1, b=1, c=1):
        total = 0
        for k, cs in self._t.items():
            ea, eb, ec = _unpack(k)
            total += a**ea * b**eb * c**ec * QPolynomial(cs)(q)
        return total

    def substitute(self, sub: "Substitution") -> "Polynomial":
        out: dict = {}
        for key, cs in self._t.items():
            img = sub.image_of_key(key)
            if img is None:
                continue
            new_key, shift = img
            k = sub.q_power
            base_exp = shift
            spread = _pstretch(cs, k)
            if base_exp < 0:
                first = next(i for i, v in enumerate(spread) if v)
                if first + base_exp < 0:
                    raise NegativeExponent(
                        f"substitution sends {_key_str(key) or '1'}*q^{first // k} to a negative q-power"
                    )
            out[new_key] = _padd(out.get(new_key, ()), _pshift(spread, base_exp))
        return Polynomial._raw({k: v for k, v in out.items() if v})

    def to_series(self, order: int) -> "QSeries":
        coeffs = [dict() for _ in range(order)]
        for k, cs in self._t.items():
            for e, v in enumerate(cs[:order]):
                if v:
                    coeffs[e][k] = v
        return QSeries._raw(coeffs, self.density())

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return _terms_str((m.key, v, e) for m, e, v in self.terms())


def _poly_combine(x: dict, y: dict, scale: int) -> dict:
    out = dict(x)
    for k, cs in y.items():
        v = _padd(out.get(k, ()), cs, scale)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _as_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, int):
        return Polynomial.constant(x)
    if isinstance(x, QPolynomial):
        return Polynomial.from_qpoly(x)
    return NotImplemented


# ---------------------------------------------------------------------------
# substitutions

@dataclass(frozen=True)
class MarkerImage:
    """Where one marker goes: ``target * q^shift`` (target None means 1)."""

    target: str | None
    shift: int = 0

    def __post_init__(self):
        if self.target is not None and self.target not in MARKERS:
            raise ValueError(f"unknown marker {self.target!r}")


ZERO = "zero"
ImageSpec = Union[MarkerImage, str, int, tuple, None]


def _image(spec: ImageSpec):
    if isinstance(spec, MarkerImage):
        return spec
    if spec is ZERO or (isinstance(spec, int) and spec == 0):
        return ZERO
    if isinstance(spec, int) and spec == 1:
        return MarkerImage(None)
    if isinstance(spec, str):
        return MarkerImage(spec)
    if isinstance(spec, tuple):
        target, shift = spec
        return MarkerImage(target, shift)
    raise ValueError(f"bad marker image {spec!r}")


@dataclass(frozen=True)
class Substitution:
    """Monomial substitution on markers and q.

    Each marker maps to ``target * q^shift`` (target a marker or 1) or to 0;
    ``q`` maps to ``q^q_power``.  Unlisted markers are left alone.
    """

    images: tuple = ()
    q_power: int = 1

    def __post_init__(self):
        if self.q_power < 1:
            raise ValueError("q must map to a positive power of q")

    @classmethod
    def of(cls, q: int = 1, **images: ImageSpec) -> "Substitution":
        """``Substitution.of(a=("a", -1), b=1, c=0, q=2)``."""
        norm = tuple(sorted((m, _image(v)) for m, v in images.items()))
        for m, _ in norm:
            if m not in MARKERS:
                raise ValueError(f"unknown marker {m!r}")
        return cls(norm, q)

    def image(self, marker: str):
        for m, img in self.images:
            if m == marker:
                return img
        return MarkerImage(marker)

    def is_identity(self) -> bool:
        return self.q_power == 1 and all(self.image(m) == MarkerImage(m) for m in MARKERS)

    def image_of_key(self, key: int) -> tuple[int, int] | None:
        """Image of a marker monomial as (new key, q shift), or None if it maps to 0."""
        new_key = 0
        shift = 0
        for m, e in zip(MARKERS, _unpack(key)):
            if not e:
                continue
            img = self.image(m)
            if img is ZERO:
                return None
            if img.target is not None:
                new_key += marker_key(img.target, e)
            shift += img.shift * e
        return new_key, shift

    def max_contraction(self) -> int:
        """Largest q-power removed per unit of (surviving) marker degree."""
        worst = 0
        for m in MARKERS:
            img = self.image(m)
            if img is not ZERO:
                worst = max(worst, -img.shift)
        return worst

    def stretch_factor(self, density: Fraction | None) -> Fraction:
        """Lower bound on (image exponent) / (source exponent) for high-order terms."""
        s = self.max_contraction()
        if s == 0 or density is None:
            return Fraction(self.q_power)
        if density == 0:
            return Fraction(0)
        return self.q_power - Fraction(s) / density

    def input_order(self, n_out: int, density: Fraction | None) -> int:
        lam = self.stretch_factor(density)
        if lam <= 0:
            raise InsufficientTruncation(
                "cannot bound the input order: the series carries no density guarantee "
                "strong enough for this substitution"
            )
        return floor(Fraction(n_out - 1) / lam) + 1 if n_out > 0 else 0

    def output_order(self, n_in: int, density: Fraction | None) -> int:
        lam = self.stretch_factor(density)
        if lam <= 0:
            raise InsufficientTruncation("substitution contracts q-exponents without bound")
        return ceil(lam * n_in)

    def image_density(self, density: Fraction | None) -> Fraction | None:
        if density is None:
            return None
        best = None
        for m in MARKERS:
            img = self.image(m)
            if img is ZERO:
                continue
            r = self.q_power * density + img.shift
            if img.target is None:
                if r < 0:
                    return Fraction(0)
                continue
            best = r if best is None else min(best, r)
        if best is None:
            return None
        return max(Fraction(best), Fraction(0))

    def __str__(self):
        parts = []
        for m in MARKERS:
            img = self.image(m)
            if img is ZERO:
                parts.append(f"{m}->0")
            elif img != MarkerImage(m):
                body = img.target or ""
                if img.shift:
                    qs = f"q^{img.shift}"
                    body = f"{body}*{qs}" if body else qs
                parts.append(f"{m}->{body or '1'}")
        if self.q_power != 1:
            parts.append(f"q->q^{self.q_power}")
        return ", ".join(parts) or "identity"


# ---------------------------------------------------------------------------
# truncated series

Density = Union[Fraction, None]


def _min_density(x: Density, y: Density) -> Density:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


class QSeries:
    """Power series in q truncated at ``order`` with marker coefficients.

    Immutable.  Arithmetic results are truncated to the smaller order of the
    operands and equality compares coefficients below that order.
    """

    __slots__ = ("_c", "density")

    def __init__(self, coeffs: Sequence = (), order: int | None = None, density: Density = Fraction(0)):
        if order is None:
            order = len(coeffs)
        if order < 1:
            raise ValueError("truncation order must be positive")
        c = []
        for i in range(order):
            x = coeffs[i] if i < len(coeffs) else 0
            if isinstance(x, MarkerPoly):
                c.append(dict(x._t))
            elif isinstance(x, int):
                c.append({0: x} if x else {})
            else:
                c.append(MarkerPoly(x)._t)
        self._c = tuple(c)
        self.density = density

    @classmethod
    def _raw(cls, coeffs: list, density: Density) -> "QSeries":
        s = cls.__new__(cls)
        s._c = tuple(coeffs)
        s.density = density
        return s

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls._raw([{} for _ in range(order)], None)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls._raw([{0: 1}] + [{} for _ in range(order - 1)], None)

    @property
    def order(self) -> int:
        return len(self._c)

    def coeff(self, i: int) -> MarkerPoly:
        if not 0 <= i < len(self._c):
            raise IndexError(f"coefficient q^{i} outside truncation order {self.order}")
        return MarkerPoly._raw(dict(self._c[i]))

    __getitem__ = coeff

    def coefficients(self) -> list[MarkerPoly]:
        return [self.coeff(i) for i in range(self.order)]

    def counts(self) -> list[int]:
        """Coefficients with every marker set to 1."""
        return [sum(c.values()) for c in self._c]

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise InsufficientTruncation(f"series known to order {self.order}, not {order}")
        return QSeries._raw(list(self._c[:order]), self.density)

    def is_zero(self) -> bool:
        return not any(self._c)

    def first_nonzero(self) -> tuple[int, MarkerPoly] | None:
        for i, c in enumerate(self._c):
            if c:
                return i, MarkerPoly._raw(dict(c))
        return None

    def is_nonnegative(self) -> bool:
        return all(v > 0 for c in self._c for v in c.values())

    def __add__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        out = []
        for i in range(n):
            d = dict(self._c[i])
            _dict_add(d, other._c[i])
            out.append(d)
        return QSeries._raw(out, _min_density(self.density, other.density))

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw([{k: -v for k, v in c.items()} for c in self._c], self.density)

    def __sub__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        out = [dict() for _ in range(n)]
        x, y = self._c, other._c
        # iterate over the sparser operand in the outer loop
        if sum(map(bool, x[:n])) > sum(map(bool, y[:n])):
            x, y = y, x
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            for j in range(n - i):
                yj = y[j]
                if yj:
                    _dict_add(out[i + j], _dict_mul(xi, yj))
        return QSeries._raw(out, _min_density(self.density, other.density))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        d0 = other._c[0]
        if set(d0) != {0} or d0[0] not in (1, -1):
            raise NotAUnit("divisor must have constant term +1 or -1")
        unit = d0[0]
        tail = [(j, other._c[j]) for j in range(1, n) if other._c[j]]
        out: list = []
        for i in range(n):
            acc = dict(self._c[i])
            for j, dj in tail:
                if j > i:
                    break
                if out[i - j]:
                    _dict_add(acc, _dict_mul(dj, out[i - j]), -1)
            if unit == -1:
                acc = {k: -v for k, v in acc.items()}
            out.append(acc)
        return QSeries._raw(out, _min_density(self.density, other.density))

    def __rtruediv__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return QSeries.one(self.order) / (self ** (-k))
        out = QSeries.one(self.order)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_series(other, self.order)
        if other is NotImplemented:
            return NotImplemented
        n = min(self.order, other.order)
        return self._c[:n] == other._c[:n]

    __hash__ = None

    def __repr__(self):
        return f"QSeries({self}, order={self.order})"

    def __str__(self):
        body = _terms_str(
            (k, v, e) for e, c in enumerate(self._c) for k, v in sorted(c.items())
        )
        return f"{body} + O(q^{self.order})"


def _as_series(x, order: int):
    if isinstance(x, QSeries):
        return x
    if isinstance(x, int):
        return QSeries._raw([{0: x} if x else {}] + [{} for _ in range(order - 1)], None)
    if isinstance(x, MarkerPoly):
        return QSeries._raw([dict(x._t)] + [{} for _ in range(order - 1)], Fraction(0) if not x.is_constant() else None)
    if isinstance(x, (Polynomial, QPolynomial)):
        return _as_poly(x).to_series(order)
    return NotImplemented


# in-place work on coefficient lists (used by the colored-partition DP)

def _scale_shift(src: Sequence[dict], key: int, e: int, order: int, coeff: int = 1) -> list:
    """coeff * x^key * q^e * src, truncated."""
    out = [dict() for _ in range(order)]
    for i in range(max(0, order - e)):
        s = src[i]
        if s:
            out[i + e] = {k + key: coeff * v for k, v in s.items()}
    return out


def _mul_binomial_inplace(c: list, coeff: int, key: int, e: int) -> None:
    """c <- c * (1 + coeff * x^key * q^e)."""
    n = len(c)
    if e == 0:
        for i in range(n):
            if c[i]:
                _dict_add(c[i], dict(c[i]), coeff, key)
        return
    for i in range(n - 1, e - 1, -1):
        if c[i - e]:
            _dict_add(c[i], c[i - e], coeff, key)


def _div_binomial_inplace(c: list, coeff: int, key: int, e: int) -> None:
    """c <- c / (1 + coeff * x^key * q^e), e >= 1."""
    if e < 1:
        raise ZeroValuation("cannot invert a factor with zero q-valuation")
    for i in range(e, len(c)):
        if c[i - e]:
            _dict_add(c[i], c[i - e], -coeff, key)


# ---------------------------------------------------------------------------
# constructors

def series_add(s: QSeries, t: QSeries) -> QSeries:
    return s + t


def series_mul(s: QSeries, t: QSeries) -> QSeries:
    return s * t


def geometric(w: MarkerMonomial | tuple | str | int, m: int, order: int) -> QSeries:
    """1/(1 - w q^m) truncated at ``order``."""
    if m <= 0:
        raise ZeroValuation(f"geometric series needs a positive q-power, got q^{m}")
    key = w if isinstance(w, int) else _coerce_key(w)
    c = [dict() for _ in range(order)]
    c[0][0] = 1
    _div_binomial_inplace(c, -1, key, m)
    deg = _key_degree(key)
    return QSeries._raw(c, Fraction(m, deg) if deg else None)


@dataclass(frozen=True)
class Term:
    """``coeff * marker * q^q_exp`` -- the base of a Pochhammer symbol."""

    marker: MarkerMonomial = MarkerMonomial()
    q_exp: int = 0
    coeff: int = 1

    @classmethod
    def parse(cls, base) -> "Term":
        if isinstance(base, Term):
            return base
        if isinstance(base, Polynomial):
            mono = base.as_monomial()
            if mono is None:
                raise ValueError(f"Pochhammer base must be a single monomial, got {base}")
            v, k, e = mono
            return cls(MarkerMonomial.from_key(k), e, v)
        if isinstance(base, tuple) and len(base) == 2:
            return cls(MarkerMonomial(*base[0]) if isinstance(base[0], tuple) else base[0], base[1])
        raise TypeError(f"cannot use {base!r} as a Pochhammer base")


def pochhammer(
    base,
    step: int,
    count: int | None,
    order: int,
    inverse: bool = False,
) -> QSeries:
    """(z; q^step)_count, or its reciprocal, truncated at ``order``.

    ``count=None`` (``INF``) is the infinite product; factors whose q-power
    is at least ``order`` are left out since they cannot touch the result.
    """
    z = Term.parse(base)
    if step < 1:
        raise ValueError("Pochhammer step must be positive")
    if count is not None and count < 0:
        raise ValueError("Pochhammer count must be non-negative")
    key = z.marker.key
    if count is None:
        if z.q_exp <= 0:
            raise DivergentProduct("infinite Pochhammer product needs a base with positive q-valuation")
        count = max(0, -(-(order - z.q_exp) // step))
    c = [dict() for _ in range(order)]
    c[0][0] = 1
    for i in range(count):
        e = z.q_exp + i * step
        if e >= order:
            if inverse:
                continue
            break
        if inverse:
            _div_binomial_inplace(c, -z.coeff, key, e)
        else:
            _mul_binomial_inplace(c, -z.coeff, key, e)
    deg = z.marker.degree
    if deg == 0 or count == 0:
        density = None
    else:
        density = Fraction(max(z.q_exp, 0), deg)
    return QSeries._raw(c, density)


def pochhammer_poly(base, step: int, count: int) -> Polynomial:
    """Finite (z; q^step)_count as an exact polynomial."""
    z = Term.parse(base)
    if count < 0:
        raise ValueError("Pochhammer count must be non-negative")
    out = Polynomial.constant(1)
    for i in range(count):
        out = out * (1 - Polynomial.monomial(z.marker, z.q_exp + i * step, z.coeff))
    return out


@lru_cache(maxsize=None)
def _gauss(a: int, b: int) -> tuple:
    """Coefficients of [a+b over b]_q for a, b >= 0."""
    if b > a:
        a, b = b, a
    # multiply by (1 - q^(a+i)) / (1 - q^i) for i = 1..b; each step is exact
    cur = [1]
    for i in range(1, b + 1):
        top = a + i
        num = cur + [0] * top
        for j in range(len(num) - 1, top - 1, -1):
            num[j] -= num[j - top]
        for j in range(i, len(num)):
            num[j] += num[j - i]
        cur = list(_trim(num))
    return tuple(cur)


def qbinom(top_minus_bottom: int, bottom: int, q_step: int = 1) -> QPolynomial:
    """Gaussian binomial [a+b over b] in q^q_step; zero if a or b is negative."""
    if top_minus_bottom < 0 or bottom < 0:
        return QPolynomial()
    return QPolynomial(_pstretch(_gauss(top_minus_bottom, bottom), q_step))


def substitute(s: QSeries | Polynomial, sub: Substitution, order: int | None = None):
    """Apply a monomial substitution.

    For a ``QSeries`` the output order defaults to the largest order the
    input supports; asking for more raises ``InsufficientTruncation``.
    """
    if isinstance(s, Polynomial):
        return s.substitute(sub)
    supported = sub.output_order(s.order, s.density)
    if order is None:
        order = supported
    elif order > supported:
        need = sub.input_order(order, s.density)
        raise InsufficientTruncation(
            f"substitution {sub} needs the input to order {need}, got {s.order}"
        )
    k = sub.q_power
    out = [dict() for _ in range(order)]
    for e, c in enumerate(s._c):
        for key, v in c.items():
            img = sub.image_of_key(key)
            if img is None:
                continue
            new_key, shift = img
            ne = k * e + shift
            if ne < 0:
                raise NegativeExponent(
                    f"substitution {sub} sends {_key_str(key) or '1'}*q^{e} to q^{ne}"
                )
            if ne < order:
                d = out[ne]
                nv = d.get(new_key, 0) + v
                if nv:
                    d[new_key] = nv
                else:
                    d.pop(new_key, None)
    return QSeries._raw(out, sub.image_density(s.density))
