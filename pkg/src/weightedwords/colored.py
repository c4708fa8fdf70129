"""Colored partitions governed by a transition matrix.

A part is a symbol ``(color, level)``; ``x_i`` carries marker ``x`` and
weight ``q^i``.  Symbols are totally ordered level-major, color-minor
(``a1 < b1 < c1 < a2 < ...``).  Reading a partition from its largest part
down, a part ``y_m`` may follow ``x_n`` iff ``m <= n - matrix[x][y]``;
equal symbols are adjacent pairs like any other.

Two independent routes produce generating functions: ``enumerate_bounded``
lists partitions by brute force, ``series_bounded`` runs a dynamic program
over "largest part is exactly y_m" states.
"""

from __future__ import annotations

import logging
import re
from importlib import resources
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import qseries as qs
from .errors import UnknownColor, UnresolvedSequenceTag, ZeroValuation
from .qseries import Polynomial, QSeries, Substitution, ZERO
from .report import FAIL, PASS, IdentityReport

log = logging.getLogger(__name__)

Symbol = tuple  # (color, level)


@dataclass(frozen=True)
class TransitionSystem:
    name: str
    colors: tuple
    matrix: tuple
    excluded: frozenset = frozenset()
    builtin: bool = False

    def __post_init__(self):
        k = len(self.colors)
        if len(set(self.colors)) != k:
            raise ValueError(f"{self.name}: repeated color")
        if len(self.matrix) != k or any(len(row) != k for row in self.matrix):
            raise ValueError(f"{self.name}: matrix must be {k}x{k}")
        if any(d < 0 for row in self.matrix for d in row):
            raise ValueError(f"{self.name}: matrix entries must be non-negative")
        for color, level in self.excluded:
            self.index(color)
            if level < 1:
                raise ValueError(f"{self.name}: excluded level must be >= 1")

    def index(self, color: str) -> int:
        try:
            return self.colors.index(color)
        except ValueError:
            raise UnknownColor(f"{color!r} is not a color of system {self.name}") from None

    def descent(self, x: str, y: str) -> int:
        return self.matrix[self.index(x)][self.index(y)]

    def key(self, sym: Symbol) -> tuple[int, int]:
        color, level = sym
        return level, self.index(color)

    def symbols_upto(self, bound: Symbol) -> list[Symbol]:
        """All symbols <= bound (excluded ones included), ascending."""
        color, level = bound
        top = self.index(color)
        out = []
        for lv in range(1, level + 1):
            for t, x in enumerate(self.colors):
                if lv == level and t > top:
                    break
                out.append((x, lv))
        return out

    def largest_symbol(self, level: int) -> Symbol:
        return self.colors[-1], level


def parse_symbol(text: str) -> Symbol:
    m = re.fullmatch(r"\s*([A-Za-z]+)_?(\d+)\s*", text)
    if not m:
        raise ValueError(f"bad symbol {text!r}; expected e.g. 'b2'")
    return m.group(1), int(m.group(2))


def _sym_str(sym: Symbol) -> str:
    return f"{sym[0]}{sym[1]}"


# ---------------------------------------------------------------------------
# built-in systems and the text format
#
#   system M
#   colors a b
#   matrix
#     a 0 2
#     b 1 0
#   exclude a1

BUILTIN_TEXT = resources.files("weightedwords").joinpath("data/builtin.ts").read_text(encoding="utf-8")


def loads(text: str, builtin: bool = False) -> dict[str, TransitionSystem]:
    """Parse one or more transition systems from the declarative text format."""
    systems: dict[str, TransitionSystem] = {}
    cur: dict | None = None
    in_matrix = False

    def finish():
        if cur is None:
            return
        colors = cur.get("colors")
        if not colors:
            raise ValueError(f"system {cur['name']}: missing 'colors' line")
        rows = cur["rows"]
        missing = [c for c in colors if c not in rows]
        if missing:
            raise ValueError(f"system {cur['name']}: no matrix row for {', '.join(missing)}")
        ts = TransitionSystem(
            cur["name"],
            tuple(colors),
            tuple(tuple(rows[c]) for c in colors),
            frozenset(cur["exclude"]),
            builtin,
        )
        systems[ts.name] = ts

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "system":
            finish()
            cur = {"name": rest, "rows": {}, "exclude": set()}
            in_matrix = False
        elif cur is None:
            raise ValueError(f"line {lineno}: expected 'system <name>' first")
        elif head == "colors":
            cur["colors"] = rest.split()
            in_matrix = False
        elif head == "matrix":
            in_matrix = True
        elif head == "exclude":
            cur["exclude"].update(parse_symbol(s) for s in rest.replace(",", " ").split())
            in_matrix = False
        elif in_matrix:
            try:
                cur["rows"][head] = [int(v) for v in rest.split()]
            except ValueError:
                raise ValueError(f"line {lineno}: bad matrix row {raw!r}") from None
        else:
            raise ValueError(f"line {lineno}: unexpected {raw!r}")
    finish()
    if not builtin:
        for ts in systems.values():
            log.warning(
                "system %s: the adjacency rule m <= n - matrix[x][y] is only validated "
                "against the built-in systems M, R, Rprime",
                ts.name,
            )
    return systems


def load(path) -> dict[str, TransitionSystem]:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


BUILTIN = loads(BUILTIN_TEXT, builtin=True)
M = BUILTIN["M"]
R = BUILTIN["R"]
RPRIME = BUILTIN["Rprime"]


# ---------------------------------------------------------------------------
# validity and brute-force enumeration

def is_valid(ts: TransitionSystem, parts: Sequence[Symbol]) -> bool:
    parts = [parse_symbol(p) if isinstance(p, str) else tuple(p) for p in parts]
    for sym in parts:
        ts.index(sym[0])
        if sym[1] < 1:
            raise ValueError(f"level must be positive: {_sym_str(sym)}")
    keys = [ts.key(p) for p in parts]
    if any(k1 < k2 for k1, k2 in zip(keys, keys[1:])):
        raise ValueError("parts must be weakly decreasing in the symbol order")
    if any(p in ts.excluded for p in parts):
        return False
    for (x, n), (y, m) in zip(parts, parts[1:]):
        if m > n - ts.descent(x, y):
            return False
    return True


def _weakly_decreasing(alphabet: list, max_weight: int, start: int) -> Iterator[tuple]:
    """Weakly decreasing sequences drawn from alphabet[:start+1] (descending)."""
    yield ()
    for i in range(start, -1, -1):
        sym = alphabet[i]
        if sym[1] > max_weight:
            continue
        for rest in _weakly_decreasing(alphabet, max_weight - sym[1], i):
            yield (sym,) + rest


def enumerate_bounded(ts: TransitionSystem, bound: Symbol, max_weight: int) -> list[tuple]:
    """Every valid colored partition with parts <= bound and weight <= max_weight."""
    if isinstance(bound, str):
        bound = parse_symbol(bound)
    ts.index(bound[0])
    alphabet = ts.symbols_upto(bound) if bound[1] >= 1 else []
    return [
        p for p in _weakly_decreasing(alphabet, max_weight, len(alphabet) - 1)
        if is_valid(ts, p)
    ]


def weight(parts: Iterable[Symbol]) -> int:
    return sum(level for _, level in parts)


def census(partitions: Iterable[Sequence[Symbol]], order: int) -> QSeries:
    """Generating series sum(markers * q^weight) of a list of colored partitions."""
    coeffs = [dict() for _ in range(order)]
    for p in partitions:
        w = weight(p)
        if w < order:
            key = 0
            for color, _ in p:
                key += qs.marker_key(color)
            coeffs[w][key] = coeffs[w].get(key, 0) + 1
    return QSeries._raw(coeffs, qs.Fraction(0))


# ---------------------------------------------------------------------------
# dynamic programme

def _color_weights(ts: TransitionSystem, sub: Substitution | None):
    """Per color: (marker key, q shift) of x_i -> key * q^(k*i + shift), or None for 0."""
    sub = sub or Substitution()
    out = []
    for x in ts.colors:
        if x not in qs.MARKERS:
            raise UnknownColor(f"color {x!r} of system {ts.name} has no marker; series need colors among a, b, c")
        img = sub.image(x)
        if img is ZERO:
            out.append(None)
        else:
            key = qs.marker_key(img.target) if img.target else 0
            out.append((key, img.shift))
    return out, sub.q_power


def _dp_density(weights, k):
    best = None
    for w in weights:
        if w is None or w[0] == 0:
            continue
        r = qs.Fraction(k + w[1])
        best = r if best is None else min(best, r)
    return best


class BoundedFamily:
    """All bounded generating functions of one system, at one order and specialization.

    The DP advances level by level on demand.  With ``keep=True`` every
    computed bound stays available, so relations touching several bounds
    pay for the DP once; ``keep=False`` holds only the window the next
    level needs.
    """

    def __init__(self, ts: TransitionSystem, order: int, substitution: Substitution | None = None,
                 keep: bool = True):
        self.ts = ts
        self.order = order
        self.substitution = substitution
        self.keep = keep
        self.weights, self.k = _color_weights(ts, substitution)
        self.density = _dp_density(self.weights, self.k)
        self.level = 0
        self._maxd = max(max(row) for row in ts.matrix)
        # prefix[t][j] = sum of F(color t, level j') over j' <= j
        self._prefix: list[dict[int, list]] = [dict() for _ in ts.colors]
        self._zero = [dict() for _ in range(order)]

    def _get_prefix(self, t: int, j: int):
        return self._zero if j < 1 else self._prefix[t][j]

    def _advance(self):
        ts, order, k = self.ts, self.order, self.k
        m = self.level + 1
        ncol = len(ts.colors)
        for t, y in enumerate(ts.colors):
            f = None
            w = self.weights[t]
            if w is not None and (y, m) not in ts.excluded:
                key, shift = w
                e = k * m + shift
                if e < 1:
                    raise ZeroValuation(f"part {y}{m} would carry weight q^{e}")
                if e < order:
                    acc = [dict() for _ in range(order)]
                    acc[0][0] = 1
                    for z in range(ncol):
                        d = ts.matrix[t][z]
                        if d >= 1:
                            j = m - d
                        else:
                            j = m if z < t else m - 1
                        src = self._get_prefix(z, j)
                        for i in range(order):
                            if src[i]:
                                qs._dict_add(acc[i], src[i])
                    f = qs._scale_shift(acc, key, e, order)
                    if ts.matrix[t][t] == 0:
                        qs._div_binomial_inplace(f, -1, key, e)
            prev = self._get_prefix(t, m - 1)
            if f is None:
                self._prefix[t][m] = prev
            else:
                cur = [dict(c) for c in prev]
                for i in range(order):
                    if f[i]:
                        qs._dict_add(cur[i], f[i])
                self._prefix[t][m] = cur
            if not self.keep:
                for old in [j for j in self._prefix[t] if j < m - self._maxd - 1]:
                    del self._prefix[t][old]
        self.level = m

    def series(self, bound: Symbol | str) -> QSeries:
        """Generating function of valid partitions with largest part <= bound."""
        if isinstance(bound, str):
            bound = parse_symbol(bound)
        bcolor, blevel = bound
        btop = self.ts.index(bcolor)
        total = [dict() for _ in range(self.order)]
        total[0][0] = 1
        if blevel < 1:
            return QSeries._raw(total, None)
        if blevel < self.level - self._maxd and not self.keep:
            raise ValueError(f"bound {_sym_str(bound)} has left the DP window")
        while self.level < blevel:
            self._advance()
        for z in range(len(self.ts.colors)):
            j = blevel if z <= btop else blevel - 1
            src = self._get_prefix(z, j)
            for i in range(self.order):
                if src[i]:
                    qs._dict_add(total[i], src[i])
        return QSeries._raw(total, self.density)


def series_bounded(
    ts: TransitionSystem,
    bound: Symbol | str,
    order: int,
    substitution: Substitution | None = None,
) -> QSeries:
    """Generating function of valid partitions with largest part <= bound.

    ``substitution`` specializes markers at the weight level (symbol ``x_i``
    becomes ``image(x) * q^(k*i)``); this is equivalent to substituting
    into the symbolic series but never needs extra input terms.

    The DP states on "largest part is exactly y_m":
    F(y_m) = w q^e (1 + sum of F(z_j) over allowed successors), divided by
    (1 - w q^e) when y may repeat.
    """
    return BoundedFamily(ts, order, substitution, keep=False).series(bound)


def limit_level(ts: TransitionSystem, order: int, substitution: Substitution | None = None) -> int:
    """Highest level whose parts can still reach below q^order."""
    weights, k = _color_weights(ts, substitution)
    shifts = [w[1] for w in weights if w is not None]
    if not shifts:
        return 0
    return max((order - 1 - s) // k for s in shifts) + 1


def series_limit(ts: TransitionSystem, order: int, substitution: Substitution | None = None) -> QSeries:
    """The n -> infinity limit of the bounded series, exact below q^order."""
    level = limit_level(ts, order, substitution)
    return series_bounded(ts, ts.largest_symbol(level), order, substitution)


# ---------------------------------------------------------------------------
# recurrences and shift equations

Coefficient = Callable[[int], "Polynomial | int"]


@dataclass(frozen=True)
class RecurrenceTerm:
    """``coefficient(n) * g^{system}_{color_(n+offset)}`` under a substitution."""

    coefficient: Coefficient
    system: str
    color: str
    offset: int = 0
    substitution: Substitution | None = None


@dataclass(frozen=True)
class RecurrenceSpec:
    """A denominator-cleared linear relation whose terms should sum to zero."""

    name: str
    terms: tuple

    def __post_init__(self):
        if len(self.terms) < 2:
            raise ValueError("a relation needs at least two terms")


def evaluate_relation(
    spec: RecurrenceSpec,
    n: int,
    order: int,
    systems: Mapping[str, TransitionSystem] = BUILTIN,
    cache: dict | None = None,
) -> QSeries:
    cache = {} if cache is None else cache
    total = QSeries.zero(order)
    for term in spec.terms:
        ts = systems.get(term.system)
        if ts is None:
            raise UnresolvedSequenceTag(f"no transition system named {term.system!r}")
        try:
            ts.index(term.color)
        except UnknownColor as exc:
            raise UnresolvedSequenceTag(str(exc)) from None
        level = n + term.offset
        fk = (term.system, term.substitution, order)
        if fk not in cache:
            cache[fk] = BoundedFamily(ts, order, term.substitution)
        coeff = term.coefficient(n)
        if not isinstance(coeff, Polynomial):
            coeff = Polynomial.constant(coeff)
        total = total + coeff.to_series(order) * cache[fk].series((term.color, level))
    return total


def check_relation(
    spec: RecurrenceSpec,
    n_range: Iterable[int],
    order: int,
    systems: Mapping[str, TransitionSystem] = BUILTIN,
) -> IdentityReport:
    """Evaluate the relation for each n; PASS iff every value vanishes below q^order."""
    start = time.perf_counter()
    cache: dict = {}
    ns = list(n_range)
    for n in ns:
        value = evaluate_relation(spec, n, order, systems, cache)
        hit = value.first_nonzero()
        if hit is not None:
            qpow, coeff = hit
            return IdentityReport(
                spec.name, FAIL,
                {"n": f"{ns[0]}..{ns[-1]}"}, order,
                {"n": n, "q_power": qpow, "coefficient": str(coeff)},
                time.perf_counter() - start,
            )
    return IdentityReport(
        spec.name, PASS, {"n": f"{ns[0]}..{ns[-1]}"}, order, None, time.perf_counter() - start
    )
