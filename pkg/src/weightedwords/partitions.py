"""Enumerators and censuses for the classical partition families.

Every family is described once, as a scan over part sizes from largest to
smallest: at each size ``k`` the scan picks a multiplicity (and, for
overpartitions, whether the first ``k`` is overlined) and a small state
records what the constraints still need to know about larger sizes.  The
same description drives witness generation and the counting DP.

The definitional predicates at the bottom (``is_macmahon_gap`` and friends)
restate each family directly on a finished partition; the tests use them
as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .qseries import QSeries, marker_key

Partition = tuple


@dataclass(frozen=True)
class Overpartition:
    parts: tuple
    overlined: frozenset = frozenset()

    def __post_init__(self):
        missing = set(self.overlined) - set(self.parts)
        if missing:
            raise ValueError(f"overlined sizes {sorted(missing)} do not occur")

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __str__(self) -> str:
        out, seen = [], set()
        for p in self.parts:
            if p in self.overlined and p not in seen:
                out.append(overline(p))
            else:
                out.append(str(p))
            seen.add(p)
        return "(" + ",".join(out) + ")"

    def as_json(self) -> dict:
        return {"parts": list(self.parts), "overlined": sorted(self.overlined, reverse=True)}


def overline(k: int) -> str:
    return "".join(ch + "̅" for ch in str(k))


@dataclass(frozen=True)
class TwoColorPartition:
    """Red parts and green parts; printed green-first within a size."""

    red: tuple
    green: tuple

    @property
    def size(self) -> int:
        return sum(self.red) + sum(self.green)

    def labelled(self) -> list[tuple[int, str]]:
        parts = [(p, "g") for p in self.green] + [(p, "r") for p in self.red]
        return sorted(parts, key=lambda t: (-t[0], t[1] != "g"))

    def __str__(self) -> str:
        return "(" + ",".join(f"{p}_{c}" for p, c in self.labelled()) + ")"

    def as_json(self) -> dict:
        return {"red": list(self.red), "green": list(self.green)}


@dataclass(frozen=True)
class PartitionStats:
    size: int
    odd: int
    mod3: tuple = field(default=(0, 0, 0))
    mod6: tuple = field(default=(0,) * 6)
    length: int = 0


def stats(parts) -> PartitionStats:
    mod3, mod6 = [0] * 3, [0] * 6
    for p in parts:
        mod3[p % 3] += 1
        mod6[p % 6] += 1
    return PartitionStats(sum(parts), sum(p % 2 for p in parts), tuple(mod3), tuple(mod6), len(parts))


def fmt_partition(parts) -> str:
    return "(" + ",".join(map(str, parts)) + ")"


# --- family descriptions ---------------------------------------------------

@dataclass(frozen=True)
class Family:
    """A scan over sizes k = n..1.

    ``step(state, k, m, over)`` returns the next state or ``None`` if
    choosing multiplicity ``m`` (``over``: first copy overlined) is barred.
    """

    name: str
    step: Callable
    initial: object = 0  # must not be None, which means "barred"
    overpartition: bool = False
    about: str = ""


def _step_macmahon(prev_present, k, m, over):
    if m and (k < 2 or prev_present):
        return None
    return bool(m)


def _step_frequency(state, k, m, over):
    return None if m == 1 else state


def _congruence_step(residues: frozenset, modulus: int):
    def step(state, k, m, over):
        if m and k % modulus not in residues:
            return None
        return state
    return step


def _step_russell(last, k, m, over):
    # state: the last (larger) size present, forgotten once it is >= 3 above k
    if m:
        if k == 2:
            return None
        if last:
            d, s = last - k, last + k
            if d == 1 and s % 3 == 0:
                return None
            if d == 2 and s % 3 != 0:
                return None
        last = k
    return last if last and last - (k - 1) < 3 else 0


def _step_companion(state, k, m, over):
    prev_present, prev_over = state
    if m:
        if k == 1 and not over:
            return None
        if over and prev_present and not prev_over:
            return None
    return (bool(m), over)


def _step_au_chain(open_chain, k, m, over):
    # open_chain: some overlined size lies above k with every size in between present and plain
    if over and open_chain:
        return None
    if over:
        return True
    return open_chain and bool(m)


def _step_au(state, k, m, over):
    # state describes k+1 and k+2: (k+1 overlined, k+1 present, k+2 overlined)
    over1, present1, over2 = state
    if over and (over1 or (present1 and over2)):
        return None
    return (over, bool(m), over1)


def congruence_family(residues, modulus: int) -> Family:
    res = frozenset(r % modulus for r in residues)
    label = ",".join(map(str, sorted(res)))
    return Family(f"congruence[{label} mod {modulus}]", _congruence_step(res, modulus), 0,
                  about=f"parts congruent to {label} modulo {modulus}")


MACMAHON_GAP = Family("macmahon_gap", _step_macmahon, False,
                      about="no two consecutive integers as parts, all parts >= 2")
FREQUENCY = Family("frequency", _step_frequency, 0, about="no part occurs exactly once")
MACMAHON_CONGRUENCE = congruence_family((0, 2, 3, 4), 6)
RUSSELL_GAP = Family("russell_gap", _step_russell, 0,
                     about="no 2s; adjacent parts differing by 1 (2) have sum not divisible (divisible) by 3")
RUSSELL_CONGRUENCE = congruence_family((0, 1, 3, 5), 6)
COMPANION = Family("overpartition_companion", _step_companion, (False, False), True,
                   about="a 1 is overlined; if k is overlined and k+1 occurs then k+1 is overlined")
ANDREWS_UNCU = Family("overpartition_au", _step_au, (False, False, False), True,
                      about="no overlined k with overlined k+1, nor with k+1 present and overlined k+2")

ANDREWS_UNCU_CHAIN = Family("overpartition_au_chain", _step_au_chain, False, True,
                            about="no two overlined sizes with every size strictly between them present and plain")


def _choices(family: Family, k: int, budget: int):
    for m in range(budget // k + 1):
        if family.overpartition and m:
            yield m, False
            yield m, True
        else:
            yield m, False


def generate(family: Family, n: int) -> Iterator:
    """Witnesses of size n, largest-first; yields tuples or Overpartitions."""
    if n < 0:
        return

    def rec(k, remaining, state, parts, over):
        if remaining == 0:
            # the smaller sizes all get multiplicity 0; they must be allowed too
            for j in range(k, 0, -1):
                state = family.step(state, j, 0, False)
                if state is None:
                    return
            yield parts, over
            return
        if k == 0:
            return
        for m, o in _choices(family, k, remaining):
            nxt = family.step(state, k, m, o)
            if nxt is None:
                continue
            yield from rec(k - 1, remaining - m * k, nxt, parts + (k,) * m,
                           over | {k} if o else over)

    for parts, over in rec(n, n, family.initial, (), frozenset()):
        yield Overpartition(parts, over) if family.overpartition else parts


def enumerate_family(family: Family, n: int) -> list:
    """Sorted witness list: descending lex on parts, overlined versions first."""
    items = list(generate(family, n))
    if family.overpartition:
        return sorted(items, key=_over_sort_key)
    return sorted(items, key=lambda p: tuple(-x for x in p))


def _over_sort_key(o: Overpartition):
    sizes = sorted(set(o.parts), reverse=True)
    return tuple(-x for x in o.parts), tuple(s not in o.overlined for s in sizes)


# --- counting --------------------------------------------------------------

def census(family: Family, order: int, markers: Optional[dict] = None) -> QSeries:
    """Generating series of the family to q^(order-1).

    ``markers`` maps a marker name to a per-part statistic name (see
    ``PART_STATS``); each part adds one to that marker's exponent when the
    statistic holds for it.
    """
    markers = markers or {}
    tests = {name: PART_STATS[stat] for name, stat in markers.items()}
    # table[(weight, state)] -> {marker key: count}
    table = {(0, family.initial): {0: 1}}
    for k in range(order - 1, 0, -1):
        part_key = sum(marker_key(x) for x, t in tests.items() if t(k))
        nxt: dict = {}
        for (w, state), poly in table.items():
            for m, o in _choices(family, k, order - 1 - w):
                ns = family.step(state, k, m, o)
                if ns is None:
                    continue
                slot = nxt.setdefault((w + m * k, ns), {})
                shift = part_key * m
                for key, v in poly.items():
                    slot[key + shift] = slot.get(key + shift, 0) + v
        table = nxt
    coeffs = [dict() for _ in range(order)]
    for (w, state), poly in table.items():
        for key, v in poly.items():
            coeffs[w][key] = coeffs[w].get(key, 0) + v
    coeffs = [{k: v for k, v in c.items() if v} for c in coeffs]
    # every marked part has size >= 1
    return QSeries._raw(coeffs, Fraction(1) if tests else None)


def counts(family: Family, n_max: int) -> list[int]:
    return census(family, n_max + 1).counts()


def _residue_test(modulus: int, r: int):
    return lambda k: k % modulus == r


PART_STATS: dict[str, Callable[[int], bool]] = {
    "odd": lambda k: k % 2 == 1,
    "any": lambda k: True,
    **{f"mod3_{r}": _residue_test(3, r) for r in range(3)},
    **{f"mod6_{r}": _residue_test(6, r) for r in range(6)},
}


# --- two-colour partitions -------------------------------------------------

@lru_cache(maxsize=None)
def _unrestricted(n: int, largest: int) -> int:
    if n == 0:
        return 1
    return sum(_unrestricted(n - k, k) for k in range(1, min(n, largest) + 1))


def _restricted(n: int, largest: int, residue: int, modulus: int) -> Iterator[tuple]:
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        if k % modulus == residue % modulus:
            for rest in _restricted(n - k, k, residue, modulus):
                yield (k,) + rest


def _unrestricted_parts(n: int, largest: int) -> Iterator[tuple]:
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _unrestricted_parts(n - k, k):
            yield (k,) + rest


def enum_two_color(n: int, residue: int, modulus: int) -> int:
    """Partitions of n into unrestricted red parts and green parts = residue mod modulus."""
    if n < 0:
        return 0
    return sum(_unrestricted(n - sum(g), n) for g in _green_parts(n, residue, modulus))


def _green_parts(n: int, residue: int, modulus: int) -> Iterator[tuple]:
    for total in range(n + 1):
        yield from _restricted(total, total, residue, modulus)


def two_color_witnesses(n: int, residue: int, modulus: int) -> list[TwoColorPartition]:
    out = [TwoColorPartition(red, green)
           for green in _green_parts(n, residue, modulus)
           for red in _unrestricted_parts(n - sum(green), n)]
    return sorted(out, key=_two_color_key)


def _two_color_key(t: TwoColorPartition):
    lab = t.labelled()
    return tuple(-p for p, _ in lab), tuple(c == "g" for _, c in lab)


# --- public enumerators ----------------------------------------------------

def enum_macmahon_gap(n: int) -> list[Partition]:
    return enumerate_family(MACMAHON_GAP, n)


def enum_frequency(n: int) -> list[Partition]:
    return enumerate_family(FREQUENCY, n)


def enum_congruence(n: int, residues, modulus: int) -> list[Partition]:
    return enumerate_family(congruence_family(residues, modulus), n)


def enum_russell_gap(n: int) -> list[Partition]:
    return enumerate_family(RUSSELL_GAP, n)


def enum_overpartition_companion(n: int) -> list[Overpartition]:
    return enumerate_family(COMPANION, n)


def enum_overpartition_au(n: int) -> list[Overpartition]:
    return enumerate_family(ANDREWS_UNCU, n)


FAMILIES: dict[str, Family] = {
    "macmahon_gap": MACMAHON_GAP,
    "frequency": FREQUENCY,
    "macmahon_congruence": MACMAHON_CONGRUENCE,
    "russell_gap": RUSSELL_GAP,
    "russell_congruence": RUSSELL_CONGRUENCE,
    "overpartition_companion": COMPANION,
    "overpartition_au": ANDREWS_UNCU,
    "overpartition_au_chain": ANDREWS_UNCU_CHAIN,
}

TWO_COLOR = {"two_color_2_3": (2, 3), "two_color_1_3": (1, 3)}


def family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown partition family {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


def census_by_name(name: str, order: int, markers: Optional[dict] = None) -> QSeries:
    """Census of a registered family, or of a two-colour family (counts only)."""
    if name in TWO_COLOR:
        if markers:
            raise ValueError(f"{name} carries no part statistics")
        return QSeries([enum_two_color(n, *TWO_COLOR[name]) for n in range(order)], order, density=None)
    return census(family(name), order, markers)


# --- definitional predicates (test oracle) ---------------------------------

def all_partitions(n: int) -> Iterator[Partition]:
    yield from _unrestricted_parts(n, n)


def all_overpartitions(n: int) -> Iterator[Overpartition]:
    for p in all_partitions(n):
        sizes = sorted(set(p), reverse=True)
        for mask in range(1 << len(sizes)):
            yield Overpartition(p, frozenset(s for i, s in enumerate(sizes) if mask >> i & 1))


def is_macmahon_gap(p) -> bool:
    return all(x >= 2 for x in p) and not any(x + 1 in p for x in p)


def is_frequency(p) -> bool:
    return all(p.count(x) != 1 for x in p)


def is_congruence(p, residues, modulus) -> bool:
    return all(x % modulus in {r % modulus for r in residues} for x in p)


def is_russell_gap(p) -> bool:
    if 2 in p:
        return False
    for x, y in zip(p, p[1:]):
        if x - y == 1 and (x + y) % 3 == 0:
            return False
        if x - y == 2 and (x + y) % 3 != 0:
            return False
    return True


def is_companion(o: Overpartition) -> bool:
    if 1 in o.parts and 1 not in o.overlined:
        return False
    return all(k + 1 in o.overlined for k in o.overlined if k + 1 in o.parts)


def is_au_chain(o: Overpartition) -> bool:
    ov, present = sorted(o.overlined), set(o.parts)
    return not any(all(s in present and s not in o.overlined for s in range(lo + 1, hi))
                   for lo, hi in zip(ov, ov[1:]))


def is_au(o: Overpartition) -> bool:
    ov, present = o.overlined, set(o.parts)
    return not any(k + 1 in ov or (k + 1 in present and k + 2 in ov) for k in ov)
