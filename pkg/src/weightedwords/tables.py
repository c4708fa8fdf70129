"""Side-by-side witness lists for the partition theorems.

A theorem with a witness form names two or more partition families and,
for the refinements, the statistics that ``--m`` and ``--k`` fix.  The
table lists every partition of ``n`` on each side that meets the filters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import partitions as P
from .errors import ConfigError, NoWitnessForm


@dataclass(frozen=True)
class Side:
    label: str
    source: str  # a family name or a two-colour name
    m_stat: Optional[Callable] = None  # statistic fixed by --m
    k_stat: Optional[Callable] = None  # statistic fixed by --k


@dataclass(frozen=True)
class TableForm:
    theorem: str
    sides: tuple
    about: str = ""


def _odd(p):
    return P.stats(p).odd


def _mod3(r):
    return lambda p: P.stats(p).mod3[r]


def _mod6(r):
    return lambda p: P.stats(p).mod6[r]


FORMS: dict[str, TableForm] = {f.theorem: f for f in (
    TableForm("thm_MacMahon", (
        Side("Gap conditions", "macmahon_gap"),
        Side("Frequency conditions", "frequency"),
        Side("Congruence conditions", "macmahon_congruence"),
    ), "gap, frequency and mod 6 congruence partitions"),
    TableForm("thm_Mod2_MM_refinement", (
        Side("Gap conditions", "macmahon_gap", _odd),
        Side("Congruence conditions", "macmahon_congruence", _odd),
    ), "--m fixes the number of odd parts"),
    TableForm("thm_Mod3_MM_refinement", (
        Side("Gap conditions", "macmahon_gap", _mod3(1), _mod3(2)),
        Side("Congruence conditions", "macmahon_congruence", _mod6(4), _mod6(2)),
    ), "--m and --k fix parts 1, 2 mod 3 (gap) and 4, 2 mod 6 (congruence)"),
    TableForm("thm_Russell", (
        Side("Gap conditions", "russell_gap"),
        Side("Congruence conditions", "russell_congruence"),
    ), "Russell gap and mod 6 congruence partitions"),
    TableForm("thm_Russell_refinement", (
        Side("Gap conditions", "russell_gap", _mod3(1), _mod3(2)),
        Side("Congruence conditions", "russell_congruence", _mod6(1), _mod6(5)),
    ), "--m and --k fix parts 1, 2 mod 3 (gap) and 1, 5 mod 6 (congruence)"),
    TableForm("thm_main_comp", (
        Side("Pattern conditions", "overpartition_companion"),
        Side("Colored conditions", "two_color_2_3"),
    ), "overpartition companion and two-colour partitions, green parts 2 mod 3"),
    TableForm("overpartition_au_product", (
        Side("Pattern conditions", "overpartition_au"),
        Side("Colored conditions", "two_color_1_3"),
    ), "overpartitions avoiding the two listed patterns; green parts 1 mod 3"),
    TableForm("overpartition_au_chain_product", (
        Side("Pattern conditions", "overpartition_au_chain"),
        Side("Colored conditions", "two_color_1_3"),
    ), "overpartitions without an overlined chain; green parts 1 mod 3"),
)}


@dataclass
class Column:
    label: str
    entries: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)


@dataclass
class Table:
    theorem: str
    params: dict
    columns: list

    @property
    def balanced(self) -> bool:
        return len({c.count for c in self.columns}) == 1

    def text(self) -> str:
        head = ", ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"{self.theorem} ({head})"]
        width = max(len(c.label) for c in self.columns) + 1
        for c in self.columns:
            lines.append(f"{c.label + ':':<{width}} {c.count}")
            lines.extend(_wrap([label(e) for e in c.entries], indent="  "))
        if not self.balanced:
            lines.append("cardinalities differ: " + " vs ".join(str(c.count) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rec = {
            "theorem": self.theorem,
            "params": self.params,
            "columns": [
                {"label": c.label, "count": c.count,
                 "entries": [label(e) for e in c.entries],
                 "parts": [_as_json(e) for e in c.entries]}
                for c in self.columns
            ],
            "balanced": self.balanced,
        }
        return json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n"


def label(e) -> str:
    """Display form: (15,3), overlined sizes, or 2_g style colour tags."""
    return P.fmt_partition(e) if isinstance(e, tuple) else str(e)


def _as_json(e):
    return e.as_json() if hasattr(e, "as_json") else list(e)


def _wrap(items: list[str], indent: str, width: int = 78) -> list[str]:
    lines, cur = [], indent
    for i, item in enumerate(items):
        piece = item + ("," if i < len(items) - 1 else "")
        if cur.strip() and len(cur) + 1 + len(piece) > width:
            lines.append(cur.rstrip())
            cur = indent
        cur += piece + " "
    if cur.strip():
        lines.append(cur.rstrip())
    return lines


def witnesses(source: str, n: int) -> list:
    if source in P.TWO_COLOR:
        return P.two_color_witnesses(n, *P.TWO_COLOR[source])
    return P.enumerate_family(P.family(source), n)


def _parts(e) -> tuple:
    if isinstance(e, P.TwoColorPartition):
        return tuple(p for p, _ in e.labelled())
    if isinstance(e, P.Overpartition):
        return e.parts
    return e


def emit_table(theorem: str, n: int, m: Optional[int] = None, k: Optional[int] = None) -> Table:
    """Witness lists of every side of ``theorem`` at size ``n``."""
    form = FORMS.get(theorem)
    if form is None:
        raise NoWitnessForm(
            f"{theorem!r} has no witness-list form; tables exist for {', '.join(sorted(FORMS))}")
    if n < 0:
        raise ConfigError("n must be non-negative")
    if m is not None and form.sides[0].m_stat is None:
        raise ConfigError(f"{theorem} has no statistic for --m")
    if k is not None and form.sides[0].k_stat is None:
        raise ConfigError(f"{theorem} has no statistic for --k")
    params = {"n": n}
    if m is not None:
        params["m"] = m
    if k is not None:
        params["k"] = k
    columns = []
    for side in form.sides:
        keep = []
        for e in witnesses(side.source, n):
            parts = _parts(e)
            if m is not None and side.m_stat(parts) != m:
                continue
            if k is not None and side.k_stat(parts) != k:
                continue
            keep.append(e)
        columns.append(Column(side.label, keep))
    return Table(theorem, params, columns)
