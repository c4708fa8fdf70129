"""Data-driven identity registry.

Identities live in stanza files (see ``data/builtin.ww`` for the format);
each stanza names a left side, one or more right sides and the parameter
ranges to check.  ``run_entry`` turns a stanza into an ``IdentityReport``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from ..dsl.ast import Expr, unparse
from ..dsl.evaluator import Evaluator, sub
from ..dsl.parser import parse
from ..errors import ConfigError, DSLSyntaxError, WeightedWordsError
from ..qseries import Polynomial, QSeries
from ..report import FAIL, PASS, IdentityReport

DEFAULT_ORDER = 41
_KEYS = ("identity", "group", "suite", "about", "N", "n", "lhs", "rhs")


@dataclass(frozen=True)
class Entry:
    name: str
    lhs: Expr
    rhs: tuple = ()
    group: str = ""
    suites: tuple = ()
    about: str = ""
    order: Optional[int] = None
    n_range: Optional[tuple] = None
    source_line: int = 0

    @property
    def sides(self) -> tuple:
        return self.rhs or (parse("0"),)

    def matches(self, selector: str) -> bool:
        return selector in (self.name, self.group)

    def text(self) -> str:
        lines = [f"identity {self.name}"]
        if self.group:
            lines.append(f"  group {self.group}")
        if self.suites:
            lines.append(f"  suite {' '.join(self.suites)}")
        if self.about:
            lines.append(f"  about {self.about}")
        if self.order is not None:
            lines.append(f"  N {self.order}")
        if self.n_range:
            lines.append(f"  n {self.n_range[0]}..{self.n_range[1]}")
        lines.append(f"  lhs {unparse(self.lhs)}")
        lines.extend(f"  rhs {unparse(r)}" for r in self.rhs)
        return "\n".join(lines) + "\n"


def loads(text: str, source: str = "<string>") -> list[Entry]:
    """Parse identity stanzas; syntax errors report the file line."""
    stanzas: list[dict] = []
    cur: Optional[dict] = None
    last_key = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        if head == "identity":
            cur = {"name": rest, "line": lineno, "fields": []}
            stanzas.append(cur)
            last_key = None
        elif cur is None:
            raise ConfigError(f"{source}:{lineno}: expected 'identity <name>'")
        elif head in _KEYS:
            cur["fields"].append([head, rest, lineno])
            last_key = head
        elif last_key in ("lhs", "rhs", "about"):
            cur["fields"][-1][1] += " " + line.strip()
        else:
            raise ConfigError(f"{source}:{lineno}: unknown field {head!r}")
    return [_entry(s, source) for s in stanzas]


def _entry(s: dict, source: str) -> Entry:
    kw: dict = {"name": s["name"], "source_line": s["line"]}
    rhs = []
    for key, value, lineno in s["fields"]:
        where = f"{source}:{lineno}"
        if key in ("lhs", "rhs"):
            try:
                expr = parse(value)
            except DSLSyntaxError as exc:
                raise ConfigError(f"{where}: {exc}") from exc
            if key == "lhs":
                kw["lhs"] = expr
            else:
                rhs.append(expr)
        elif key == "group":
            kw["group"] = value
        elif key == "suite":
            kw["suites"] = tuple(value.split())
        elif key == "about":
            kw["about"] = value
        elif key == "N":
            kw["order"] = _positive(value, where)
        elif key == "n":
            lo, sep, hi = value.partition("..")
            try:
                kw["n_range"] = (int(lo), int(hi) if sep else int(lo))
            except ValueError:
                raise ConfigError(f"{where}: bad range {value!r}") from None
            if kw["n_range"][1] < kw["n_range"][0]:
                raise ConfigError(f"{where}: empty range {value!r}")
    if "lhs" not in kw:
        raise ConfigError(f"{source}:{s['line']}: identity {s['name']} has no lhs")
    return Entry(rhs=tuple(rhs), **kw)


def _positive(value: str, where: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {value!r}") from None
    if v < 1:
        raise ConfigError(f"{where}: truncation order must be at least 1")
    return v


def load(path) -> list[Entry]:
    with open(path, encoding="utf-8") as f:
        return loads(f.read(), str(path))


def builtin() -> list[Entry]:
    text = resources.files("weightedwords").joinpath("data/builtin.ww").read_text(encoding="utf-8")
    return loads(text, "builtin.ww")


def select(entries: Iterable[Entry], identity: Optional[str] = None, suite: Optional[str] = None) -> list[Entry]:
    out = [e for e in entries
           if (identity is None or e.matches(identity)) and (suite is None or suite in e.suites)]
    if (identity or suite) and not out:
        raise ConfigError(f"no identity matches {identity or suite!r}")
    return out


# -- checking -----------------------------------------------------------------

def _first_difference(diff) -> Optional[tuple]:
    """(q power, coefficient text) of the lowest non-zero term, or None."""
    if isinstance(diff, QSeries):
        hit = diff.first_nonzero()
        return None if hit is None else (hit[0], str(hit[1]))
    if isinstance(diff, int):
        return None if diff == 0 else (0, str(diff))
    if not diff:
        return None
    e = min(qe for _, qe, _ in diff.terms())
    coeff = Polynomial({(m, 0): v for m, qe, v in diff.terms() if qe == e})
    return e, str(coeff)


def run_entry(entry: Entry, order: Optional[int] = None, n_max: Optional[int] = None,
              systems: Optional[dict] = None) -> IdentityReport:
    """Check one identity; the first mismatch becomes the witness."""
    order = order or entry.order or DEFAULT_ORDER
    ns: list = [None]
    params: dict = {}
    if entry.n_range:
        lo, hi = entry.n_range
        if n_max is not None:
            hi = n_max
        if hi < lo:
            raise ConfigError(f"{entry.name}: n range {lo}..{hi} is empty")
        ns = list(range(lo, hi + 1))
        params["n"] = f"{lo}..{hi}"
    ev = Evaluator(order, systems)
    exact = True
    witness = None
    start = time.perf_counter()
    for n in ns:
        env = {} if n is None else {"n": n}
        try:
            left = ev(entry.lhs, env)
            for k, side in enumerate(entry.sides):
                diff = sub(left, ev(side, env), order)
                exact = exact and not isinstance(diff, QSeries)
                hit = _first_difference(diff)
                if hit is not None:
                    witness = {"q_power": hit[0], "coefficient": hit[1]}
                    if len(entry.sides) > 1:
                        witness["rhs"] = k + 1
                    break
        except WeightedWordsError as exc:
            witness = {"error": f"{type(exc).__name__}: {exc}"}
        if witness is not None:
            if n is not None:
                witness["n"] = n
            break
    elapsed = time.perf_counter() - start
    return IdentityReport(
        entry.name,
        PASS if witness is None else FAIL,
        params,
        "exact" if exact and witness is None else order,
        witness,
        elapsed,
    )


def verify(names: Iterable[str], order: Optional[int] = None, n_max: Optional[int] = None) -> list[IdentityReport]:
    entries = builtin()
    return [run_entry(e, order, n_max) for name in names for e in select(entries, identity=name)]


def verify_sum_identities(n_max: int = 25) -> list[IdentityReport]:
    if n_max < 1:
        raise ConfigError("n_max must be at least 1")
    return verify(["eq_sum1", "eq_sum2", "eq_sum3"], n_max=n_max)


def verify_product_theorems(order: int = 61) -> list[IdentityReport]:
    if order < 1:
        raise ConfigError("truncation order must be at least 1")
    return verify(["Weighted_MM", "Weighted_R", "Weighted_R2"], order=order)


def verify_substitution_chain(order: int = 30, n_max: int = 12) -> list[IdentityReport]:
    if order < 1:
        raise ConfigError("truncation order must be at least 1")
    return verify(["substitution_chain", "substitution_chain_b_eq_aq"], order=order, n_max=n_max)
