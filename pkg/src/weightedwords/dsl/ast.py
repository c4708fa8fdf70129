"""Expression tree for the relation language.

Nodes are frozen dataclasses; the source position is kept for diagnostics
but excluded from equality, so a reparsed tree compares equal to the
original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = Optional[tuple]


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Int:
    value: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    """A marker (a, b, c), q, or an index variable."""

    ident: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Poch:
    base: "Expr"
    step: "Expr"
    count: Optional["Expr"]  # None is the infinite product
    inverse: bool = False
    pos: Pos = _pos()


@dataclass(frozen=True)
class QBin:
    top: "Expr"
    bottom: "Expr"
    step: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class GSeries:
    system: str
    color: str
    level: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class GLimit:
    system: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Image:
    """Image of a marker: ``zero``, or ``target * q^shift`` (target None erases the marker)."""

    target: Optional[str]
    shift: int = 0
    zero: bool = False


@dataclass(frozen=True)
class Subst:
    operand: "Expr"
    images: tuple  # ((marker, Image), ...) in marker order
    q_power: int = 1
    pos: Pos = _pos()


@dataclass(frozen=True)
class Sum:
    index: str
    lower: "Expr"
    upper: Optional["Expr"]  # None means auto
    body: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class HSeq:
    route: str
    n: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Census:
    family: str
    markers: tuple  # ((marker, statistic), ...)
    pos: Pos = _pos()


Expr = Union[Int, Name, Neg, BinOp, Pow, Poch, QBin, GSeries, GLimit, Subst, Sum, HSeq, Census]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def unparse(e: Expr) -> str:
    """Canonical text; ``parse(unparse(e)) == e``."""
    return _up(e, 0)


def _up(e, ctx: int) -> str:
    if isinstance(e, Int):
        s = str(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Neg):
        s = "-" + _up(e.operand, 3)
        return f"({s})" if ctx > 1 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        # left-associative: the right operand needs parentheses at equal precedence
        s = f"{_up(e.left, p)} {e.op} {_up(e.right, p + 1)}"
        return f"({s})" if p < ctx else s
    if isinstance(e, Pow):
        s = f"{_up(e.base, 4)}^{_exp(e.exponent)}"
        # the grammar takes an atom as base, so a power base needs parentheses
        return f"({s})" if ctx >= 4 else s
    if isinstance(e, Poch):
        args = [unparse(e.base), unparse(e.step), "inf" if e.count is None else unparse(e.count)]
        if e.inverse:
            args.append("inv")
        return f"poch({', '.join(args)})"
    if isinstance(e, QBin):
        return f"qbin({unparse(e.top)}, {unparse(e.bottom)}, {unparse(e.step)})"
    if isinstance(e, GSeries):
        return f"gseries({e.system}, {e.color}, {unparse(e.level)})"
    if isinstance(e, GLimit):
        return f"glimit({e.system})"
    if isinstance(e, Subst):
        maps = [f"{m}->{_image(img)}" for m, img in e.images]
        if e.q_power != 1:
            maps.append(f"q->q^{e.q_power}")
        return f"subst({unparse(e.operand)}; {', '.join(maps)})"
    if isinstance(e, Sum):
        hi = "auto" if e.upper is None else unparse(e.upper)
        return f"sum({e.index}, {unparse(e.lower)}, {hi}, {unparse(e.body)})"
    if isinstance(e, HSeq):
        return f"hseq({e.route}, {unparse(e.n)})"
    if isinstance(e, Census):
        if not e.markers:
            return f"census({e.family})"
        return f"census({e.family}; {', '.join(f'{m}={s}' for m, s in e.markers)})"
    raise TypeError(f"not an expression node: {e!r}")


def _exp(e) -> str:
    if isinstance(e, (Int, Name)) and not (isinstance(e, Int) and e.value < 0):
        return _up(e, 4)
    return f"({unparse(e)})"


def _image(img: Image) -> str:
    if img.zero:
        return "0"
    parts = [img.target] if img.target else []
    if img.shift:
        parts.append(f"q^{img.shift}" if img.shift != 1 else "q")
    return "*".join(parts) or "1"
