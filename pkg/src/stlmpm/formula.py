"""STL formula language: parsing, negation normal form, and desugaring to the core grammar.

Surface formulas may use ``G``, ``F``, ``U`` and ``U'`` over Boolean state
formulas.  The core grammar keeps only region leaves, conjunction, ``G`` and
``U'``; every Boolean state formula is compiled into a single region (a
:class:`~stlmpm.system.StateSet`) on the model grid.

Text syntax (whitespace-insensitive)::

    G[0,10] F[0,5] comfort
    (p) U[2,5] (q) & G[3,7] !r
    F[0,6] A1 & F[0,6] G[0,2] A2
    x0 in [20, 25] | x1 >= 3

Precedence from loosest to tightest: ``->``, ``|``, ``&``, ``U``/``U'``,
prefix operators (``!``, ``G``, ``F``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .errors import (DimensionMismatch, FormulaSyntaxError, FragmentError,
                     IntervalOrderError, NegatedTemporalError, UnknownPredicate)
from .system import GridSpec, StateSet

# --------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class BoxPredicate:
    """Closed box constraint; ``intervals`` holds ``(dim, lo, hi)`` triples."""

    intervals: tuple[tuple[int, float, float], ...]
    ndim: Optional[int] = None

    @classmethod
    def from_bounds(cls, bounds) -> "BoxPredicate":
        """Build from a per-dimension list of ``[lo, hi]`` (``None`` = unconstrained)."""
        items = tuple((d, float(b[0]), float(b[1])) for d, b in enumerate(bounds) if b is not None)
        return cls(items, ndim=len(bounds))

    def __post_init__(self):
        for _, lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"empty box interval [{lo}, {hi}]")

    def check_dim(self, ndim: int) -> None:
        if self.ndim is not None and self.ndim != ndim:
            raise DimensionMismatch(f"box predicate has {self.ndim} dims, grid has {ndim}")
        for d, _, _ in self.intervals:
            if d >= ndim:
                raise DimensionMismatch(f"box predicate constrains x{d} on a {ndim}-D grid")

    def value(self, points) -> np.ndarray:
        """Signed margin; non-negative exactly inside the box."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.full(pts.shape[0], np.inf)
        for d, lo, hi in self.intervals:
            out = np.minimum(out, np.minimum(pts[:, d] - lo, hi - pts[:, d]))
        return out

    def holds(self, points) -> np.ndarray:
        return self.value(points) >= 0


@dataclass(frozen=True)
class LinearPredicate:
    """Half-space ``c . x + d >= 0``."""

    c: tuple[float, ...]
    d: float = 0.0

    def check_dim(self, ndim: int) -> None:
        if len(self.c) != ndim:
            raise DimensionMismatch(f"linear predicate has {len(self.c)} coefficients, grid has {ndim}")

    def value(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ np.asarray(self.c, dtype=float) + self.d

    def holds(self, points) -> np.ndarray:
        return self.value(points) >= 0


Predicate = Union[BoxPredicate, LinearPredicate]


def predicate_region(p: Predicate, grid: GridSpec) -> StateSet:
    """Cells whose lattice point satisfies the predicate."""
    p.check_dim(grid.ndim)
    return StateSet(p.holds(grid.centers))


# --------------------------------------------------------------------------
# surface syntax


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Pred:
    name: str
    predicate: Optional[Predicate] = None  # set for inline constraints


@dataclass(frozen=True)
class Not:
    arg: "Surface"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: "Surface"
    right: "Surface"


@dataclass(frozen=True)
class Eventually:
    a: int
    b: int
    arg: "Surface"


@dataclass(frozen=True)
class Always:
    a: int
    b: int
    arg: "Surface"


@dataclass(frozen=True)
class Until:
    a: int
    b: int
    left: "Surface"
    right: "Surface"


@dataclass(frozen=True)
class UntilPrime:
    a: int
    b: int
    left: "Surface"
    right: "Surface"


Surface = Union[Top, Pred, Not, And, Or, Implies, Eventually, Always, Until, UntilPrime]
_TEMPORAL = (Eventually, Always, Until, UntilPrime)

# --------------------------------------------------------------------------
# core syntax


@dataclass(frozen=True)
class Region:
    """Leaf: the state lies in a fixed set of grid cells."""

    region: StateSet
    label: str = ""


@dataclass(frozen=True)
class CoreAnd:
    children: tuple


@dataclass(frozen=True)
class CoreAlways:
    a: int
    b: int
    child: "Core"


@dataclass(frozen=True)
class CoreUntil:
    """``left U'[a,b] right``: left must hold on ``[t+a, t']`` for the witness ``t'``."""

    a: int
    b: int
    left: "Core"
    right: "Core"


Core = Union[Region, CoreAnd, CoreAlways, CoreUntil]

# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|>=|<=|[()\[\],&|!'\-+])
""", re.VERBOSE)

_INLINE_VAR = re.compile(r"x(\d+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(msg, self.text, tok[2])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def at(self, value) -> bool:
        return self.peek()[1] == value

    def parse(self):
        f = self.implication()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        args = [self.conjunction()]
        while self.at("|"):
            self.next()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.until()]
        while self.at("&"):
            self.next()
            args.append(self.until())
        return args[0] if len(args) == 1 else And(tuple(args))

    def _temporal_op(self):
        """Return ``(name, a, b)`` if a temporal operator starts here, else None."""
        kind, value, _ = self.peek()
        if kind != "ident" or value not in ("G", "F", "U"):
            return None
        if value == "U" and self.peek(1)[1] == "'" and self.peek(2)[1] == "[":
            self.i += 2
            name = "U'"
        elif self.peek(1)[1] == "[":
            self.i += 1
            name = value
        else:
            return None
        open_tok = self.expect("[")
        a = self.integer()
        self.expect(",")
        b = self.integer()
        self.expect("]")
        if b < a:
            raise IntervalOrderError(f"interval [{a},{b}] of {name} at position {open_tok[2]} has a > b")
        return name, a, b

    def integer(self) -> int:
        tok = self.next()
        if tok[0] != "num" or not tok[1].isdigit():
            raise self.error("interval bounds must be non-negative integers", tok)
        return int(tok[1])

    def until(self):
        left = self.unary()
        save = self.i
        op = self._temporal_op()
        if op is None:
            return left
        name, a, b = op
        if name not in ("U", "U'"):
            self.i = save
            raise self.error(f"unexpected operator {name}")
        right = self.unary()
        return (Until if name == "U" else UntilPrime)(a, b, left, right)

    def unary(self):
        if self.at("!"):
            self.next()
            return Not(self.unary())
        save = self.i
        op = self._temporal_op()
        if op is not None:
            name, a, b = op
            if name == "G":
                return Always(a, b, self.unary())
            if name == "F":
                return Eventually(a, b, self.unary())
            self.i = save
            raise self.error("until needs a left operand")
        return self.atom()

    def atom(self):
        tok = self.next()
        kind, value, pos = tok
        if value == "(":
            f = self.implication()
            self.expect(")")
            return f
        if kind == "ident":
            if value in ("top", "true"):
                return Top()
            m = _INLINE_VAR.match(value)
            if m and (self.at("in") or self.at(">=") or self.at("<=")):
                return self.inline(int(m.group(1)), value)
            if self.names is not None and value not in self.names:
                raise UnknownPredicate(f"undeclared predicate {value!r} at position {pos}")
            return Pred(value)
        raise self.error(f"unexpected {value or 'end of input'!r}", tok)

    def number(self) -> float:
        sign = 1.0
        while self.peek()[1] in ("-", "+"):
            if self.next()[1] == "-":
                sign = -sign
        tok = self.next()
        if tok[0] != "num":
            raise self.error("expected a number", tok)
        return sign * float(tok[1])

    def inline(self, dim: int, var: str):
        op = self.next()[1]
        if op == "in":
            self.expect("[")
            lo = self.number()
            self.expect(",")
            hi = self.number()
            self.expect("]")
            if lo > hi:
                raise IntervalOrderError(f"box [{lo},{hi}] on {var} has lo > hi")
            text = f"{var} in [{_num(lo)},{_num(hi)}]"
            return Pred(text, BoxPredicate(((dim, lo, hi),)))
        bound = self.number()
        if op == ">=":
            pred = _SparseLinear(dim, 1.0, -bound)
        else:
            pred = _SparseLinear(dim, -1.0, bound)
        return Pred(f"{var} {op} {_num(bound)}", pred)


@dataclass(frozen=True)
class _SparseLinear:
    """Inline single-variable half-space ``s * x[dim] + d >= 0``."""

    dim: int
    s: float
    d: float

    def check_dim(self, ndim):
        if self.dim >= ndim:
            raise DimensionMismatch(f"inline predicate constrains x{self.dim} on a {ndim}-D grid")

    def value(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.s * pts[:, self.dim] + self.d

    def holds(self, points):
        return self.value(points) >= 0


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse(text: str, predicates: Optional[Mapping] = None) -> Surface:
    """Parse formula text.

    When ``predicates`` is given, every bare identifier must be one of its
    keys; otherwise names are accepted as-is and resolved at desugar time.
    """
    names = None if predicates is None else set(predicates)
    return _Parser(text, names).parse()


# --------------------------------------------------------------------------
# normal forms


def is_boolean(f) -> bool:
    """True if ``f`` contains no temporal operator."""
    if isinstance(f, (Top, Pred)):
        return True
    if isinstance(f, Not):
        return is_boolean(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_boolean(a) for a in f.args)
    if isinstance(f, Implies):
        return is_boolean(f.left) and is_boolean(f.right)
    return False


def to_nnf(f: Surface) -> Surface:
    """Push negations onto predicate leaves and rewrite implications as disjunctions."""
    if isinstance(f, (Top, Pred)):
        return f
    if isinstance(f, Not):
        return _negate(f.arg)
    if isinstance(f, And):
        return And(tuple(to_nnf(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(to_nnf(a) for a in f.args))
    if isinstance(f, Implies):
        return Or((_negate(f.left), to_nnf(f.right)))
    if isinstance(f, Always):
        return Always(f.a, f.b, to_nnf(f.arg))
    if isinstance(f, Eventually):
        return Eventually(f.a, f.b, to_nnf(f.arg))
    if isinstance(f, (Until, UntilPrime)):
        return type(f)(f.a, f.b, to_nnf(f.left), to_nnf(f.right))
    raise TypeError(f"not a surface formula: {f!r}")


def _negate(f: Surface) -> Surface:
    if isinstance(f, (Top, Pred)):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.arg)
    if isinstance(f, And):
        return Or(tuple(_negate(a) for a in f.args))
    if isinstance(f, Or):
        return And(tuple(_negate(a) for a in f.args))
    if isinstance(f, Implies):
        return And((to_nnf(f.left), _negate(f.right)))
    if isinstance(f, _TEMPORAL):
        raise NegatedTemporalError(f"negation over temporal operator: !({to_text(f)})")
    raise TypeError(f"not a surface formula: {f!r}")


def boolean_region(f: Surface, preds: Mapping[str, Predicate], grid: GridSpec) -> StateSet:
    """Satisfaction region of a Boolean state formula."""
    if isinstance(f, Top):
        return StateSet.full(grid.n_cells)
    if isinstance(f, Pred):
        p = f.predicate
        if p is None:
            try:
                p = preds[f.name]
            except KeyError:
                raise UnknownPredicate(f"undeclared predicate {f.name!r}") from None
        return predicate_region(p, grid)
    if isinstance(f, Not):
        return boolean_region(f.arg, preds, grid).complement()
    if isinstance(f, And):
        out = StateSet.full(grid.n_cells)
        for a in f.args:
            out = out & boolean_region(a, preds, grid)
        return out
    if isinstance(f, Or):
        out = StateSet.empty(grid.n_cells)
        for a in f.args:
            out = out | boolean_region(a, preds, grid)
        return out
    if isinstance(f, Implies):
        return boolean_region(f.left, preds, grid).complement() | boolean_region(f.right, preds, grid)
    raise FragmentError(f"temporal operator inside a state formula: {to_text(f)}")


def desugar(f: Surface, preds: Mapping[str, Predicate], grid: GridSpec) -> CoreAnd:
    """Rewrite an NNF surface formula into the core grammar with an ``and`` root.

    ``F[a,b] p`` becomes ``top U'[a,b] p`` and ``p U[a,b] q`` becomes
    ``(p U'[a,b] q) & G[0,a] p``.  Maximal Boolean subformulas are compiled
    into region leaves.
    """
    core = _desugar(f, preds, grid)
    if not isinstance(core, CoreAnd):
        core = CoreAnd((core,))
    return core


def _desugar(f, preds, grid) -> Core:
    if is_boolean(f):
        return Region(boolean_region(f, preds, grid), to_text(f))
    if isinstance(f, And):
        children, pending = [], []
        slot = None
        for a in f.args:
            if is_boolean(a):
                if slot is None:
                    slot = len(children)
                    children.append(None)
                pending.append(a)
            else:
                children.append(_desugar(a, preds, grid))
        if pending:
            merged = pending[0] if len(pending) == 1 else And(tuple(pending))
            children[slot] = Region(boolean_region(merged, preds, grid), to_text(merged))
        return CoreAnd(tuple(children))
    if isinstance(f, (Or, Implies)):
        raise FragmentError(f"disjunction over temporal formulas is not supported: {to_text(f)}")
    if isinstance(f, Not):
        raise NegatedTemporalError(f"negation over temporal operator: {to_text(f)}")
    if isinstance(f, Always):
        return CoreAlways(f.a, f.b, _desugar(f.arg, preds, grid))
    if isinstance(f, Eventually):
        top = Region(StateSet.full(grid.n_cells), "top")
        return CoreUntil(f.a, f.b, top, _desugar(f.arg, preds, grid))
    if isinstance(f, UntilPrime):
        return CoreUntil(f.a, f.b, _desugar(f.left, preds, grid), _desugar(f.right, preds, grid))
    if isinstance(f, Until):
        until = CoreUntil(f.a, f.b, _desugar(f.left, preds, grid), _desugar(f.right, preds, grid))
        return CoreAnd((until, CoreAlways(0, f.a, _desugar(f.left, preds, grid))))
    raise TypeError(f"not a surface formula: {f!r}")


def compile_formula(text: str, preds: Mapping[str, Predicate], grid: GridSpec) -> CoreAnd:
    """``parse`` + ``to_nnf`` + ``desugar`` in one call."""
    for p in preds.values():
        p.check_dim(grid.ndim)
    return desugar(to_nnf(parse(text, preds)), preds, grid)


# --------------------------------------------------------------------------
# rendering


def to_text(f) -> str:
    """Render a surface or core formula back to (parseable, for surface) text."""
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Pred):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.arg)
    if isinstance(f, And):
        return " & ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    if isinstance(f, Always):
        return f"G[{f.a},{f.b}] {_wrap(f.arg)}"
    if isinstance(f, Eventually):
        return f"F[{f.a},{f.b}] {_wrap(f.arg)}"
    if isinstance(f, Until):
        return f"{_wrap(f.left)} U[{f.a},{f.b}] {_wrap(f.right)}"
    if isinstance(f, UntilPrime):
        return f"{_wrap(f.left)} U'[{f.a},{f.b}] {_wrap(f.right)}"
    if isinstance(f, Region):
        return "{" + (f.label or f"{len(f.region)} cells") + "}"
    if isinstance(f, CoreAnd):
        return " & ".join(_wrap(c) for c in f.children) if len(f.children) > 1 \
            else f"&({to_text(f.children[0])})"
    if isinstance(f, CoreAlways):
        return f"G[{f.a},{f.b}] {_wrap(f.child)}"
    if isinstance(f, CoreUntil):
        return f"{_wrap(f.left)} U'[{f.a},{f.b}] {_wrap(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f) -> str:
    if isinstance(f, (Top, Pred, Region, Not)):
        return to_text(f)
    return f"({to_text(f)})"
