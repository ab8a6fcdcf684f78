"""Syntax trees of core formulas and per-node evaluation horizons."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import CoreAlways, CoreAnd, CoreUntil, Region, to_text
from .system import StateSet

LEAF, AND, G, UNTIL = "Leaf", "And", "G", "U'"


@dataclass(frozen=True)
class Horizon:
    first: int
    last: int

    def __iter__(self):
        return iter((self.first, self.last))

    def __contains__(self, t) -> bool:
        return self.first <= t <= self.last

    @property
    def length(self) -> int:
        return self.last - self.first + 1


@dataclass(frozen=True)
class Node:
    """One operator or leaf.  For ``U'`` nodes ``children`` is ``(left, right)``."""

    id: int
    kind: str
    a: int
    b: int
    children: tuple[int, ...]
    parent: Optional[int]
    horizon: Horizon
    formula: object
    region: Optional[StateSet] = None
    label: str = ""

    @property
    def is_leaf(self) -> bool:
        return self.kind == LEAF


class SyntaxTree:
    """Rooted tree of a core formula.

    Leaves occupy ids ``0..n_leaves-1`` in source order; internal
    nodes follow in pre-order, so the root is node ``h`` and every internal
    node has a larger id than its parent.
    """

    def __init__(self, nodes: list[Node], root: int):
        self.nodes = nodes
        self.root = root
        self.n_leaves = sum(1 for n in nodes if n.is_leaf)
        self.formula = nodes[root].formula

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, v: int) -> Node:
        return self.nodes[v]

    @property
    def leaves(self) -> list[Node]:
        return self.nodes[: self.n_leaves]

    @property
    def internal(self) -> list[Node]:
        return self.nodes[self.n_leaves:]

    def horizon(self, v: int) -> Horizon:
        return self.nodes[v].horizon

    def formula_horizon(self) -> int:
        """Last time step any leaf must be observed at."""
        return max(n.horizon.last for n in self.leaves)

    def subformula(self, v: int):
        return self.nodes[v].formula

    def ancestors(self, v: int) -> list[int]:
        out = []
        p = self.nodes[v].parent
        while p is not None:
            out.append(p)
            p = self.nodes[p].parent
        return out

    def dump(self) -> str:
        """Deterministic indented rendering with per-node horizons."""
        lines = []

        def walk(v, depth, tag):
            n = self.nodes[v]
            if n.kind == LEAF:
                head = f"Leaf {{{n.label or f'{len(n.region)} cells'}}}"
            elif n.kind == AND:
                head = "And"
            else:
                head = f"{n.kind}[{n.a},{n.b}]"
            lines.append(f"{'  ' * depth}{tag}v{n.id} {head} "
                         f"horizon=[{n.horizon.first},{n.horizon.last}]")
            if n.kind == UNTIL:
                walk(n.children[0], depth + 1, "l: ")
                walk(n.children[1], depth + 1, "r: ")
            else:
                for c in n.children:
                    walk(c, depth + 1, "")

        walk(self.root, 0, "")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"SyntaxTree({to_text(self.formula)}, {len(self)} nodes, {self.n_leaves} leaves)"


def build_tree(f) -> SyntaxTree:
    """Build the syntax tree of a core formula, computing every node's horizon."""
    if isinstance(f, Region):
        f = CoreAnd((f,))

    # First pass: pre-order walk collecting (formula, parent slot, horizon).
    records = []  # (formula, parent_record, horizon)

    def walk(g, parent, first, last):
        idx = len(records)
        records.append([g, parent, Horizon(first, last)])
        if isinstance(g, Region):
            return
        if isinstance(g, CoreAnd):
            if not g.children:
                raise ValueError("conjunction needs at least one child")
            for c in g.children:
                walk(c, idx, first, last)
        elif isinstance(g, CoreAlways):
            _check_interval(g.a, g.b)
            walk(g.child, idx, first + g.a, last + g.b)
        elif isinstance(g, CoreUntil):
            _check_interval(g.a, g.b)
            walk(g.left, idx, first + g.a, last + g.b)
            walk(g.right, idx, first + g.a, last + g.b)
        else:
            raise TypeError(f"not a core formula: {g!r}")

    walk(f, None, 0, 0)

    leaf_ids = [i for i, r in enumerate(records) if isinstance(r[0], Region)]
    inner_ids = [i for i, r in enumerate(records) if not isinstance(r[0], Region)]
    new_id = {old: new for new, old in enumerate(leaf_ids + inner_ids)}
    children: dict[int, list[int]] = {i: [] for i in range(len(records))}
    for i, (_, parent, _) in enumerate(records):
        if parent is not None:
            children[new_id[parent]].append(new_id[i])

    nodes = [None] * len(records)
    for old, (g, parent, hz) in enumerate(records):
        v = new_id[old]
        p = None if parent is None else new_id[parent]
        if isinstance(g, Region):
            nodes[v] = Node(v, LEAF, 0, 0, (), p, hz, g, g.region, g.label)
        elif isinstance(g, CoreAnd):
            nodes[v] = Node(v, AND, 0, 0, tuple(children[v]), p, hz, g)
        elif isinstance(g, CoreAlways):
            nodes[v] = Node(v, G, g.a, g.b, tuple(children[v]), p, hz, g)
        else:
            nodes[v] = Node(v, UNTIL, g.a, g.b, tuple(children[v]), p, hz, g)
    return SyntaxTree(nodes, new_id[0])


def _check_interval(a, b):
    if not (0 <= a <= b):
        raise ValueError(f"invalid interval [{a},{b}]")


def horizon(t: SyntaxTree, v: int) -> Horizon:
    return t.horizon(v)


def formula_horizon(t: SyntaxTree) -> int:
    return t.formula_horizon()
