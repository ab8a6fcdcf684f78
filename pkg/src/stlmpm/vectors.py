"""Three-valued satisfaction vectors: online update, induction to internal nodes, successors.

Statuses are ordered ``VIO < UNKNOWN < SAT`` so that conjunction is ``min``
and existential choice is ``max`` (strong Kleene logic).  Because core
formulas are negation-free, Kleene evaluation is exact: an induced entry is
SAT (VIO) iff every completion of the unknown leaf entries makes it SAT (VIO).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .system import GridSpec, StateSet
from .tree import AND, G, UNTIL, SyntaxTree


class Status(enum.IntEnum):
    VIO = 0
    UNKNOWN = 1
    SAT = 2

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_SYMBOLS = {Status.VIO: "0", Status.UNKNOWN: "?", Status.SAT: "1"}
_FROM_SYMBOL = {"0": Status.VIO, "?": Status.UNKNOWN, "1": Status.SAT}
VIO, UNKNOWN, SAT = Status.VIO, Status.UNKNOWN, Status.SAT


@dataclass(frozen=True)
class BasicSet:
    """Satisfaction vectors of all leaves, valid before observing step ``k``.

    ``entries[i][j]`` is the status of leaf ``i`` at absolute time
    ``first + j`` of the leaf's horizon.  Equality and hashing cover ``k`` and all entries.
    """

    k: int
    entries: tuple[tuple[int, ...], ...]

    def entry(self, tree: SyntaxTree, i: int, t: int) -> Status:
        return Status(self.entries[i][t - tree[i].horizon.first])

    def encode(self) -> str:
        """Canonical text form, e.g. ``k=3:11??|?``."""
        body = "|".join("".join(_SYMBOLS[Status(s)] for s in vec) for vec in self.entries)
        return f"k={self.k}:{body}"

    @classmethod
    def decode(cls, text: str) -> "BasicSet":
        head, _, body = text.partition(":")
        if not head.startswith("k="):
            raise ValueError(f"bad basic-set encoding {text!r}")
        vecs = tuple(tuple(int(_FROM_SYMBOL[c]) for c in part) for part in body.split("|"))
        return cls(int(head[2:]), vecs)

    def __str__(self) -> str:
        return self.encode()


def init_basic(tree: SyntaxTree) -> BasicSet:
    """All-unknown basic set for ``k = 0``."""
    return BasicSet(0, tuple((int(UNKNOWN),) * n.horizon.length for n in tree.leaves))


def update(basic: BasicSet, x, k: int, tree: SyntaxTree, grid: Optional[GridSpec] = None) -> BasicSet:
    """Resolve the step-``k`` entry of every active leaf from the observation.

    ``x`` is a cell index, or a state when ``grid`` is given (snapped to its
    cell; raises :class:`~stlmpm.errors.OutOfDomain` outside the bounds).
    """
    if basic.k != k:
        raise ValueError(f"basic set is for step {basic.k}, not {k}")
    cell = grid.cell_of(x) if grid is not None else int(x)
    vecs = []
    for leaf, vec in zip(tree.leaves, basic.entries):
        if k in leaf.horizon:
            vec = list(vec)
            vec[k - leaf.horizon.first] = int(SAT if cell in leaf.region else VIO)
            vec = tuple(vec)
        vecs.append(vec)
    return BasicSet(k + 1, tuple(vecs))


class InducedSet:
    """Satisfaction vectors of every node (leaves included) induced from a basic set."""

    def __init__(self, tree: SyntaxTree, vectors: list[tuple[int, ...]]):
        self.tree = tree
        self.vectors = vectors

    def at(self, v: int, t: int) -> Status:
        return Status(self.vectors[v][t - self.tree[v].horizon.first])

    def vector(self, v: int) -> tuple[Status, ...]:
        return tuple(Status(s) for s in self.vectors[v])

    @property
    def root(self) -> Status:
        return self.at(self.tree.root, self.tree[self.tree.root].horizon.first)


def induce(tree: SyntaxTree, basic: BasicSet) -> InducedSet:
    """Bottom-up Kleene evaluation of all internal nodes."""
    vecs: list = list(basic.entries) + [None] * (len(tree) - tree.n_leaves)
    for node in reversed(tree.internal):
        first, last = node.horizon
        n = last - first + 1
        if node.kind == AND:
            out = tuple(min(col) for col in zip(*(vecs[c] for c in node.children)))
        elif node.kind == G:
            child = vecs[node.children[0]]
            # child index of absolute time t + a is (t - first)
            w = node.b - node.a + 1
            out = tuple(min(child[j:j + w]) for j in range(n))
        elif node.kind == UNTIL:
            left, right = vecs[node.children[0]], vecs[node.children[1]]
            w = node.b - node.a + 1
            out = []
            for j in range(n):
                best, run = VIO, SAT
                for d in range(w):
                    run = min(run, left[j + d])
                    best = max(best, min(run, right[j + d]))
                    if best == SAT or run == VIO:
                        break
                out.append(int(best))
            out = tuple(out)
        else:
            raise ValueError(f"unexpected node kind {node.kind}")
        vecs[node.id] = out
    return InducedSet(tree, vecs)


def root_status(tree: SyntaxTree, basic: BasicSet) -> Status:
    return induce(tree, basic).root


def active_leaves(tree: SyntaxTree, k: int) -> list[int]:
    """Leaves whose horizon contains step ``k``."""
    return [leaf.id for leaf in tree.leaves if k in leaf.horizon]


def candidate_successors(tree: SyntaxTree, basic: BasicSet, k: int) -> list[BasicSet]:
    """All SAT/VIO assignments to the step-``k`` entries of active leaves.

    Ordered lexicographically by leaf index with SAT before VIO.
    """
    if basic.k != k:
        raise ValueError(f"basic set is for step {basic.k}, not {k}")
    active = active_leaves(tree, k)
    out = []
    for pattern in itertools.product((int(SAT), int(VIO)), repeat=len(active)):
        vecs = list(basic.entries)
        for i, s in zip(active, pattern):
            vec = list(vecs[i])
            vec[k - tree[i].horizon.first] = s
            vecs[i] = tuple(vec)
        out.append(BasicSet(k + 1, tuple(vecs)))
    return out


def successors(tree: SyntaxTree, basic: BasicSet, k: int) -> list[BasicSet]:
    """Candidate successors whose induced root is not VIO."""
    return [nb for nb in candidate_successors(tree, basic, k) if root_status(tree, nb) != VIO]


def consistent_region(tree: SyntaxTree, basic: BasicSet, next_basic: BasicSet, k: int,
                      regions: Optional[Sequence[StateSet]] = None) -> StateSet:
    """Cells whose observation at step ``k`` turns ``basic`` into ``next_basic``."""
    if regions is None:
        regions = [leaf.region for leaf in tree.leaves]
    out = StateSet.full(regions[0].n_cells)
    for leaf, region in zip(tree.leaves, regions):
        if k not in leaf.horizon:
            continue
        s = next_basic.entry(tree, leaf.id, k)
        if s == SAT:
            out = out & region
        elif s == VIO:
            out = out - region
        else:
            raise ValueError(f"successor leaves step {k} of leaf {leaf.id} unknown")
    return out


def fold(tree: SyntaxTree, cells: Sequence[int], basic: Optional[BasicSet] = None) -> BasicSet:
    """Apply :func:`update` along a cell sequence starting from ``basic`` (default: all unknown)."""
    basic = init_basic(tree) if basic is None else basic
    for c in cells:
        basic = update(basic, c, basic.k, tree)
    return basic
