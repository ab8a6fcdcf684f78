"""Reference semantics used to validate the monitor.

Nothing here touches satisfaction vectors or feasible sets: formulas are
evaluated directly on cell trajectories, and prefixes are classified by
exhaustive search over input sequences.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ResourceLimit, TrajectoryTooShort, UnknownPredicate
from .formula import (Always, And, CoreAlways, CoreAnd, CoreUntil, Eventually, Implies, Not,
                      Or, Pred, Region, Top, Until, UntilPrime)
from .system import GridSpec, SystemModel
from .tree import AND, G, LEAF, UNTIL, SyntaxTree

VIOLATED = "violated"
FEASIBLE = "feasible"


def _at(traj, t):
    if t < 0 or t >= len(traj):
        raise TrajectoryTooShort(f"trajectory of length {len(traj)} has no step {t}")
    return traj[t]


def eval_stl(traj: Sequence[int], f, t: int = 0, preds: Optional[Mapping] = None,
             grid: Optional[GridSpec] = None) -> bool:
    """Boolean satisfaction of ``f`` by the cell trajectory ``traj`` at step ``t``.

    Works on core formulas and on surface formulas; surface predicates are
    evaluated on the cell's lattice point, which requires ``preds`` (for named
    predicates) and ``grid``.
    """
    def ev(g, t):
        if isinstance(g, Region):
            return _at(traj, t) in g.region
        if isinstance(g, CoreAnd):
            return all(ev(c, t) for c in g.children)
        if isinstance(g, CoreAlways):
            return all(ev(g.child, s) for s in range(t + g.a, t + g.b + 1))
        if isinstance(g, (CoreUntil, UntilPrime)):
            return _until(g, t, t + g.a)
        if isinstance(g, Until):
            return _until(g, t, t)
        if isinstance(g, Top):
            return True
        if isinstance(g, Pred):
            p = g.predicate
            if p is None:
                if preds is None or g.name not in preds:
                    raise UnknownPredicate(f"undeclared predicate {g.name!r}")
                p = preds[g.name]
            return bool(p.holds(grid.center(_at(traj, t)))[0])
        if isinstance(g, Not):
            return not ev(g.arg, t)
        if isinstance(g, And):
            return all(ev(a, t) for a in g.args)
        if isinstance(g, Or):
            return any(ev(a, t) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(g.left, t)) or ev(g.right, t)
        if isinstance(g, Always):
            return all(ev(g.arg, s) for s in range(t + g.a, t + g.b + 1))
        if isinstance(g, Eventually):
            return any(ev(g.arg, s) for s in range(t + g.a, t + g.b + 1))
        raise TypeError(f"not a formula: {g!r}")

    def _until(g, t, left_from):
        for s in range(t + g.a, t + g.b + 1):
            if ev(g.right, s) and all(ev(g.left, r) for r in range(left_from, s + 1)):
                return True
        return False

    return ev(f, t)


def eval_node(traj: Sequence[int], tree: SyntaxTree, v: int, t: int) -> bool:
    """Satisfaction of the subformula rooted at node ``v``."""
    return eval_stl(traj, tree.subformula(v), t)


def node_truth(tree: SyntaxTree, leaf_values: Sequence[Sequence[bool]], v: int, t: int) -> bool:
    """Two-valued truth of node ``v`` at ``t`` given fully determined leaf vectors.

    ``leaf_values[i][j]`` is the truth of leaf ``i`` at ``first + j`` of the leaf's horizon.  Leaves
    are treated as independent variables, not as regions.
    """
    node = tree[v]
    if node.kind == LEAF:
        return bool(leaf_values[v][t - node.horizon.first])
    if node.kind == AND:
        return all(node_truth(tree, leaf_values, c, t) for c in node.children)
    if node.kind == G:
        c = node.children[0]
        return all(node_truth(tree, leaf_values, c, s) for s in range(t + node.a, t + node.b + 1))
    if node.kind == UNTIL:
        left, right = node.children
        return any(node_truth(tree, leaf_values, right, s)
                   and all(node_truth(tree, leaf_values, left, r) for r in range(t + node.a, s + 1))
                   for s in range(t + node.a, t + node.b + 1))
    raise ValueError(node.kind)


def eval_partial(prefix: Sequence[int], f, t: int = 0) -> Optional[bool]:
    """Three-valued satisfaction of a core formula by a trajectory prefix.

    Steps beyond the prefix are unknown; returns True/False when every
    extension agrees, else None.
    """
    def ev(g, t):
        if isinstance(g, Region):
            if t < len(prefix):
                return prefix[t] in g.region
            return False if g.region.is_empty() else True if g.region.is_full() else None
        if isinstance(g, CoreAnd):
            return _all(ev(c, t) for c in g.children)
        if isinstance(g, CoreAlways):
            return _all(ev(g.child, s) for s in range(t + g.a, t + g.b + 1))
        if isinstance(g, CoreUntil):
            return _any(_all([ev(g.right, s)] + [ev(g.left, r) for r in range(t + g.a, s + 1)])
                        for s in range(t + g.a, t + g.b + 1))
        raise TypeError(f"not a core formula: {g!r}")

    return ev(f, t)


def _all(values) -> Optional[bool]:
    unknown = False
    for v in values:
        if v is False:
            return False
        unknown |= v is None
    return None if unknown else True


def _any(values) -> Optional[bool]:
    unknown = False
    for v in values:
        if v is True:
            return True
        unknown |= v is None
    return None if unknown else False


def _region_leaves(f) -> list:
    if isinstance(f, Region):
        return [f.region]
    if isinstance(f, CoreAnd):
        return [r for c in f.children for r in _region_leaves(c)]
    if isinstance(f, CoreAlways):
        return _region_leaves(f.child)
    if isinstance(f, CoreUntil):
        return _region_leaves(f.left) + _region_leaves(f.right)
    raise TypeError(f"not a core formula: {f!r}")


class PrefixOracle:
    """Exhaustive classifier of prefixes as violated or feasible.

    A prefix ``x_0..x_k`` is feasible iff some input sequence drives the
    model from ``x_k`` to a complete trajectory ``x_0..x_T`` that satisfies
    the formula.  Searches are memoized on ``(step, cell, leaf-membership
    pattern of the earlier cells)``: the formula only sees cells through
    their membership in leaf regions, so equal patterns are interchangeable.
    With ``prune`` a branch stops as soon as :func:`eval_partial` settles the
    formula on the path so far.
    """

    def __init__(self, model: SystemModel, formula, horizon: int, budget: int = 10**7,
                 prune: bool = True):
        if isinstance(formula, SyntaxTree):
            formula = formula.formula
        self.model = model
        self.formula = formula
        self.horizon = horizon
        self.budget = budget
        self.expansions = 0
        regions = _region_leaves(formula)
        codes = np.zeros(model.n_cells, dtype=np.int64)
        for i, r in enumerate(regions):
            codes |= r.mask.astype(np.int64) << i
        self._codes = codes.tolist()
        self._succ = [model.successors(c) for c in range(model.n_cells)]
        self._memo: dict = {}
        self._reach: dict = {}
        self.prune = prune

    def _search(self, path: list[int], cell: int) -> bool:
        k = len(path)
        if k == self.horizon:
            return eval_stl(path + [cell], self.formula, 0)
        key = (k, cell, tuple(self._codes[c] for c in path))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        path = path + [cell]
        settled = eval_partial(path, self.formula) if self.prune else None
        if settled is False:
            result = False
        elif settled is True:
            result = self._extendable(k, cell)
        else:
            result = any(self._expand(k, cell, lambda nxt: self._search(path, nxt)))
        self._memo[key] = result
        return result

    def _expand(self, k, cell, fn):
        for nxt in self._succ[cell]:
            self.expansions += 1
            if self.expansions > self.budget:
                raise ResourceLimit(f"exhaustive search exceeded {self.budget} expansions")
            yield fn(nxt)

    def _extendable(self, k: int, cell: int) -> bool:
        """Whether some input sequence keeps the trajectory in the box up to ``horizon``."""
        if k == self.horizon:
            return True
        key = (k, cell)
        hit = self._reach.get(key)
        if hit is None:
            hit = any(self._expand(k, cell, lambda nxt: self._extendable(k + 1, nxt)))
            self._reach[key] = hit
        return hit

    def classify(self, prefix: Sequence[int], check_dynamics: bool = True) -> str:
        prefix = [int(c) for c in prefix]
        if not 1 <= len(prefix) <= self.horizon + 1:
            raise ValueError(f"prefix length {len(prefix)} outside [1, {self.horizon + 1}]")
        if check_dynamics:
            for a, b in zip(prefix, prefix[1:]):
                if b not in self._succ[a]:
                    raise ValueError(f"prefix step {a} -> {b} is not a model transition")
        return FEASIBLE if self._search(prefix[:-1], prefix[-1]) else VIOLATED

    def feasible_cells(self, prefix: Sequence[int]) -> np.ndarray:
        """Mask of cells ``c`` such that ``prefix + [c]`` is feasible (no dynamics check on the joint)."""
        prefix = [int(c) for c in prefix]
        return np.array([self._search(prefix, c) for c in range(self.model.n_cells)], dtype=bool)


def classify_prefix(model: SystemModel, prefix: Sequence[int], formula, horizon: int,
                    budget: int = 10**7) -> str:
    return PrefixOracle(model, formula, horizon, budget).classify(prefix)
