"""Feasible sets by backward recursion over successor basic sets.

The feasible set at ``(k, basic)`` is the union, over every successor basic
set, of the successor's consistent region intersected with the one-step
predecessors of the successor's feasible set at ``k + 1``.  Past the horizon,
or once the root is satisfied, the feasible set is the whole grid.
:class:`FeasibleTable` evaluates this lazily with memoization and
:func:`precompute_all` fills the memo for every successor-reachable basic set.
"""

from __future__ import annotations

import hashlib
import json
import threading
from collections import Counter
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, HorizonError, ResourceLimit
from .system import StateSet, SystemModel, one_step_feasible
from .tree import SyntaxTree
from .vectors import SAT, VIO, BasicSet, active_leaves, init_basic, root_status

TABLE_FORMAT = "stlmpm-feasible-table"


def tree_digest(tree: SyntaxTree) -> str:
    h = hashlib.sha256(tree.dump().encode())
    for leaf in tree.leaves:
        h.update(leaf.region.to_hex().encode())
    return h.hexdigest()


class FeasibleTable:
    """Memo ``(k, BasicSet) -> StateSet`` for a single monitoring setup."""

    def __init__(self, tree: SyntaxTree, model: SystemModel, horizon: int):
        if horizon < tree.formula_horizon():
            raise HorizonError(f"horizon {horizon} is shorter than the formula horizon "
                               f"{tree.formula_horizon()}")
        self.tree = tree
        self.model = model
        self.horizon = horizon
        self.memo: dict[tuple[int, BasicSet], StateSet] = {}
        self.stats = Counter()
        self._full = model.full()
        self._regions = [leaf.region for leaf in tree.leaves]
        self._children: dict[tuple[int, BasicSet], list] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.memo)

    def __contains__(self, key) -> bool:
        return key in self.memo

    def children(self, k: int, basic: BasicSet) -> list[tuple[BasicSet, StateSet]]:
        """Non-violating successors of ``basic`` at ``k`` paired with non-empty consistent regions.

        Only successors realized by some cell are built: cells are grouped by
        their membership in the active leaves' regions, one group per
        successor.  Successors with an empty consistent region could never be
        triggered and would contribute nothing to the union.
        """
        key = (k, basic)
        out = self._children.get(key)
        if out is not None:
            return out
        active = active_leaves(self.tree, k)
        if basic.k != k:
            raise ValueError(f"basic set is for step {basic.k}, not {k}")
        if active:
            member = np.stack([self._regions[i].mask for i in active], axis=1)
            patterns, groups = np.unique(member, axis=0, return_inverse=True)
            groups = groups.reshape(-1)
        else:
            patterns, groups = np.ones((1, 0), dtype=bool), np.zeros(self.model.n_cells, dtype=int)
        # SAT before VIO, leaf by leaf, matching candidate_successors
        order = sorted(range(len(patterns)), key=lambda j: tuple(~patterns[j]))
        out = []
        for j in order:
            vecs = list(basic.entries)
            for i, inside in zip(active, patterns[j]):
                vec = list(vecs[i])
                vec[k - self.tree[i].horizon.first] = int(SAT if inside else VIO)
                vecs[i] = tuple(vec)
            nb = BasicSet(k + 1, tuple(vecs))
            if root_status(self.tree, nb) != VIO:
                out.append((nb, StateSet(groups == j)))
        self._children[key] = out
        return out

    def _terminal(self, k: int, basic: BasicSet) -> Optional[StateSet]:
        status = root_status(self.tree, basic)
        if status == VIO:
            raise ValueError(f"basic set {basic} at step {k} already violates the formula")
        if status == SAT or k == self.horizon + 1:
            return self._full
        return None

    def _check(self, k: int, basic: BasicSet):
        if k > self.horizon + 1 or k < 0:
            raise HorizonError(f"step {k} outside [0, {self.horizon + 1}]")
        if basic.k != k:
            raise ValueError(f"basic set is for step {basic.k}, not {k}")

    def _store(self, key, value: StateSet) -> StateSet:
        with self._lock:
            stored = self.memo.setdefault(key, value)
        if stored is value:
            self.stats["computed"] += 1
        return stored

    def feasible_set(self, k: int, basic: BasicSet) -> StateSet:
        """Return ``X^I_k``, computing and memoizing missing entries iteratively."""
        self._check(k, basic)
        key = (k, basic)
        hit = self.memo.get(key)
        if hit is not None:
            self.stats["hits"] += 1
            return hit
        stack = [key]
        while stack:
            cur = stack[-1]
            if cur in self.memo:
                stack.pop()
                continue
            ck, cur_basic = cur
            term = self._terminal(ck, cur_basic)
            if term is not None:
                self._store(cur, term)
                stack.pop()
                continue
            kids = self.children(ck, cur_basic)
            missing = [(ck + 1, nb) for nb, _ in kids if (ck + 1, nb) not in self.memo]
            if missing:
                stack.extend(missing)
                continue
            out = self.model.empty()
            for nb, region in kids:
                out = out | (region & one_step_feasible(self.model, self.memo[(ck + 1, nb)]))
            self._store(cur, out)
            stack.pop()
        return self.memo[key]

    # -- artifact -----------------------------------------------------------

    def header(self) -> dict:
        return {
            "format": TABLE_FORMAT,
            "version": 1,
            "formula_digest": tree_digest(self.tree),
            "model_digest": self.model.digest(),
            "grid": self.model.grid.to_dict(),
            "horizon": self.horizon,
            "n_cells": self.model.n_cells,
        }

    def to_json(self) -> str:
        entries = sorted(((k, basic.encode(), s.to_hex()) for (k, basic), s in self.memo.items()))
        doc = dict(self.header())
        doc["entries"] = [{"basic": enc, "cells": bits} for _, enc, bits in entries]
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str, tree: SyntaxTree, model: SystemModel) -> "FeasibleTable":
        doc = json.loads(text)
        if doc.get("format") != TABLE_FORMAT:
            raise ConfigError("not a feasible-set table artifact")
        tbl = cls(tree, model, int(doc["horizon"]))
        expected = tbl.header()
        for field in ("formula_digest", "model_digest", "n_cells"):
            if doc.get(field) != expected[field]:
                raise ConfigError(f"table artifact {field} does not match the scenario")
        n = model.n_cells
        for e in doc["entries"]:
            basic = BasicSet.decode(e["basic"])
            tbl.memo[(basic.k, basic)] = StateSet.from_hex(e["cells"], n)
        return tbl

    @classmethod
    def load(cls, path, tree: SyntaxTree, model: SystemModel) -> "FeasibleTable":
        return cls.from_json(Path(path).read_text(), tree, model)


def feasible_set(tbl: FeasibleTable, k: int, basic: BasicSet) -> StateSet:
    return tbl.feasible_set(k, basic)


def reachable_basic_sets(tbl: FeasibleTable, cap: Optional[int] = None) -> list[list[BasicSet]]:
    """Basic sets reachable from the initial one by triggerable successor chains.

    Returns one list per step ``0..horizon+1``; chains stop at basic sets
    whose root is already satisfied.
    """
    tree = tbl.tree
    levels = [[init_basic(tree)]]
    total = 1
    for k in range(tbl.horizon + 1):
        nxt, seen = [], set()
        for basic in levels[k]:
            if root_status(tree, basic) == SAT:
                continue
            for next_basic, _ in tbl.children(k, basic):
                if next_basic not in seen:
                    seen.add(next_basic)
                    nxt.append(next_basic)
        total += len(nxt)
        if cap is not None and total > cap:
            raise ResourceLimit(f"more than {cap} reachable basic sets (reached step {k + 1})")
        levels.append(nxt)
    return levels


def precompute_all(tbl: FeasibleTable, cap: Optional[int] = None) -> FeasibleTable:
    """Eagerly fill ``tbl`` for every reachable ``(k, basic)``, sweeping backward from ``horizon+1``."""
    levels = reachable_basic_sets(tbl, cap)
    for k in range(len(levels) - 1, -1, -1):
        for basic in levels[k]:
            tbl.feasible_set(k, basic)
    return tbl
