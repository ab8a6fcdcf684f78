"""Scenario files, offline table builds, trajectory-driven monitoring runs, random suites.

A scenario is one JSON document::

    {
      "name": "thermal",
      "model": {"kind": "thermal1d", "lower": [0], "upper": [45], "step": 0.5,
                "inputs": [[0], [0.25], [0.5], [0.75], [1]], "params": {}},
      "predicates": {"comfort": {"box": [[20, 25]]}},
      "formula": "G[0,10] F[0,5] comfort",
      "horizon": 15,
      "sampling_period": 60,
      "trajectory": {"states": [[22.0], [21.5]]},
      "outputs": {"table": "thermal.table.json", "verdicts": "thermal.verdicts.jsonl",
                  "csv": "thermal.csv", "summary": "thermal.summary.json"}
    }

``trajectory`` may instead be ``{"file": "traj.csv"}`` (one state per row) or
``{"simulate": {"x0": [...], "inputs": [[...], ...], "discrete": true}}``.
Relative paths are resolved against the scenario file's directory.
"""

from __future__ import annotations

import csv
import io
import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DimensionMismatch, HorizonError
from .feasible import FeasibleTable, precompute_all, reachable_basic_sets
from .formula import (Always, And, BoxPredicate, Eventually, LinearPredicate, Not, Or, Pred,
                      Top, Until, UntilPrime, compile_formula, to_text)
from .monitor import MonitorState, run, start
from .system import GridSpec, SystemModel, build_model
from .tree import SyntaxTree, build_tree

DEFAULT_TABLE_CAP = 2_000_000


@dataclass
class Scenario:
    name: str
    model: dict
    predicates: dict
    formula: str
    horizon: int
    sampling_period: float = 1.0
    trajectory: Optional[dict] = None
    outputs: dict = field(default_factory=dict)
    table_cap: int = DEFAULT_TABLE_CAP
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "Scenario":
        missing = [k for k in ("model", "predicates", "formula", "horizon") if k not in doc]
        if missing:
            raise ConfigError(f"scenario is missing {', '.join(missing)}")
        return cls(
            name=doc.get("name", "scenario"),
            model=dict(doc["model"]),
            predicates=dict(doc["predicates"]),
            formula=str(doc["formula"]),
            horizon=int(doc["horizon"]),
            sampling_period=float(doc.get("sampling_period", 1.0)),
            trajectory=doc.get("trajectory"),
            outputs=dict(doc.get("outputs", {})),
            table_cap=int(doc.get("table_cap", DEFAULT_TABLE_CAP)),
            base_dir=Path(base_dir) if base_dir is not None else Path.cwd(),
        )

    @classmethod
    def load(cls, path) -> "Scenario":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        return cls.from_dict(doc, path.parent)

    def path(self, key: str) -> Optional[Path]:
        value = self.outputs.get(key)
        return None if value is None else self.base_dir / value

    def grid(self) -> GridSpec:
        spec = self.model
        if "counts" in spec:
            return GridSpec(spec["lower"], spec["upper"], spec["counts"])
        if "step" not in spec:
            raise ConfigError("model needs a grid 'step' or 'counts'")
        return GridSpec.from_step(spec["lower"], spec["upper"], spec["step"])

    def build_model(self) -> SystemModel:
        spec = self.model
        if "kind" not in spec or "inputs" not in spec:
            raise ConfigError("model needs 'kind' and 'inputs'")
        params = dict(spec.get("params", {}))
        for key in ("A", "B", "tau_s"):
            if key in spec:
                params[key] = spec[key]
        return build_model(spec["kind"], self.grid(), spec["inputs"], **params)

    def build_predicates(self, ndim: int) -> dict:
        preds = {}
        for name, spec in self.predicates.items():
            if "box" in spec:
                p = BoxPredicate.from_bounds(spec["box"])
            elif "linear" in spec:
                lin = spec["linear"]
                p = LinearPredicate(tuple(float(c) for c in lin["c"]), float(lin.get("d", 0.0)))
            else:
                raise ConfigError(f"predicate {name!r} needs 'box' or 'linear'")
            p.check_dim(ndim)
            preds[name] = p
        return preds

    def build(self) -> tuple[SystemModel, SyntaxTree]:
        """Model and syntax tree; validates the horizon against the formula."""
        model = self.build_model()
        preds = self.build_predicates(model.grid.ndim)
        tree = build_tree(compile_formula(self.formula, preds, model.grid))
        if self.horizon < tree.formula_horizon():
            raise ConfigError(f"horizon {self.horizon} is shorter than the formula horizon "
                              f"{tree.formula_horizon()}")
        return model, tree

    def states(self, model: SystemModel) -> np.ndarray:
        """Trajectory states as an array of shape ``(n, ndim)``."""
        src = self.trajectory
        if not src:
            raise ConfigError("scenario has no trajectory")
        ndim = model.grid.ndim
        if "states" in src:
            states = np.asarray(src["states"], dtype=float)
        elif "file" in src:
            states = _read_states(self.base_dir / src["file"])
        elif "simulate" in src:
            states = simulate(model, **src["simulate"])
        else:
            raise ConfigError("trajectory needs 'states', 'file' or 'simulate'")
        states = states.reshape(len(states), -1)
        if states.shape[1] != ndim:
            raise DimensionMismatch(f"trajectory states have dimension {states.shape[1]}, model {ndim}")
        return states


def _read_states(path: Path) -> np.ndarray:
    if path.suffix == ".json":
        return np.asarray(json.loads(path.read_text()), dtype=float)
    rows = [r for r in csv.reader(io.StringIO(path.read_text())) if r and not r[0].startswith("#")]
    try:
        return np.asarray([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError:  # header row
        return np.asarray([[float(v) for v in r] for r in rows[1:]], dtype=float)


def simulate(model: SystemModel, x0, inputs, discrete: bool = True) -> np.ndarray:
    """Roll the model forward from ``x0``.

    With ``discrete`` the abstraction is used (successor = lattice point of
    the transition cell), otherwise the continuous dynamics.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    out = [x]
    for u in inputs:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if discrete:
            j = np.flatnonzero(np.all(np.isclose(model.inputs, u), axis=1))
            if j.size == 0:
                raise ConfigError(f"input {u.tolist()} is not on the input grid")
            nxt = model.transitions[model.grid.cell_of(x), j[0]]
            if nxt < 0:
                raise ConfigError(f"input {u.tolist()} leaves the state space from {x.tolist()}")
            x = model.grid.center(nxt)
        else:
            x = model.step(x, u)
        out.append(x)
    return np.array(out)


# --------------------------------------------------------------------------
# runs


def run_offline(scn: Scenario, table_path=None, summary_path=None) -> tuple[FeasibleTable, dict]:
    """Build model and tree, fill the feasible-set table, write artifact and summary."""
    model, tree = scn.build()
    t0 = time.perf_counter()
    tbl = FeasibleTable(tree, model, scn.horizon)
    levels = reachable_basic_sets(tbl, scn.table_cap)
    precompute_all(tbl, scn.table_cap)
    elapsed = time.perf_counter() - t0
    sizes = [len(s) for s in tbl.memo.values()]
    summary = {
        "scenario": scn.name,
        "formula": scn.formula,
        "core": to_text(tree.formula),
        "horizon": scn.horizon,
        "formula_horizon": tree.formula_horizon(),
        "n_cells": model.n_cells,
        "n_inputs": model.n_inputs,
        "basic_sets_per_step": [len(level) for level in levels],
        "table_entries": len(tbl),
        "cells_per_set": {"min": min(sizes), "max": max(sizes), "mean": float(np.mean(sizes))},
        "initial_feasible_cells": len(tbl.feasible_set(0, levels[0][0])),
        "wall_time_s": round(elapsed, 3),
    }
    table_path = table_path or scn.path("table")
    if table_path is not None:
        Path(table_path).parent.mkdir(parents=True, exist_ok=True)
        tbl.save(table_path)
    summary_path = summary_path or scn.path("summary")
    if summary_path is not None:
        Path(summary_path).parent.mkdir(parents=True, exist_ok=True)
        Path(summary_path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return tbl, summary


def run_monitor(scn: Scenario, table_path=None, verdicts_path=None, csv_path=None,
                use_table: bool = False) -> MonitorState:
    """Stream the scenario trajectory through the monitor and write the logs.

    Feasible sets come from the table artifact when ``table_path`` is given
    (or ``use_table`` and the scenario names one), else they are computed lazily.
    """
    model, tree = scn.build()
    if table_path is None and use_table:
        table_path = scn.path("table")
    if table_path is not None:
        tbl = FeasibleTable.load(table_path, tree, model)
    else:
        tbl = FeasibleTable(tree, model, scn.horizon)
    state = start(tree, model, tbl, scn.horizon)
    states = scn.states(model)
    if len(states) > scn.horizon + 1:
        raise HorizonError(f"trajectory has {len(states)} states, horizon allows {scn.horizon + 1}")
    run(state, states)

    verdicts_path = verdicts_path or scn.path("verdicts")
    if verdicts_path is not None:
        Path(verdicts_path).parent.mkdir(parents=True, exist_ok=True)
        Path(verdicts_path).write_text(verdict_log(state))
    csv_path = csv_path or scn.path("csv")
    if csv_path is not None:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        Path(csv_path).write_text(verdict_csv(state, scn.sampling_period))
    return state


def verdict_log(state: MonitorState) -> str:
    return "".join(r.to_json() + "\n" for r in state.log)


def verdict_csv(state: MonitorState, sampling_period: float = 1.0) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    ndim = state.model.grid.ndim
    w.writerow(["k", "time"] + [f"x{d}" for d in range(ndim)] + ["cell", "verdict", "in_feasible"])
    for r in state.log:
        w.writerow([r.k, repr(r.k * sampling_period)] + [repr(v) for v in r.state]
                   + [r.cell, r.verdict.value, int(r.in_feasible)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# random property suites


def gen_property_suite(seed: int, count: int = 100, depth: int = 3, max_horizon: int = 6,
                       dims=(1, 2)) -> list[dict]:
    """Deterministic batch of small random scenarios for oracle-equivalence checks.

    Formulas have at most ``depth`` nested temporal operators and a formula
    horizon of at most ``max_horizon``; grids have at most 200 cells and at
    most 5 inputs; every cell has an in-domain successor.
    """
    rng = random.Random(seed)
    return [_gen_scenario(rng, f"prop-{seed}-{i}", depth, max_horizon, dims) for i in range(count)]


def _gen_scenario(rng, name, depth, max_horizon, dims) -> dict:
    ndim = rng.choice(list(dims))
    if ndim == 1:
        n = rng.randint(11, 41)
        upper = float(n - 1)
        alpha = rng.choice([0.1, 0.2, 0.3])
        inputs = rng.sample([[0.0], [0.25], [0.5], [0.75], [1.0]], rng.randint(2, 5))
        if [0.0] not in inputs:
            inputs[0] = [0.0]
        model = {"kind": "affine", "lower": [0.0], "upper": [upper], "step": 1.0,
                 "A": [[1.0 - alpha]], "B": [[alpha * upper]], "tau_s": 1.0,
                 "inputs": sorted(inputs)}
    else:
        side = rng.randint(4, 13)
        moves = [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0],
                 [1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]]
        inputs = [moves[0]] + rng.sample(moves[1:], rng.randint(1, 4))
        model = {"kind": "robot2d", "lower": [0.0, 0.0], "upper": [float(side)] * 2,
                 "step": 1.0, "inputs": inputs}
    upper = model["upper"]
    preds = {}
    for i in range(rng.randint(1, 3)):
        if rng.random() < 0.75:
            box = []
            for d in range(ndim):
                lo = rng.uniform(0, upper[d])
                hi = rng.uniform(lo, upper[d])
                box.append([round(lo, 2), round(hi, 2)])
            preds[f"p{i}"] = {"box": box}
        else:
            c = [round(rng.uniform(-1, 1), 2) for _ in range(ndim)]
            d = round(-sum(ci * u / 2 for ci, u in zip(c, upper)), 2)
            preds[f"p{i}"] = {"linear": {"c": c, "d": d}}
    names = sorted(preds)
    f = _gen_temporal(rng, names, depth, max_horizon)
    text = to_text(f)
    horizon = _surface_horizon(f)
    return {"name": name, "model": model, "predicates": preds, "formula": text,
            "horizon": horizon, "seed": rng.randrange(2**31)}


def _gen_boolean(rng, names, depth=2):
    r = rng.random()
    if depth == 0 or r < 0.5:
        return Top() if rng.random() < 0.08 else Pred(rng.choice(names))
    if r < 0.65:
        return Not(_gen_boolean(rng, names, depth - 1))
    cls = And if r < 0.85 else Or
    return cls((_gen_boolean(rng, names, depth - 1), _gen_boolean(rng, names, depth - 1)))


def _gen_temporal(rng, names, depth, budget):
    if depth == 0 or budget == 0:
        return _gen_boolean(rng, names)
    op = rng.choice(["G", "F", "U", "U'", "and"])
    if op == "and":
        return And((_gen_temporal(rng, names, depth - 1, budget),
                    _gen_temporal(rng, names, depth - 1, budget)))
    b = rng.randint(0, min(budget, 4))
    a = rng.randint(0, b)
    sub = budget - b
    if op == "G":
        return Always(a, b, _gen_temporal(rng, names, depth - 1, sub))
    if op == "F":
        return Eventually(a, b, _gen_temporal(rng, names, depth - 1, sub))
    left = _gen_temporal(rng, names, depth - 1, sub)
    right = _gen_temporal(rng, names, depth - 1, sub)
    return (Until if op == "U" else UntilPrime)(a, b, left, right)


def _surface_horizon(f) -> int:
    if isinstance(f, (Always, Eventually)):
        return f.b + _surface_horizon(f.arg)
    if isinstance(f, (Until, UntilPrime)):
        return f.b + max(_surface_horizon(f.left), _surface_horizon(f.right))
    if isinstance(f, And):
        return max(_surface_horizon(a) for a in f.args)
    return 0


def random_trajectory(model: SystemModel, length: int, rng: np.random.Generator,
                      start: Optional[int] = None) -> list[int]:
    """Dynamics-consistent random cell sequence of ``length`` cells."""
    cell = int(rng.integers(model.n_cells)) if start is None else int(start)
    cells = [cell]
    while len(cells) < length:
        succ = model.successors(cells[-1])
        if not succ:
            raise ConfigError(f"cell {cells[-1]} has no in-domain successor")
        cells.append(int(succ[rng.integers(len(succ))]))
    return cells


def prefix_verdict(tree: SyntaxTree, model: SystemModel, table: FeasibleTable, horizon: int,
                   prefix) -> str:
    """Oracle-comparable classification of a prefix from the monitor's verdicts."""
    from .monitor import Verdict

    state = start(tree, model, table, horizon)
    for c in prefix:
        v = state.observe_cell(c)
        if v is Verdict.VIO:
            return "violated"
        if v is Verdict.SAT:
            return "feasible"
    return "feasible"


def check_property_scenario(doc: dict, n_traj: int = 10, n_prefix: int = 0) -> dict:
    """Cross-check vectors and monitor against the oracle on one generated scenario.

    Returns counts of compared entries and mismatches for per-node semantics
    (complete and partial trajectories) and, if ``n_prefix`` > 0, for prefix
    classification.
    """
    from .oracle import PrefixOracle, eval_node
    from .vectors import UNKNOWN, fold, induce

    scn = Scenario.from_dict(doc)
    model, tree = scn.build()
    horizon = scn.horizon
    rng = np.random.default_rng(doc.get("seed", 0))
    out = {"name": scn.name, "entries": 0, "mismatches": 0, "prefixes": 0, "prefix_mismatches": 0}
    for _ in range(n_traj):
        traj = random_trajectory(model, horizon + 1, rng)
        cut = int(rng.integers(0, horizon + 2))
        for prefix_len in (horizon + 1, cut):
            induced = induce(tree, fold(tree, traj[:prefix_len]))
            for node in tree.nodes:
                for t in range(node.horizon.first, node.horizon.last + 1):
                    s = induced.at(node.id, t)
                    if prefix_len == horizon + 1 and s == UNKNOWN:
                        out["mismatches"] += 1
                        continue
                    if s == UNKNOWN:
                        continue
                    out["entries"] += 1
                    if (s == 2) != eval_node(traj, tree, node.id, t):
                        out["mismatches"] += 1
    if n_prefix:
        oracle = PrefixOracle(model, tree, horizon)
        table = FeasibleTable(tree, model, horizon)
        for _ in range(n_prefix):
            k = int(rng.integers(0, horizon + 1))
            prefix = random_trajectory(model, k + 1, rng)
            out["prefixes"] += 1
            if prefix_verdict(tree, model, table, horizon, prefix) != oracle.classify(prefix):
                out["prefix_mismatches"] += 1
    return out
