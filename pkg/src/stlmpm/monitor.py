"""Online model-predictive monitor.

Each observation is first checked against the feasible set of the current
step and basic set; a miss is a violation verdict.  Otherwise the basic set
absorbs the observation and the monitor reports ``feas``, or ``sat`` once the
prefix alone satisfies the formula.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AlreadyConcluded, HorizonError
from .feasible import FeasibleTable
from .system import SystemModel
from .tree import SyntaxTree
from .vectors import SAT, BasicSet, Status, init_basic, root_status, update


class Verdict(str, enum.Enum):
    FEAS = "feas"
    VIO = "vio"
    SAT = "sat"

    @property
    def terminal(self) -> bool:
        return self is not Verdict.FEAS


class RunStatus(str, enum.Enum):
    RUNNING = "running"
    CONCLUDED_VIO = "concluded_vio"
    CONCLUDED_SAT = "concluded_sat"


@dataclass
class Record:
    k: int
    state: tuple[float, ...]
    cell: int
    verdict: Verdict
    in_feasible: bool
    root: Status
    basic: str

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k,
            "state": list(self.state),
            "cell": self.cell,
            "verdict": self.verdict.value,
            "in_feasible": self.in_feasible,
            "root": self.root.symbol,
            "basic": self.basic,
        }, sort_keys=True)


@dataclass
class MonitorState:
    tree: SyntaxTree
    model: SystemModel
    table: FeasibleTable
    horizon: int
    k: int = 0
    basic: Optional[BasicSet] = None
    status: RunStatus = RunStatus.RUNNING
    log: list[Record] = field(default_factory=list)

    @property
    def verdicts(self) -> list[Verdict]:
        return [r.verdict for r in self.log]

    @property
    def running(self) -> bool:
        return self.status is RunStatus.RUNNING

    def observe(self, x) -> Verdict:
        return observe(self, x)

    def observe_cell(self, cell: int) -> Verdict:
        return observe(self, self.model.grid.center(cell))

    def feasible_set(self):
        """Feasible set for the current step and basic set (only meaningful while running)."""
        return self.table.feasible_set(self.k, self.basic)


def start(tree: SyntaxTree, model: SystemModel, table: Optional[FeasibleTable] = None,
          horizon: Optional[int] = None) -> MonitorState:
    """Fresh monitor at ``k = 0`` with the all-unknown basic set.

    Without a ``table`` a lazily-filled one is created for ``horizon``.
    """
    if table is None:
        if horizon is None:
            raise HorizonError("need a horizon or a feasible-set table")
        table = FeasibleTable(tree, model, horizon)
    if horizon is None:
        horizon = table.horizon
    if horizon < tree.formula_horizon():
        raise HorizonError(f"horizon {horizon} is shorter than the formula horizon {tree.formula_horizon()}")
    if table.horizon != horizon or table.tree is not tree or table.model is not model:
        raise HorizonError("feasible-set table does not belong to this monitor setup")
    return MonitorState(tree, model, table, horizon, 0, init_basic(tree))


def observe(s: MonitorState, x) -> Verdict:
    if not s.running:
        raise AlreadyConcluded(f"monitor already concluded with {s.status.value}")
    if s.k > s.horizon:
        raise HorizonError(f"observation at step {s.k} beyond horizon {s.horizon}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cell = s.model.grid.cell_of(x)
    feasible = s.table.feasible_set(s.k, s.basic)
    k = s.k
    if cell not in feasible:
        s.status = RunStatus.CONCLUDED_VIO
        verdict = Verdict.VIO
        root = root_status(s.tree, s.basic)
    else:
        s.basic = update(s.basic, cell, k, s.tree)
        s.k = k + 1
        root = root_status(s.tree, s.basic)
        if root == SAT:
            s.status = RunStatus.CONCLUDED_SAT
            verdict = Verdict.SAT
        else:
            verdict = Verdict.FEAS
    s.log.append(Record(k, tuple(float(v) for v in x), cell, verdict, cell in feasible,
                        root, s.basic.encode()))
    return verdict


def run(s: MonitorState, states) -> list[Verdict]:
    """Feed states until the trajectory ends or a terminal verdict is issued."""
    out = []
    for x in states:
        out.append(observe(s, x))
        if not s.running:
            break
    return out
