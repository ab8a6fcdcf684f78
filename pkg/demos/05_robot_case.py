# Planar robot: visit one box, then dwell in another
#
# A robot on a 12 x 12 field (grid spacing 0.5) moves at most one unit per
# axis per step.  It has to enter A1 = [3,5]^2 within six steps and, also within
# six steps, reach A2 = [6,8]^2 and stay there for two more steps.

from pathlib import Path

import numpy as np

from stlmpm import FeasibleTable, init_basic
from stlmpm.scenario import Scenario, run_monitor

here = Path(__file__).resolve().parent.parent / "scenarios"
scn = Scenario.load(here / "robot_patrol.json")
model, tree = scn.build()
table = FeasibleTable(tree, model, scn.horizon)
start_set = table.feasible_set(0, init_basic(tree))

# %% Starting positions that can still meet the requirement (coarse map).
g = model.grid
mask = start_set.mask.reshape(g.counts)
print("feasible start positions (every other lattice point, y up):")
for iy in range(g.counts[1] - 1, -1, -2):
    print("  " + "".join("#" if mask[ix, iy] else "." for ix in range(0, g.counts[0], 2)))

# %% Three runs.
for name in ["robot_patrol", "robot_far_corner", "robot_divergence"]:
    state = run_monitor(Scenario.load(here / f"{name}.json"),
                        verdicts_path="/dev/null", csv_path="/dev/null")
    path = " ".join(f"({r.state[0]:g},{r.state[1]:g})" for r in state.log)
    print(f"\n{name}\n  path     {path}\n  verdicts {' '.join(v.value for v in state.verdicts)}")
