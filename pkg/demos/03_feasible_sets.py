# Feasible sets on a small thermal model
#
# A state is feasible for a prefix class when some admissible input sequence
# can still steer the system to satisfy the formula.  The table below is
# filled backward from the end of the horizon and reused at run time.

import time

import numpy as np

from stlmpm import (BoxPredicate, FeasibleTable, GridSpec, build_model, build_tree,
                    compile_formula, init_basic, one_step_feasible, precompute_all)
from stlmpm.oracle import PrefixOracle

grid = GridSpec.from_step([0.0], [45.0], 0.5)
model = build_model("thermal1d", grid, [[0.0], [0.25], [0.5], [0.75], [1.0]])
comfort = {"comfort": BoxPredicate.from_bounds([[20, 25]])}
tree = build_tree(compile_formula("G[0,4] F[0,2] comfort", comfort, grid))
horizon = 8

# %% One-step predecessors of the comfort band: where can the room be so that
# some heater setting brings it into [20, 25] next step?
band = tree.leaves[1].region
pre = one_step_feasible(model, band)
xs = grid.centers[pre.cells(), 0]
print(f"comfort band has {len(band)} cells; one step earlier: [{xs.min()}, {xs.max()}]")

# %% Eager table.
t0 = time.perf_counter()
table = precompute_all(FeasibleTable(tree, model, horizon))
print(f"{len(table)} table entries in {time.perf_counter() - t0:.2f}s")
start_set = table.feasible_set(0, init_basic(tree))
xs = grid.centers[start_set.cells(), 0]
print(f"feasible starting temperatures: {xs.min()} .. {xs.max()} ({len(start_set)} cells)")

# %% Cross-check against brute force over input sequences.
oracle = PrefixOracle(model, tree, horizon)
agree = np.array_equal(start_set.mask, oracle.feasible_cells([]))
print("exhaustive search agrees:", agree)
