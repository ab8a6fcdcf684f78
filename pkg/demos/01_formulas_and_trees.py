# Formulas, the core fragment, and syntax trees
#
# Run with:  python demos/01_formulas_and_trees.py

import numpy as np

from stlmpm import BoxPredicate, GridSpec, build_tree, compile_formula, parse, to_nnf, to_text

# %% A one-dimensional lattice from 0 to 10 with unit spacing: 11 cells.
grid = GridSpec.from_step([0.0], [10.0], 1.0)
preds = {
    "low": BoxPredicate.from_bounds([[0, 3]]),
    "mid": BoxPredicate.from_bounds([[4, 6]]),
    "high": BoxPredicate.from_bounds([[7, 10]]),
}

# %% The parser accepts G, F, U and U' with integer windows, plus boolean glue.
surface = parse("!(low & high) -> F[0,3] mid U[1,2] high")
print("parsed:   ", to_text(surface))

# Negation is pushed down to predicates; implications become disjunctions.
print("nnf:      ", to_text(to_nnf(parse("!(low | !mid)"))))

# %% Compilation produces the negation-free core: grid regions, conjunction,
# G and U'.  Eventually turns into an until from the always-true region, and
# a standard until gains a G guard for its left operand.
for text in ["F[1,3] mid", "low U[2,4] mid", "G[0,2] (low | high) & F[0,5] mid"]:
    core = compile_formula(text, preds, grid)
    print(f"{text:34s} => {to_text(core)}")

# %% Syntax tree with per-node evaluation windows.  Leaves come first, then
# internal nodes in pre-order; a node's window adds up its ancestors' intervals.
tree = build_tree(compile_formula("((G[1,3] low) U'[2,5] mid) & G[3,7] high", preds, grid))
print()
print(tree.dump())
print("formula horizon:", tree.formula_horizon())

# Leaves are what the monitor tracks.  Their windows set the length of each
# satisfaction vector.
for leaf in tree.leaves:
    cells = leaf.region.cells()
    print(f"leaf {leaf.label:5s} window {tuple(leaf.horizon)} "
          f"length {leaf.horizon.length} cells {np.asarray(cells).tolist()}")
