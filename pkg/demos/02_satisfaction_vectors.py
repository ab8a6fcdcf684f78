# Three-valued satisfaction vectors
#
# The monitor summarizes a prefix by the status of every leaf at every step of
# its window: satisfied (1), violated (0) or not yet observed (?).  Statuses of
# the internal nodes follow by strong Kleene evaluation.

from stlmpm import BoxPredicate, GridSpec, build_tree, compile_formula, induce, init_basic, update
from stlmpm.vectors import candidate_successors, consistent_region, successors

grid = GridSpec.from_step([0.0], [10.0], 1.0)
preds = {"p": BoxPredicate.from_bounds([[2, 6]]), "q": BoxPredicate.from_bounds([[5, 9]])}
tree = build_tree(compile_formula("G[0,2] p & F[1,3] q", preds, grid))
print(tree.dump(), "\n")


def show(basic):
    induced = induce(tree, basic)
    root = induced.root.symbol
    print(f"  {basic.encode():24s} root={root}")


# %% Start with everything unknown and feed a few cells.
basic = init_basic(tree)
show(basic)
for k, cell in enumerate([3, 4, 6, 5]):
    basic = update(basic, cell, k, tree)
    print(f"observe cell {cell} at step {k}")
    show(basic)

# %% Successor enumeration.  At a given step every leaf whose window contains
# the step gets a fresh 0/1 entry.  Successors that already violate the root
# are dropped, and each surviving successor owns the cells that trigger it.
basic = update(update(init_basic(tree), 3, 0, tree), 4, 1, tree)
print("\nfrom", basic.encode(), "at step 2:")
for nb in candidate_successors(tree, basic, 2):
    region = consistent_region(tree, basic, nb, 2)
    kept = nb in successors(tree, basic, 2)
    print(f"  {nb.encode():24s} cells {region.cells().tolist()!s:24s} "
          f"{'kept' if kept else 'dropped (root violated)'}")
