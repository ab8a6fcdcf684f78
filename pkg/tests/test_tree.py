import pytest

from stlmpm import BoxPredicate, GridSpec, build_tree, compile_formula, formula_horizon, horizon
from stlmpm.scenario import Scenario, gen_property_suite
from stlmpm.tree import AND, G, LEAF, UNTIL

LINE = GridSpec.from_step([0.0], [10.0], 1.0)
PREDS = {n: BoxPredicate.from_bounds([[i, i + 3]]) for i, n in enumerate(["h1", "h2", "h3"])}
NESTED = "((G[1,3] h1) U'[2,5] h2) & G[3,7] h3"


@pytest.fixture(scope="module")
def nested():
    return build_tree(compile_formula(NESTED, PREDS, LINE))


def test_node_layout(nested):
    assert len(nested) == 7
    assert nested.n_leaves == 3
    assert [n.kind for n in nested.nodes] == [LEAF, LEAF, LEAF, AND, UNTIL, G, G]
    assert nested.root == 3
    assert [n.label for n in nested.leaves] == ["h1", "h2", "h3"]


def test_leaf_horizons(nested):
    # hand-derived: h1 sits under U'[2,5] then G[1,3], so [2+1, 5+3]
    assert tuple(horizon(nested, 0)) == (3, 8)
    assert tuple(horizon(nested, 1)) == (2, 5)
    assert tuple(horizon(nested, 2)) == (3, 7)
    assert tuple(nested.horizon(nested.root)) == (0, 0)


def test_formula_horizons(nested, thermal_phi, robot_phi):
    assert formula_horizon(nested) == 8
    assert thermal_phi.formula_horizon() == 15
    assert robot_phi.formula_horizon() == 8
    assert build_tree(compile_formula("h1", PREDS, LINE)).formula_horizon() == 0


def test_thermal_tree(thermal_phi):
    assert len(thermal_phi) == 5
    top, comfort = thermal_phi.leaves
    assert top.region.is_full()
    assert tuple(comfort.horizon) == (0, 15)


def check_horizon_invariant(tree):
    for node in tree.internal:
        lo, hi = node.horizon
        for c in node.children:
            child = tree[c]
            assert child.parent == node.id
            if node.kind == AND:
                assert tuple(child.horizon) == (lo, hi)
            else:
                assert tuple(child.horizon) == (lo + node.a, hi + node.b)
    for node in tree.nodes:
        lo, hi = node.horizon
        # horizon is the sum of ancestor intervals
        anc = [tree[a] for a in tree.ancestors(node.id)]
        assert lo == sum(a.a for a in anc if a.kind != AND)
        assert hi == sum(a.b for a in anc if a.kind != AND)


def test_horizon_invariants_random():
    for doc in gen_property_suite(3, count=60):
        _, tree = Scenario.from_dict(doc).build()
        check_horizon_invariant(tree)
        assert tree.formula_horizon() <= doc["horizon"]
        assert all(n.is_leaf for n in tree.nodes[:tree.n_leaves])
        assert not any(n.is_leaf for n in tree.nodes[tree.n_leaves:])


def test_dump_golden(nested):
    assert nested.dump() == "\n".join([
        "v3 And horizon=[0,0]",
        "  v4 U'[2,5] horizon=[0,0]",
        "    l: v5 G[1,3] horizon=[2,5]",
        "      v0 Leaf {h1} horizon=[3,8]",
        "    r: v1 Leaf {h2} horizon=[2,5]",
        "  v6 G[3,7] horizon=[0,0]",
        "    v2 Leaf {h3} horizon=[3,7]",
    ])


def test_subformula_round_trip(nested):
    for node in nested.nodes:
        assert build_tree(nested.subformula(node.id)) is not None
    assert nested.subformula(nested.root) == nested.formula
