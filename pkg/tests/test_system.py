import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stlmpm import (ConfigError, DimensionMismatch, GridSpec, OutOfDomain, StateSet, build_model,
                    one_step_feasible)

THERMAL_U = [[0.0], [0.25], [0.5], [0.75], [1.0]]


def heat(x, u, T_h=55.0, T_e=0.0, ae=0.06, ah=0.08):
    return x + ae * (T_e - x) + ah * (T_h - x) * u


def brute_pre(model, target):
    """Cells with an input whose lattice successor lies in ``target``, checked point by point."""
    lo, hi = np.array(model.grid.lower), np.array(model.grid.upper)
    out = []
    for c in range(model.n_cells):
        x = model.grid.center(c)
        for u in model.inputs:
            nxt = model.step(x, u)
            if np.any(nxt < lo - 1e-9) or np.any(nxt > hi + 1e-9):
                continue
            idx = np.floor((nxt - lo) / model.grid.step + 0.5).astype(int)
            if int(np.ravel_multi_index(idx, model.grid.counts)) in target:
                out.append(c)
                break
    return out


class TestGrid:
    def test_sizes(self):
        assert GridSpec.from_step([0], [45], 0.5).n_cells == 91
        assert GridSpec.from_step([0, 0], [12, 12], 0.5).n_cells == 625

    def test_step_must_divide_span(self):
        with pytest.raises(ConfigError):
            GridSpec.from_step([0], [10], 0.3)
        with pytest.raises(ConfigError):
            GridSpec.from_step([0], [10], 0)

    def test_bad_bounds(self):
        with pytest.raises(ConfigError):
            GridSpec([1.0], [0.0], [3])

    def test_centers_c_order(self):
        g = GridSpec.from_step([0, 0], [2, 1], 1)
        assert g.centers.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1], [2, 0], [2, 1]]
        assert g.center(3).tolist() == [1, 1]

    def test_snap(self):
        g = GridSpec.from_step([0], [45], 0.5)
        assert g.snap([[20.74], [20.76], [0.0], [45.0], [-0.3], [45.2]]).tolist() == [41, 42, 0, 90, -1, -1]
        assert g.cell_of(20.74) == 41
        with pytest.raises(OutOfDomain):
            g.cell_of([-1.0])
        with pytest.raises(DimensionMismatch):
            g.cell_of([1.0, 2.0])


class TestStateSet:
    def test_algebra(self):
        a = StateSet.from_cells(10, [1, 2, 3])
        b = StateSet.from_cells(10, [3, 4])
        assert list((a & b).cells()) == [3]
        assert list((a | b).cells()) == [1, 2, 3, 4]
        assert list((a - b).cells()) == [1, 2]
        assert len(a.complement()) == 7
        assert (a & b).issubset(a)
        assert StateSet.empty(10).is_empty() and StateSet.full(10).is_full()
        assert 2 in a and 5 not in a

    def test_immutable_and_hashable(self):
        a = StateSet.from_cells(10, [1])
        with pytest.raises(ValueError):
            a.mask[0] = True
        assert hash(a) == hash(StateSet.from_cells(10, [1]))
        assert a == StateSet.from_cells(10, [1])

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            StateSet.empty(3) | StateSet.empty(4)

    @given(st.lists(st.booleans(), min_size=1, max_size=300))
    def test_hex_round_trip(self, bits):
        s = StateSet(np.array(bits))
        assert StateSet.from_hex(s.to_hex(), len(bits)) == s

    def test_hex_layout(self):
        assert StateSet.from_cells(10, [0, 9]).to_hex() == "0102"


class TestModels:
    def test_thermal_step(self, thermal):
        assert thermal.step([20.0], [1.0])[0] == pytest.approx(heat(20.0, 1.0))
        assert heat(20.0, 1.0) == pytest.approx(21.6)
        assert thermal.step([19.0], [1.0])[0] == pytest.approx(20.74)

    def test_thermal_transitions(self, thermal):
        g = thermal.grid
        for c in range(g.n_cells):
            x = float(g.center(c)[0])
            for j, u in enumerate(THERMAL_U):
                want = int(np.floor(heat(x, u[0]) / 0.5 + 0.5))
                assert thermal.transitions[c, j] == (want if 0 <= want <= 90 else -1)
        assert g.center(thermal.transitions[g.cell_of(19.0), 4])[0] == 20.5

    def test_robot_transitions(self, robot):
        g = robot.grid
        c = g.cell_of([3.0, 3.0])
        assert sorted(g.center(s).tolist() for s in robot.successors(c)) == sorted(
            [3 + dx, 3 + dy] for dx in (-1, 0, 1) for dy in (-1, 0, 1))
        corner = g.cell_of([0.0, 0.0])
        assert len(robot.successors(corner)) == 4

    def test_no_dead_ends_in_case_studies(self, thermal, robot):
        assert thermal.dead_end_cells().is_empty()
        assert robot.dead_end_cells().is_empty()

    def test_dead_end_detection(self):
        g = GridSpec.from_step([0], [4], 1)
        m = build_model(lambda x, u: x + 10 * u, g, [[1.0]])
        assert m.dead_end_cells().is_full()

    def test_config_errors(self):
        g = GridSpec.from_step([0], [4], 1)
        with pytest.raises(ConfigError):
            build_model("warp", g, [[0.0]])
        with pytest.raises(ConfigError):
            build_model("thermal1d", g, [])
        with pytest.raises(DimensionMismatch):
            build_model("robot2d", g, [[0.0, 0.0]])
        with pytest.raises(DimensionMismatch):
            build_model("affine", g, [[0.0]], A=[[1, 0], [0, 1]], B=[[1]])
        with pytest.raises(ConfigError):
            build_model("thermal1d", g, [[0.0]], T_x=3)

    def test_digest_is_stable(self, thermal):
        g = GridSpec.from_step([0], [45], 0.5)
        assert build_model("thermal1d", g, THERMAL_U).digest() == thermal.digest()
        assert build_model("thermal1d", g, THERMAL_U, T_h=60).digest() != thermal.digest()


class TestOneStep:
    def test_comfort_band(self, thermal):
        g = thermal.grid
        comfort = StateSet.from_cells(g.n_cells, range(g.cell_of(20.0), g.cell_of(25.0) + 1))
        pre = one_step_feasible(thermal, comfort)
        assert list(pre.cells()) == brute_pre(thermal, comfort)
        xs = [float(g.center(c)[0]) for c in pre.cells()]
        # analytic bounds: heater full on gives 15.6/0.86, heater off gives 25/0.94
        assert abs(xs[0] - 15.6 / 0.86) <= 0.5
        assert abs(xs[-1] - 25 / 0.94) <= 0.5
        assert np.allclose(np.diff(xs), 0.5)

    def test_robot_box_grows_by_one(self, robot):
        g = robot.grid
        box = StateSet(np.all((g.centers >= 6) & (g.centers <= 8), axis=1))
        pre = one_step_feasible(robot, box)
        want = StateSet(np.all((g.centers >= 5) & (g.centers <= 9), axis=1))
        assert pre == want

    def test_empty_and_full(self, robot):
        assert one_step_feasible(robot, robot.empty()).is_empty()
        assert one_step_feasible(robot, robot.full()).is_full()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_monotone_and_distributive(self, seed):
        model = MODEL
        rng = np.random.default_rng(seed)
        a = StateSet(rng.random(model.n_cells) < 0.2)
        b = StateSet(rng.random(model.n_cells) < 0.2)
        pa, pb = one_step_feasible(model, a), one_step_feasible(model, b)
        assert pa.issubset(one_step_feasible(model, a | b))
        assert one_step_feasible(model, a | b) == pa | pb
        assert one_step_feasible(model, a & b).issubset(pa & pb)
        assert list(pa.cells()) == brute_pre(model, a)


MODEL = build_model("thermal1d", GridSpec.from_step([0], [45], 0.5), THERMAL_U)
