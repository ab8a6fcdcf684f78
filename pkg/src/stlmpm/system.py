"""Discretized dynamic model: state lattice, input grid, transitions, one-step feasible sets.

The bounded state box is covered by a regular lattice of points; each lattice
point stands for the cell of states that snap to it.  Dynamics are applied to
lattice points and the result is snapped back, so every set computation in the
package happens on finite cell sets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigError, DimensionMismatch, OutOfDomain

_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Regular lattice over the box ``[lower, upper]`` with ``counts`` points per axis.

    Point ``i`` of axis ``d`` sits at ``lower[d] + i * step[d]``, so both bounds
    are lattice points.  Cells are flattened in C order (last axis fastest).
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        counts = tuple(int(c) for c in self.counts)
        if not (len(lower) == len(upper) == len(counts)) or not lower:
            raise ConfigError("grid bounds and counts must have one matching entry per axis")
        for lo, hi, c in zip(lower, upper, counts):
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
                raise ConfigError(f"invalid bounds [{lo}, {hi}]")
            if c < 1:
                raise ConfigError("cell counts must be >= 1")
            if c == 1 and hi != lo:
                raise ConfigError("a single-point axis needs lower == upper")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_step(cls, lower: Sequence[float], upper: Sequence[float], step) -> "GridSpec":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        step = np.broadcast_to(np.asarray(step, dtype=float), lower.shape)
        if np.any(step <= 0):
            raise ConfigError("grid step must be positive")
        spans = (upper - lower) / step
        counts = np.rint(spans).astype(int)
        if np.any(np.abs(spans - counts) > 1e-6):
            raise ConfigError("grid step must divide the state bounds evenly")
        return cls(tuple(lower), tuple(upper), tuple(int(c) + 1 for c in counts))

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.counts))

    @property
    def step(self) -> np.ndarray:
        lo, hi, n = np.array(self.lower), np.array(self.upper), np.array(self.counts)
        return np.where(n > 1, (hi - lo) / np.maximum(n - 1, 1), 1.0)

    def axis_points(self, d: int) -> np.ndarray:
        return self.lower[d] + np.arange(self.counts[d]) * self.step[d]

    @property
    def centers(self) -> np.ndarray:
        """Array of shape ``(n_cells, ndim)`` with the lattice point of every cell."""
        axes = np.meshgrid(*[self.axis_points(d) for d in range(self.ndim)], indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=1)

    def snap(self, points) -> np.ndarray:
        """Map states (shape ``(..., ndim)``) to cell indices; -1 marks out-of-domain."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.ndim:
            raise DimensionMismatch(f"expected states of dimension {self.ndim}, got {pts.shape[-1]}")
        lo, hi = np.array(self.lower), np.array(self.upper)
        inside = np.all((pts >= lo - _BOUND_TOL) & (pts <= hi + _BOUND_TOL), axis=-1)
        idx = np.floor((pts - lo) / self.step + 0.5).astype(int)
        idx = np.clip(idx, 0, np.array(self.counts) - 1)
        flat = np.ravel_multi_index(tuple(np.moveaxis(idx, -1, 0)), self.counts)
        return np.where(inside, flat, -1)

    def cell_of(self, x) -> int:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        cell = int(self.snap(x))
        if cell < 0:
            raise OutOfDomain(f"state {x.tolist()} outside bounds {self.lower}..{self.upper}")
        return cell

    def center(self, cell: int) -> np.ndarray:
        idx = np.unravel_index(int(cell), self.counts)
        return np.array([self.lower[d] + idx[d] * self.step[d] for d in range(self.ndim)])

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "counts": list(self.counts)}


class StateSet:
    """Immutable set of grid cells stored as a boolean mask."""

    __slots__ = ("_mask", "_hash")

    def __init__(self, mask):
        mask = np.array(mask, dtype=bool).ravel()
        mask.setflags(write=False)
        self._mask = mask
        self._hash = None

    @classmethod
    def empty(cls, n_cells: int) -> "StateSet":
        return cls(np.zeros(n_cells, dtype=bool))

    @classmethod
    def full(cls, n_cells: int) -> "StateSet":
        return cls(np.ones(n_cells, dtype=bool))

    @classmethod
    def from_cells(cls, n_cells: int, cells: Iterable[int]) -> "StateSet":
        mask = np.zeros(n_cells, dtype=bool)
        mask[list(cells)] = True
        return cls(mask)

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def n_cells(self) -> int:
        return self._mask.size

    def cells(self) -> np.ndarray:
        return np.flatnonzero(self._mask)

    def is_empty(self) -> bool:
        return not self._mask.any()

    def is_full(self) -> bool:
        return bool(self._mask.all())

    def complement(self) -> "StateSet":
        return StateSet(~self._mask)

    def issubset(self, other: "StateSet") -> bool:
        return not np.any(self._mask & ~other._mask)

    def _check(self, other):
        if not isinstance(other, StateSet):
            return NotImplemented
        if other.n_cells != self.n_cells:
            raise DimensionMismatch("state sets over different grids")
        return other

    def __and__(self, other):
        other = self._check(other)
        return StateSet(self._mask & other._mask)

    def __or__(self, other):
        other = self._check(other)
        return StateSet(self._mask | other._mask)

    def __sub__(self, other):
        other = self._check(other)
        return StateSet(self._mask & ~other._mask)

    def __contains__(self, cell) -> bool:
        return 0 <= cell < self._mask.size and bool(self._mask[cell])

    def __iter__(self):
        return iter(int(c) for c in self.cells())

    def __len__(self) -> int:
        return int(self._mask.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.n_cells == other.n_cells and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n_cells, self._mask.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"StateSet({len(self)}/{self.n_cells} cells)"

    def to_hex(self) -> str:
        """Bitset encoding: cell ``i`` is bit ``i`` of the little-endian bytes."""
        return np.packbits(self._mask, bitorder="little").tobytes().hex()

    @classmethod
    def from_hex(cls, text: str, n_cells: int) -> "StateSet":
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits.size < n_cells or bits[n_cells:].any():
            raise ValueError("bitset does not match the number of cells")
        return cls(bits[:n_cells].astype(bool))


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Finite abstraction of ``x' = f(x, u)`` on a state lattice.

    ``transitions[c, j]`` is the cell reached from the lattice point of cell
    ``c`` under input ``inputs[j]``, or -1 when the successor leaves the box.
    """

    grid: GridSpec
    inputs: np.ndarray
    dynamics: Callable[[np.ndarray, np.ndarray], np.ndarray]
    transitions: np.ndarray
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def n_cells(self) -> int:
        return self.grid.n_cells

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def full(self) -> StateSet:
        return StateSet.full(self.n_cells)

    def empty(self) -> StateSet:
        return StateSet.empty(self.n_cells)

    def step(self, x, u) -> np.ndarray:
        """Apply the continuous dynamics once."""
        return np.asarray(self.dynamics(np.atleast_1d(np.asarray(x, float)),
                                        np.atleast_1d(np.asarray(u, float))), dtype=float)

    def successors(self, cell: int) -> list[int]:
        """Distinct in-domain successor cells of ``cell``, in input order."""
        out = []
        for c in self.transitions[cell]:
            if c >= 0 and c not in out:
                out.append(int(c))
        return out

    def dead_end_cells(self) -> StateSet:
        """Cells with no in-domain successor under any input."""
        return StateSet(np.all(self.transitions < 0, axis=1))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.grid.to_dict()).encode())
        h.update(np.ascontiguousarray(self.inputs, dtype=float).tobytes())
        h.update(np.ascontiguousarray(self.transitions, dtype=np.int64).tobytes())
        return h.hexdigest()


def thermal_dynamics(T_h=55.0, T_e=0.0, alpha_e=0.06, alpha_H=0.08, tau_s=1.0):
    def f(x, u):
        return x + tau_s * (alpha_e * (T_e - x) + alpha_H * (T_h - x) * u)
    return f


def integrator_dynamics(tau_s=1.0):
    def f(x, u):
        return x + tau_s * u
    return f


def affine_dynamics(A, B, tau_s=1.0):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))

    def f(x, u):
        return A @ x + tau_s * (B @ u)
    return f


_THERMAL_DEFAULTS = {"T_h": 55.0, "T_e": 0.0, "alpha_e": 0.06, "alpha_H": 0.08, "tau_s": 1.0}


def build_model(kind, grid: GridSpec, inputs, **params) -> SystemModel:
    """Build a discretized model and precompute its transition table.

    ``kind`` is ``"thermal1d"``, ``"robot2d"``, ``"affine"`` (needs ``A`` and
    ``B``; optional ``tau_s``) or a callable ``f(x, u)``.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.size == 0:
        raise ConfigError("input grid is empty")
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    if grid.n_cells == 0:
        raise ConfigError("state grid is empty")

    if callable(kind):
        f, name = kind, "custom"
    elif kind == "thermal1d":
        unknown = set(params) - set(_THERMAL_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown thermal parameters: {sorted(unknown)}")
        params = {**_THERMAL_DEFAULTS, **params}
        f, name = thermal_dynamics(**params), kind
        _expect_dims(grid, inputs, 1, 1, kind)
    elif kind == "robot2d":
        params = {"tau_s": 1.0, **params}
        f, name = integrator_dynamics(params["tau_s"]), kind
        _expect_dims(grid, inputs, 2, 2, kind)
    elif kind == "affine":
        if "A" not in params or "B" not in params:
            raise ConfigError("affine model needs matrices A and B")
        params = {"tau_s": 1.0, **params}
        A = np.atleast_2d(np.asarray(params["A"], dtype=float))
        B = np.atleast_2d(np.asarray(params["B"], dtype=float))
        if A.shape != (grid.ndim, grid.ndim) or B.shape != (grid.ndim, inputs.shape[1]):
            raise DimensionMismatch("affine matrices do not match state/input dimensions")
        f, name = affine_dynamics(A, B, params["tau_s"]), kind
    else:
        raise ConfigError(f"unknown model kind {kind!r}")

    centers = grid.centers
    table = np.empty((grid.n_cells, len(inputs)), dtype=np.int64)
    for j, u in enumerate(inputs):
        nxt = np.array([f(x, u) for x in centers], dtype=float).reshape(len(centers), grid.ndim)
        table[:, j] = grid.snap(nxt)
    table.setflags(write=False)
    inputs.setflags(write=False)
    return SystemModel(grid, inputs, f, table, name, dict(params))


def _expect_dims(grid, inputs, n, m, kind):
    if grid.ndim != n or inputs.shape[1] != m:
        raise DimensionMismatch(f"{kind} expects a {n}-D state grid and {m}-D inputs")


def one_step_feasible(model: SystemModel, target: StateSet) -> StateSet:
    """Cells from which some input leads into ``target``; leaving the box never counts."""
    padded = np.append(target.mask, False)
    hits = padded[model.transitions]
    return StateSet(hits.any(axis=1))
