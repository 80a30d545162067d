"""Problem instances, meshes and grid functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DomainError,
    IncompatibleGridError,
    InvalidInputError,
    InvalidMeshError,
    ProblemSpecError,
)

DEFAULT_GRID_N = 512

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BoundaryFunction:
    """An initial iterate together with its first two derivatives.

    All three callables must accept numpy arrays.
    """

    value: Callable[[np.ndarray], np.ndarray]
    d1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    d2: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def constant(cls, c: float) -> "BoundaryFunction":
        c = float(c)
        return cls(
            value=lambda x: np.full_like(np.asarray(x, dtype=float), c),
            d1=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            d2=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        )

    def require_derivatives(self) -> None:
        if self.d1 is None or self.d2 is None:
            raise InvalidInputError("boundary function needs d1 and d2")

    def neumann_defect(self) -> float:
        """|u'(0)|; the initial iterates must satisfy u'(0) = 0 to 1e-10."""
        self.require_derivatives()
        return float(abs(np.asarray(self.d1(np.array([0.0])))[0]))

    def on(self, nodes) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        return GridFunction(nodes, np.asarray(self.value(nodes), dtype=float) * np.ones_like(nodes))


@dataclass(frozen=True)
class ProblemSpec:
    """-(x^alpha y')' = x^alpha f(x, y),  y'(0) = 0,  y(1) = delta*y(eta) + b.

    ``f_y_bound`` is the one-sided Lipschitz constant used in the lambda
    lambda inequalities of the existence results.  ``uniqueness_bound`` is the
    constant tested against the first-zero bound for uniqueness; it defaults
    to ``f_y_bound`` when omitted.
    """

    alpha: float
    delta: float
    eta: float
    f: Field
    upper0: BoundaryFunction
    lower0: BoundaryFunction
    f_y_bound: float = 0.0
    b: float = 0.0
    uniqueness_bound: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if not self.alpha >= 1.0:
            raise ProblemSpecError(f"alpha must be >= 1, got {self.alpha}")
        if not self.delta > 0.0:
            raise ProblemSpecError(f"delta must be > 0, got {self.delta}")
        if not 0.0 < self.eta < 1.0:
            raise ProblemSpecError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.f_y_bound >= 0.0:
            raise ProblemSpecError(f"f_y_bound must be >= 0, got {self.f_y_bound}")

    @property
    def m_unique(self) -> float:
        return self.f_y_bound if self.uniqueness_bound is None else self.uniqueness_bound

    def f_on(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.asarray(self.f(x, y), dtype=float) * np.ones(np.broadcast(x, y).shape)


@dataclass(frozen=True, eq=False)
class GridFunction:
    nodes: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or values.shape != nodes.shape:
            raise InvalidMeshError("nodes and values must be 1-D arrays of equal length")
        if nodes.size < 2 or nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise InvalidMeshError("mesh must start at 0 and end at 1")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidMeshError("mesh nodes must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InvalidMeshError("grid function values must be finite")
        nodes.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.nodes.size

    def node_index(self, x: float) -> int:
        k = int(np.searchsorted(self.nodes, x))
        if k >= self.nodes.size or self.nodes[k] != x:
            raise InvalidMeshError(f"{x!r} is not a mesh node")
        return k

    def __call__(self, x):
        return interp(self, x)


def make_grid(n: int, eta: float) -> np.ndarray:
    """Uniform mesh i/n on [0, 1] with ``eta`` inserted as an exact node."""
    if int(n) != n or n < 4:
        raise InvalidMeshError(f"need an integer n >= 4, got {n}")
    if not 0.0 < eta < 1.0:
        raise InvalidMeshError(f"eta must lie in (0, 1), got {eta}")
    n = int(n)
    nodes = np.arange(n + 1, dtype=float) / n
    k = int(np.searchsorted(nodes, eta))
    if nodes[k] != eta:
        nodes = np.insert(nodes, k, eta)
    return nodes


def interp(g: GridFunction, x):
    """Piecewise-linear interpolation of ``g``; exact at nodes."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise DomainError("interpolation point outside [0, 1]")
    out = np.interp(xa, g.nodes, g.values)
    return float(out) if np.ndim(x) == 0 else out


def sup_norm_diff(a: GridFunction, b: GridFunction) -> float:
    if a.nodes.shape != b.nodes.shape or not np.array_equal(a.nodes, b.nodes):
        raise IncompatibleGridError("grid functions live on different meshes")
    return float(np.max(np.abs(a.values - b.values)))
