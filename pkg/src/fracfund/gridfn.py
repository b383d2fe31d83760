"""Uniform-grid sampled functions, the common currency of the solvers.

A GridFn holds node values of a scalar-, vector- or matrix-valued function
on the uniform grid of [a, b] with N subintervals.  Between nodes every
consumer interprets the data piecewise-linearly; that single interpolation
contract is what makes the product-integration moments exact for affine
data.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridMismatchError

PIECEWISE_LINEAR = "piecewise_linear"


@dataclass
class GridFn:
    a: float
    b: float
    N: int
    values: np.ndarray
    interp: str = PIECEWISE_LINEAR

    def __post_init__(self):
        self.a = float(self.a)
        self.b = float(self.b)
        self.N = int(self.N)
        self.values = np.asarray(self.values, dtype=float)
        if self.interp != PIECEWISE_LINEAR:
            raise DomainError(f"unsupported interpolation {self.interp!r}")
        if self.N < 0:
            raise DomainError("N must be nonnegative")
        if self.N == 0:
            if self.b != self.a:
                raise DomainError("N = 0 requires a degenerate interval a == b")
        elif not self.b > self.a:
            raise DomainError(f"need b > a, got [{self.a}, {self.b}]")
        if self.values.shape[0] != self.N + 1:
            raise GridMismatchError(
                f"values carry {self.values.shape[0]} nodes, grid has {self.N + 1}"
            )

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N if self.N else 0.0

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.N + 1)

    @property
    def value_shape(self) -> tuple:
        return self.values.shape[1:]

    @property
    def components(self) -> int:
        return int(np.prod(self.value_shape, dtype=int)) if self.value_shape else 1

    def sample(self, x) -> np.ndarray:
        """Piecewise-linear evaluation at arbitrary points inside [a, b]."""
        x = np.asarray(x, dtype=float)
        if self.N == 0:
            out = np.broadcast_to(self.values[0], x.shape + self.value_shape)
            return out.copy()
        pos = (x - self.a) / self.h
        idx = np.clip(np.floor(pos).astype(int), 0, self.N - 1)
        frac = pos - idx
        frac = frac.reshape(frac.shape + (1,) * len(self.value_shape))
        return (1.0 - frac) * self.values[idx] + frac * self.values[idx + 1]

    def prefix(self, t_cut: float) -> "GridFn":
        """Restriction to [a, t_cut]; t_cut must sit on a grid node."""
        if self.N == 0:
            if t_cut != self.a:
                raise GridMismatchError("degenerate grid has only its base point")
            return GridFn(self.a, self.a, 0, self.values.copy())
        k = (t_cut - self.a) / self.h
        ki = int(round(k))
        if not (0 <= ki <= self.N) or abs(k - ki) > 1e-9 * max(1, self.N):
            raise GridMismatchError(f"cut point {t_cut} is not a grid node")
        b_new = float(self.t[ki]) if ki else self.a
        return GridFn(self.a, b_new, ki, self.values[: ki + 1].copy())

    def to_csv(self, path, label="v") -> None:
        write_csv(self, path, label)


def write_csv(fn: GridFn, path, label="v") -> None:
    """Serialize node values: header t,<label>_1,...,<label>_k, 17 significant
    digits so reloading reproduces the doubles exactly."""
    k = fn.components
    header = "t," + ",".join(f"{label}_{i + 1}" for i in range(k))
    flat = fn.values.reshape(fn.N + 1, k)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for ti, row in zip(fn.t, flat):
            fh.write(f"{ti:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def read_csv(path, value_shape=None) -> GridFn:
    """Load a GridFn written by :func:`write_csv`.

    value_shape disambiguates the flattened components (e.g. (2, 2) to read a
    matrix-valued function back); by default k components load as a k-vector
    and a single component as a scalar function.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        rows = [line.strip() for line in fh if line.strip()]
    cols = header.split(",")
    if not cols or cols[0] != "t":
        raise DomainError(f"unrecognized GridFn CSV header {header!r}")
    k = len(cols) - 1
    t = np.empty(len(rows))
    vals = np.empty((len(rows), k))
    for i, line in enumerate(rows):
        parts = line.split(",")
        if len(parts) != k + 1:
            raise DomainError(f"row {i + 2} has {len(parts)} fields, expected {k + 1}")
        t[i] = float(parts[0])
        vals[i] = [float(p) for p in parts[1:]]
    if len(rows) < 1:
        raise DomainError("empty GridFn CSV")
    if value_shape is None:
        value_shape = () if k == 1 else (k,)
    if int(np.prod(value_shape, dtype=int) if value_shape else 1) != k:
        raise DomainError(f"value_shape {value_shape} does not hold {k} components")
    N = len(rows) - 1
    a, b = float(t[0]), float(t[-1])
    if N > 0:
        steps = np.diff(t)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(abs(a), abs(b), 1.0):
            raise GridMismatchError("CSV nodes are not uniformly spaced")
    return GridFn(a, b, N, vals.reshape((N + 1,) + tuple(value_shape)))
