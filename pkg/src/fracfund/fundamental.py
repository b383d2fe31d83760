"""Fundamental matrix field on the triangle t >= s.

The field F solves a weakly singular matrix Volterra equation whose value on
the diagonal is Id/Gamma(alpha). Three routes are provided: an implicit
product-integration march (production path), a fixed-point iteration under an
exponentially weighted norm (cross-check), and a mirrored march for the dual
field G that multiplies the coefficient from the right. A-priori sup and
Hoelder bounds for F are computed from the coefficient's sup norm.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as _dcfield

import numpy as np

from .errors import (DomainError, GridMismatchError, NonConvergenceError,
                     SingularSystemError)
from .operators import op_constants
from .problem import CauchyProblem
from .quadrules import hat_moment_tables
from .special import gamma, ml_scalar

_EXP_GUARD = 700.0


@dataclass(frozen=True)
class TriangleGrid:
    """Uniform nodes on [t0, theta]; holds index pairs (i, j) with j <= i."""

    t0: float
    theta: float
    N: int

    def __post_init__(self):
        if not self.theta > self.t0:
            raise DomainError("need theta > t0")
        if self.N < 1:
            raise DomainError("need N >= 1")

    @property
    def h(self):
        return (self.theta - self.t0) / self.N

    @property
    def t(self):
        return np.linspace(self.t0, self.theta, self.N + 1)


@dataclass
class FundamentalField:
    grid: TriangleGrid
    alpha: float
    values: np.ndarray  # (N+1, N+1, n, n); NaN above the diagonal
    meta: dict = _dcfield(default_factory=dict)

    @property
    def n(self):
        return self.values.shape[-1]

    def at(self, i, j):
        """Matrix value at (t_i, t_j); j must not exceed i."""
        N = self.grid.N
        if not (0 <= j <= i <= N):
            raise DomainError(f"index pair ({i}, {j}) outside the triangle")
        return self.values[i, j]

    def write_csv(self, path):
        # TODO(csv): stream rows instead of materializing the full triangle
        # table; matters for N > 4096 runs
        N, n = self.grid.N, self.n
        ii, jj = np.tril_indices(N + 1)
        t = self.grid.t
        flat = self.values[ii, jj].reshape(ii.size, n * n)
        table = np.column_stack([t[ii], t[jj], flat])
        names = ",".join(f"F_{r+1}{c+1}" for r in range(n) for c in range(n))
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write("t,s," + names + "\n")
            for row in table:
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def z_value(field: FundamentalField, i, j):
    """Singular-normalized value F(t_i,t_j)/(t_i-t_j)^(1-alpha); needs j < i."""
    if j >= i:
        raise DomainError("z_value is undefined on the diagonal")
    dt = (i - j) * field.grid.h
    return field.at(i, j) / dt ** (1.0 - field.alpha)


@dataclass(frozen=True)
class AprioriBounds:
    kappa: float
    M_A: float
    M_F: float
    H_F: float


def bounds(problem: CauchyProblem, num_samples=513) -> AprioriBounds:
    """Sup bound M_F and two-variable Hoelder bound H_F for the field.

    M_A is the max over sample nodes of the max-row-sum norm of A. kappa is
    fixed so the weighted-norm contraction factor is exactly 1/2 (any positive
    choice with factor < 1 works; a fixed rule keeps the bounds reproducible).
    """
    c = op_constants(problem.alpha)
    ts = np.linspace(problem.t0, problem.theta, num_samples)
    M_A = float(np.abs(problem.A.at(ts)).sum(axis=2).max())
    alpha = problem.alpha
    span = problem.theta - problem.t0
    if M_A > 0.0:
        kappa = (2.0 * M_A * c.M_J) ** (1.0 / alpha)
        q = 0.5
    else:
        kappa = 1.0
        q = 0.0
    grow = span * kappa
    M_F = math.inf if grow > _EXP_GUARD else math.exp(grow) / (gamma(alpha) * (1.0 - q))
    H_F = c.H_J * M_A * M_F * ml_scalar(alpha, span ** alpha * M_A * c.M_J)
    return AprioriBounds(kappa=kappa, M_A=M_A, M_F=M_F, H_F=H_F)


def _check_grid(problem, grid):
    span = problem.theta - problem.t0
    if (abs(grid.t0 - problem.t0) > 1e-12 * span
            or abs(grid.theta - problem.theta) > 1e-12 * span):
        raise GridMismatchError("grid interval differs from the problem's")


def _thread_count():
    raw = os.environ.get("FRACFUND_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _blocks(total, workers):
    # contiguous index ranges [lo, hi); empty ranges dropped
    cuts = np.linspace(0, total, min(workers, total) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _run_blocks(fn, ranges):
    if len(ranges) == 1:
        fn(*ranges[0])
        return
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        futs = [pool.submit(fn, lo, hi) for lo, hi in ranges]
        for f in futs:
            f.result()


def solve_F(problem: CauchyProblem, grid: TriangleGrid) -> FundamentalField:
    """Implicit product-integration march, column by column.

    Column j marches upward from the diagonal. At step count k the unknown
    node appears inside its own moment weight, so each step solves a small
    n x n system. Columns are independent; FRACFUND_THREADS > 1 splits them
    into contiguous blocks. The per-node arithmetic never depends on the
    block layout, so results are bitwise identical for any thread count.
    """
    _check_grid(problem, grid)
    t_start = time.perf_counter()
    alpha, N, h, n = problem.alpha, grid.N, grid.h, problem.n
    Anodes = problem.A.at(grid.t)
    tables = hat_moment_tables(N, alpha - 1.0, alpha - 1.0)
    ga = gamma(alpha)
    eye = np.eye(n)
    diag = eye / ga
    ck = (np.arange(N + 1) * h) ** alpha / ga

    values = np.full((N + 1, N + 1, n, n), np.nan)
    values[np.arange(N + 1), np.arange(N + 1)] = diag
    AF = np.empty((N + 1, N + 1, n, n))
    AF[0] = Anodes / ga

    def march(j0, j1):
        for k in range(1, N - j0 + 1):
            jmax = min(j1, N - k + 1)
            if jmax <= j0:
                return
            w = tables[k]
            rhs = diag + ck[k] * np.einsum(
                "m,mjab->jab", w[:k], AF[:k, j0:jmax], optimize=False)
            sys = eye - (ck[k] * w[k]) * Anodes[j0 + k:jmax + k]
            try:
                Fk = np.linalg.solve(sys, rhs)
            except np.linalg.LinAlgError:
                raise SingularSystemError(
                    f"self-weight system singular at step {k}; refine N") from None
            cols = np.arange(j0, jmax)
            values[cols + k, cols] = Fk
            AF[k, j0:jmax] = Anodes[j0 + k:jmax + k] @ Fk

    _run_blocks(march, _blocks(N + 1, _thread_count()))
    meta = {"method": "march", "N": N,
            "wall_time": time.perf_counter() - t_start}
    return FundamentalField(grid, alpha, values, meta)


def solve_F_picard(problem: CauchyProblem, grid: TriangleGrid,
                   max_iter=80, tol=1e-10) -> FundamentalField:
    """Fixed-point iteration for the same discrete equation as solve_F.

    Stops when the kappa-weighted sup norm of an update drops to tol; the
    kappa from bounds() makes each sweep at least halve that norm. Kept as an
    independent cross-check of the march, not a production path.
    """
    _check_grid(problem, grid)
    t_start = time.perf_counter()
    alpha, N, h, n = problem.alpha, grid.N, grid.h, problem.n
    Anodes = problem.A.at(grid.t)
    tables = hat_moment_tables(N, alpha - 1.0, alpha - 1.0)
    ga = gamma(alpha)
    diag = np.eye(n) / ga
    ck = (np.arange(N + 1) * h) ** alpha / ga
    kappa = bounds(problem).kappa
    decay = np.exp(-kappa * h * np.arange(N + 1))

    # diagonal-major iterate: cur[k, j] ~ F(t_{j+k}, t_j), valid for j <= N-k
    cur = np.broadcast_to(diag, (N + 1, N + 1, n, n)).copy()
    Apad = np.concatenate([Anodes, np.zeros((N, n, n))])
    s0, s1, s2 = Apad.strides
    # Hankel view into the padded buffer: A_shift[m, j] = A at node m+j for
    # m+j <= N, zeros beyond; keeps every strided read in-bounds
    A_shift = np.lib.stride_tricks.as_strided(
        Apad, shape=(N + 1, N + 1, n, n), strides=(s0, s0, s1, s2),
        writeable=False)

    iterations = 0
    bnorm = math.inf
    for it in range(1, max_iter + 1):
        AP = np.matmul(A_shift, cur)
        nxt = np.empty_like(cur)
        nxt[0] = diag
        bnorm = 0.0
        for k in range(1, N + 1):
            w = tables[k]
            upd = diag + ck[k] * np.einsum(
                "m,mjab->jab", w, AP[:k + 1, :N + 1 - k], optimize=False)
            dk = np.abs(upd - cur[k, :N + 1 - k]).sum(axis=-1).max()
            bnorm = max(bnorm, dk * decay[k])
            nxt[k, :N + 1 - k] = upd
        cur = nxt
        iterations = it
        if bnorm <= tol:
            break
    else:
        raise NonConvergenceError(
            f"fixed-point sweep still above tol after {max_iter} iterations")

    values = np.full((N + 1, N + 1, n, n), np.nan)
    for k in range(N + 1):
        cols = np.arange(N + 1 - k)
        values[cols + k, cols] = cur[k, :N + 1 - k]
    meta = {"method": "picard", "N": N, "iterations": iterations,
            "weighted_residual": float(bnorm),
            "wall_time": time.perf_counter() - t_start}
    return FundamentalField(grid, alpha, values, meta)


def solve_G_dual(problem: CauchyProblem, grid: TriangleGrid) -> FundamentalField:
    """Mirrored march for the dual field: coefficient multiplies from the right.

    Row i marches backward in the second argument from the diagonal. The
    unknown sits at the lower node of the current step, so the small system
    acts from the right; it is solved transposed. Rows are independent and
    split across threads exactly like solve_F's columns.
    """
    _check_grid(problem, grid)
    t_start = time.perf_counter()
    alpha, N, h, n = problem.alpha, grid.N, grid.h, problem.n
    Anodes = problem.A.at(grid.t)
    tables = hat_moment_tables(N, alpha - 1.0, alpha - 1.0)
    ga = gamma(alpha)
    eye = np.eye(n)
    diag = eye / ga
    ck = (np.arange(N + 1) * h) ** alpha / ga

    values = np.full((N + 1, N + 1, n, n), np.nan)
    values[np.arange(N + 1), np.arange(N + 1)] = diag
    GA = np.empty((N + 1, N + 1, n, n))  # GA[m, i] = G(t_i, t_{i-m}) A(t_{i-m})
    GA[0] = values[np.arange(N + 1), np.arange(N + 1)] @ Anodes

    def march(i0, i1):
        for k in range(1, i1):
            lo = max(i0, k)
            if lo >= i1:
                continue
            w = tables[k]
            rhs = diag + ck[k] * np.einsum(
                "m,miab->iab", w[k:0:-1], GA[:k, lo:i1], optimize=False)
            sys = eye - (ck[k] * w[0]) * Anodes[lo - k:i1 - k]
            try:
                Gk = np.linalg.solve(
                    sys.transpose(0, 2, 1), rhs.transpose(0, 2, 1)
                ).transpose(0, 2, 1)
            except np.linalg.LinAlgError:
                raise SingularSystemError(
                    f"self-weight system singular at step {k}; refine N") from None
            rows = np.arange(lo, i1)
            values[rows, rows - k] = Gk
            GA[k, lo:i1] = Gk @ Anodes[lo - k:i1 - k]

    _run_blocks(march, _blocks(N + 1, _thread_count()))
    meta = {"method": "dual_march", "N": N,
            "wall_time": time.perf_counter() - t_start}
    return FundamentalField(grid, alpha, values, meta)
