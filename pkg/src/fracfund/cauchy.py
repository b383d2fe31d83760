"""Cauchy problems with an intermediate start segment.

The solution is prescribed on [t0, t_star] and continued to (t_star, theta].
Four routes produce it: a direct implicit march of the equivalent integral
equation, and three representation formulas driven by the fundamental field.
The history enters the formulas through the continuation functional psi and
the modified forcing b_star; psi's difference against its value at t_star is
alpha-Hoelder at t_star, so the first subinterval of every memory integral is
integrated with exact point values at fixed Jacobi nodes instead of the
piecewise-linear shortcut, which would lose the cusp.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, GridMismatchError, PreconditionError,
                     SingularSystemError)
from .fundamental import FundamentalField
from .gridfn import PIECEWISE_LINEAR, GridFn
from .problem import CauchyProblem
from .quadrules import (SINGULAR_NODES, SMOOTH_NODES, first_interval_moments,
                        hat_moment_tables, hypersingular_tail_weights,
                        jacobi_rule_01, left_moment_weights, left_moments_at)
from .special import gamma

METHOD_DIRECT = "direct"
METHOD_PC = "repr_pc"
METHOD_GC = "repr_gc"
METHOD_GC_COMPACT = "repr_gc_compact"
METHODS = (METHOD_DIRECT, METHOD_PC, METHOD_GC, METHOD_GC_COMPACT)

_PSI_CHUNK = 256


@dataclass
class Solution:
    x: GridFn
    method: str
    meta: dict

    def write_csv(self, path):
        self.x.to_csv(path, label="x")

    def sidecar(self):
        """Metadata record for the companion file next to the CSV."""
        out = {"method": self.method}
        out.update(self.meta)
        return out


def _star_index(problem, N):
    h = (problem.theta - problem.t0) / N
    kf = (problem.t_star - problem.t0) / h
    k0 = int(round(kf))
    if abs(kf - k0) > 1e-8:
        raise GridMismatchError(
            f"t_star={problem.t_star} is not a node of the N={N} grid")
    return k0


def _check_field(problem, field):
    span = problem.theta - problem.t0
    g = field.grid
    if (abs(g.t0 - problem.t0) > 1e-12 * span
            or abs(g.theta - problem.theta) > 1e-12 * span):
        raise GridMismatchError("field grid interval differs from the problem's")
    if field.n != problem.n or field.alpha != problem.alpha:
        raise GridMismatchError("field dimension or order differs from the problem's")


def _prefix_values(problem, t, k0):
    seg = problem.history.w_star
    if seg.N == k0:
        return seg.values.copy()
    return seg.sample(t[:k0 + 1])


def _history_integrals(phi: GridFn, alpha, ts):
    """(1/Gamma(alpha)) * integral over the start segment of the memory kernel
    (t - tau)^(alpha-1) against phi, one value per requested t."""
    n = phi.value_shape[0]
    out = np.zeros((len(ts), n))
    if phi.N == 0:
        return out
    nodes = phi.t
    flat = phi.values
    ga = gamma(alpha)
    for idx, tt in enumerate(ts):
        out[idx] = left_moments_at(alpha, nodes, tt) @ flat / ga
    return out


def equation_residual(problem, x: GridFn):
    """Max residual of the discretized integral equation over nodes past t_star.

    The equation states x(t) = w(t0) + history integral + memory integral of
    A x + b from t_star to t; all three pieces are evaluated with the same
    product-integration weights the direct solver uses.
    """
    N = x.N
    k0 = _star_index(problem, N)
    t = x.t
    h = x.h
    alpha = problem.alpha
    ga = gamma(alpha)
    phi = problem.history.caputo_samples(alpha)
    hist = _history_integrals(phi, alpha, t[k0 + 1:])
    w0 = problem.w0
    Anodes = problem.A.at(t[k0:])
    bnodes = problem.b.at(t[k0:])
    v = np.einsum("mab,mb->ma", Anodes, x.values[k0:]) + bnodes
    M = N - k0
    W = left_moment_weights(alpha, M, h)
    rhs = w0 + hist + np.einsum("km,ma->ka", W[1:], v) / ga
    return float(np.abs(x.values[k0 + 1:] - rhs).max())


def solve_direct(problem: CauchyProblem, N: int) -> Solution:
    """Implicit product-integration march of the equivalent integral equation.

    The history contributes a fixed per-node vector (its Caputo density
    integrated against the memory kernel); the unknown part marches from
    t_star with an n x n solve per step, mirroring the field march.
    """
    if N < 1:
        raise DomainError("need N >= 1")
    t_start = time.perf_counter()
    alpha, n = problem.alpha, problem.n
    t = np.linspace(problem.t0, problem.theta, N + 1)
    h = (problem.theta - problem.t0) / N
    k0 = _star_index(problem, N)
    phi = problem.history.caputo_samples(alpha)
    hist = _history_integrals(phi, alpha, t[k0 + 1:])
    w0 = problem.w0
    Anodes = problem.A.at(t)
    bnodes = problem.b.at(t)
    ga = gamma(alpha)
    eye = np.eye(n)
    M = N - k0
    W = left_moment_weights(alpha, M, h)

    xv = np.empty((N + 1, n))
    xv[:k0 + 1] = _prefix_values(problem, t, k0)
    v = np.empty((M + 1, n))
    v[0] = Anodes[k0] @ xv[k0] + bnodes[k0]
    for k in range(1, M + 1):
        i = k0 + k
        rhs = w0 + hist[k - 1] + (W[k, :k] @ v[:k] + W[k, k] * bnodes[i]) / ga
        sys = eye - (W[k, k] / ga) * Anodes[i]
        try:
            xv[i] = np.linalg.solve(sys, rhs)
        except np.linalg.LinAlgError:
            raise SingularSystemError(
                f"self-weight system singular at step {k}; refine N") from None
        v[k] = Anodes[i] @ xv[i] + bnodes[i]

    x = GridFn(problem.t0, problem.theta, N, xv, PIECEWISE_LINEAR)
    meta = {"N": N, "residual": equation_residual(problem, x),
            "wall_time": time.perf_counter() - t_start}
    return Solution(x, METHOD_DIRECT, meta)


def _psi_defining(phi: GridFn, alpha, ts):
    """Continuation functional from its defining quadrature, at points ts.

    psi(t) = (sin(pi alpha)/pi) * integral over the start segment of
    (t_star - tau)^alpha phi(tau) / (t - tau).  The cusp factor at the
    segment's right end is carried by a Jacobi weight; at t == t_star the
    kernel gains an extra power and a matching rule takes over.  Accuracy
    degrades when 0 < t - t_star << h; callers use the proper-integral form
    for such points instead.
    """
    ts = np.asarray(ts, dtype=float)
    n = phi.value_shape[0]
    out = np.zeros((len(ts), n))
    if phi.N == 0:
        return out
    tstar, hh, Nh = phi.b, phi.h, phi.N
    c = math.sin(alpha * math.pi) / math.pi

    pts = []
    wts = []
    if Nh > 1:
        u, w = jacobi_rule_01(SMOOTH_NODES, 0.0, 0.0)
        base = phi.a + (np.arange(Nh - 1)[:, None] + u[None, :]) * hh
        pts.append(base.ravel())
        wts.append((w[None, :] * hh * (tstar - base) ** alpha).ravel())
    u, w = jacobi_rule_01(SINGULAR_NODES, 0.0, alpha)
    pts.append(tstar - hh * (1.0 - u))
    wts.append(w * hh ** (1.0 + alpha))
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    fvals = phi.sample(pts)

    at_star = np.abs(ts - tstar) <= 1e-12 * max(tstar - phi.a, 1.0)
    away = ~at_star
    ts_away = ts[away]
    if ts_away.size:
        chunks = []
        for lo in range(0, ts_away.size, _PSI_CHUNK):
            block = ts_away[lo:lo + _PSI_CHUNK]
            denom = block[:, None] - pts[None, :]
            chunks.append((wts[None, :] / denom) @ fvals)
        out[away] = c * np.concatenate(chunks)
    if at_star.any():
        # kernel power drops by one at the segment end; dedicated rule
        u0, w0 = jacobi_rule_01(SINGULAR_NODES, 0.0, alpha - 1.0)
        pts0 = tstar - hh * (1.0 - u0)
        val = (w0 * hh ** alpha) @ phi.sample(pts0)
        if Nh > 1:
            sm = slice(0, (Nh - 1) * SMOOTH_NODES)
            val = val + (wts[sm] / (tstar - pts[sm])) @ fvals[sm]
        out[at_star] = c * val
    return out


def _psi_from_history(w_star: GridFn, alpha, ts):
    """Continuation functional from the proper-integral identity.

    psi(t) = (t - t_star)^alpha * (alpha/Gamma(1-alpha)) * integral over the
    segment of (w(xi) - w(t0)) (t - xi)^(-1-alpha).  The hat moments of the
    inner kernel are elementary, so the only error is the segment's own
    piecewise-linear representation; the form stays accurate arbitrarily
    close to t_star, where the defining quadrature does not.
    """
    ts = np.asarray(ts, dtype=float)
    n = w_star.value_shape[0]
    out = np.zeros((len(ts), n))
    if w_star.N == 0:
        return out
    dw = w_star.values - w_star.values[0]
    tstar = w_star.b
    nodes = w_star.t
    pref = alpha / gamma(1.0 - alpha)
    span = max(tstar - w_star.a, 1.0)
    for idx, tt in enumerate(ts):
        if tt - tstar <= 1e-12 * span:
            out[idx] = dw[-1] / gamma(1.0 - alpha)
        else:
            wts = hypersingular_tail_weights(alpha, nodes, tt)
            out[idx] = pref * (tt - tstar) ** alpha * (wts @ dw)
    return out


def psi_star(phi: GridFn, alpha, target: GridFn) -> GridFn:
    """Continuation functional on a target grid starting at the segment end."""
    if abs(target.a - phi.b) > 1e-12 * max(abs(phi.b), 1.0):
        raise DomainError("target grid must start at the segment end")
    if phi.a == phi.b:
        vals = np.zeros((target.N + 1,) + phi.value_shape)
    else:
        vals = _psi_defining(phi, alpha, target.t)
    return GridFn(target.a, target.b, target.N, vals, PIECEWISE_LINEAR)


def b_star(problem: CauchyProblem, psi: GridFn) -> GridFn:
    """Modified forcing from the difference-quotient form.

    At the segment end the quotient is taken one-sided from the first
    subinterval; past it the subtraction removes the memory singularity
    analytically.
    """
    tstar = problem.t_star
    if abs(psi.a - tstar) > 1e-12 * max(abs(tstar), 1.0):
        raise DomainError("psi must live on [t_star, theta]")
    if psi.N < 1:
        raise DomainError("need at least one subinterval past t_star")
    t = psi.t
    h = psi.h
    alpha = problem.alpha
    bn = problem.b.at(t)
    dq = np.empty_like(psi.values)
    dq[0] = (psi.values[1] - psi.values[0]) / h ** alpha
    steps = (np.arange(1, psi.N + 1) * h) ** alpha
    dq[1:] = (psi.values[1:] - psi.values[0]) / steps[:, None]
    return GridFn(psi.a, psi.b, psi.N, dq + bn, PIECEWISE_LINEAR)


def _affine_part(field, k0, Anodes, bnodes, base_vec, W):
    """(Id + memory integral of F A) base + memory integral of F b,
    on targets t_star + k h for k = 0..M."""
    values = field.values
    n = base_vec.size
    M = W.shape[0] - 1
    eye = np.eye(n)
    out = np.empty((M + 1, n))
    out[0] = base_vec
    for k in range(1, M + 1):
        i = k0 + k
        Frow = values[i, k0:i + 1]
        FA = np.matmul(Frow, Anodes[k0:i + 1])
        SA = np.einsum("m,mab->ab", W[k, :k + 1], FA)
        Fb = np.einsum("mab,mb->ma", Frow, bnodes[k0:i + 1])
        out[k] = (eye + SA) @ base_vec + W[k, :k + 1] @ Fb
    return out


def _memory_term(field, k0, alpha, g_nodes, g_first1, g_first2):
    """Integral of F(t,.) g(.) (t-.)^(alpha-1) (.-t_star)^(-alpha) per target.

    g is piecewise linear on the grid except on the first subinterval, where
    exact point values at two fixed Jacobi families replace it (family 1 when
    the target is one step away and the second kernel factor is singular too,
    family 2 otherwise).  F itself stays piecewise linear throughout.
    """
    values = field.values
    N = field.grid.N
    M = N - k0
    n = g_nodes.shape[1]
    tabs = hat_moment_tables(M, -alpha, alpha - 1.0)
    sig0, sig1 = first_interval_moments(M, -alpha, alpha - 1.0)
    v1, w1 = jacobi_rule_01(SINGULAR_NODES, -alpha, alpha - 1.0)
    v2, w2 = jacobi_rule_01(SINGULAR_NODES, -alpha, 0.0)
    out = np.zeros((M + 1, n))
    for k in range(1, M + 1):
        i = k0 + k
        w = tabs[k].copy()
        w[0] -= sig0[k]
        w[1] -= sig1[k]
        Frow = values[i, k0:i + 1]
        term = np.einsum("m,mab,mb->a", w, Frow, g_nodes[:k + 1])
        if k == 1:
            vq, wq, gq = v1, w1, g_first1
        else:
            vq, wq, gq = v2, w2 * (k - v2) ** (alpha - 1.0), g_first2
        FPL = ((1.0 - vq)[:, None, None] * Frow[0]
               + vq[:, None, None] * Frow[1])
        out[k] = term + np.einsum("q,qab,qb->a", wq, FPL, gq)
    return out


def _assemble(problem, xv, method, t_start, extra=None):
    x = GridFn(problem.t0, problem.theta, xv.shape[0] - 1, xv, PIECEWISE_LINEAR)
    meta = {"N": xv.shape[0] - 1, "residual": equation_residual(problem, x),
            "wall_time": time.perf_counter() - t_start}
    if extra:
        meta.update(extra)
    return Solution(x, method, meta)


def _pc_values(problem, field):
    N = field.grid.N
    t = field.grid.t
    h = field.grid.h
    Anodes = problem.A.at(t)
    bnodes = problem.b.at(t)
    W = left_moment_weights(problem.alpha, N, h)
    return _affine_part(field, 0, Anodes, bnodes, problem.w0, W)


def represent_pc(problem: CauchyProblem, field: FundamentalField) -> Solution:
    """Representation formula for a start value given at t0 itself."""
    _check_field(problem, field)
    if _star_index(problem, field.grid.N) != 0:
        raise PreconditionError(
            "this formula requires the start segment to collapse to t0")
    t_start = time.perf_counter()
    return _assemble(problem, _pc_values(problem, field), METHOD_PC, t_start)


def represent_gc(problem: CauchyProblem, field: FundamentalField) -> Solution:
    """General representation: memory enters through the split modified
    forcing, with the continuation functional's cusp handled exactly."""
    _check_field(problem, field)
    t_start = time.perf_counter()
    N = field.grid.N
    k0 = _star_index(problem, N)
    if k0 == 0:
        return _assemble(problem, _pc_values(problem, field), METHOD_GC, t_start)

    alpha = problem.alpha
    t = field.grid.t
    h = field.grid.h
    phi = problem.history.caputo_samples(alpha)
    w_seg = problem.history.w_star
    psi_nodes = _psi_defining(phi, alpha, t[k0:])
    anchor = psi_nodes[0]
    v1, _ = jacobi_rule_01(SINGULAR_NODES, -alpha, alpha - 1.0)
    v2, _ = jacobi_rule_01(SINGULAR_NODES, -alpha, 0.0)
    g1 = _psi_from_history(w_seg, alpha, problem.t_star + h * v1) - anchor
    g2 = _psi_from_history(w_seg, alpha, problem.t_star + h * v2) - anchor
    mem = _memory_term(field, k0, alpha, psi_nodes - anchor, g1, g2)

    Anodes = problem.A.at(t)
    bnodes = problem.b.at(t)
    M = N - k0
    W = left_moment_weights(alpha, M, h)
    start_val = w_seg.values[-1]
    aff = _affine_part(field, k0, Anodes, bnodes, start_val, W)

    xv = np.empty((N + 1, problem.n))
    xv[k0:] = aff + mem
    xv[:k0 + 1] = _prefix_values(problem, t, k0)
    return _assemble(problem, xv, METHOD_GC, t_start)


def represent_gc_compact(problem: CauchyProblem,
                         field: FundamentalField) -> Solution:
    """Compact representation: consumes only the segment itself, never its
    Caputo density.  The middle term is not continuous at t_star, so that
    node is set from the start segment, not from the formula."""
    _check_field(problem, field)
    t_start = time.perf_counter()
    N = field.grid.N
    k0 = _star_index(problem, N)
    if k0 == 0:
        return _assemble(problem, _pc_values(problem, field),
                         METHOD_GC_COMPACT, t_start)

    alpha = problem.alpha
    t = field.grid.t
    h = field.grid.h
    w_seg = problem.history.w_star
    psi_nodes = _psi_from_history(w_seg, alpha, t[k0:])
    v1, _ = jacobi_rule_01(SINGULAR_NODES, -alpha, alpha - 1.0)
    v2, _ = jacobi_rule_01(SINGULAR_NODES, -alpha, 0.0)
    g1 = _psi_from_history(w_seg, alpha, problem.t_star + h * v1)
    g2 = _psi_from_history(w_seg, alpha, problem.t_star + h * v2)
    mem = _memory_term(field, k0, alpha, psi_nodes, g1, g2)

    Anodes = problem.A.at(t)
    bnodes = problem.b.at(t)
    M = N - k0
    W = left_moment_weights(alpha, M, h)
    aff = _affine_part(field, k0, Anodes, bnodes, problem.w0, W)

    xv = np.empty((N + 1, problem.n))
    xv[k0:] = aff + mem
    xv[k0] = w_seg.values[-1]
    xv[:k0 + 1] = _prefix_values(problem, t, k0)
    return _assemble(problem, xv, METHOD_GC_COMPACT, t_start)


def gc_compact_identity_residual(problem, field, steps):
    """Residual of the kernel identity linking the two general formulas.

    Id + integral of F A (t-.)^(alpha-1) must match 1/Gamma(1-alpha) times
    the integral of F (t-.)^(alpha-1) (.-t_star)^(-alpha); returns the max
    entry residual at each requested step count past t_star.
    """
    _check_field(problem, field)
    alpha = problem.alpha
    N = field.grid.N
    k0 = _star_index(problem, N)
    M = N - k0
    t = field.grid.t
    Anodes = problem.A.at(t)
    W = left_moment_weights(alpha, M, field.grid.h)
    tabs = hat_moment_tables(M, -alpha, alpha - 1.0)
    eye = np.eye(problem.n)
    ga1 = gamma(1.0 - alpha)
    out = []
    for k in steps:
        if not 1 <= k <= M:
            raise DomainError(f"step {k} outside 1..{M}")
        i = k0 + k
        Frow = field.values[i, k0:i + 1]
        lhs = eye + np.einsum("m,mab->ab",
                              W[k, :k + 1], np.matmul(Frow, Anodes[k0:i + 1]))
        rhs = np.einsum("m,mab->ab", tabs[k], Frow) / ga1
        out.append(float(np.abs(lhs - rhs).max()))
    return out
