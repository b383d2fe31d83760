"""Weakly singular integral operators on uniform grids.

Implements the left/right fractional integral of order alpha, the Caputo
derivative (L1 difference scheme), the scale-invariant auxiliary kernel K,
and the R and J operators built from it.  All operators consume and produce
GridFn data under the piecewise-linear contract; structured singular factors
are always carried by quadrature weights or closed-form moments, never
sampled directly.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import hyp2f1

from .errors import DomainError, GridMismatchError
from .gridfn import GridFn
from .quadrules import (
    KERNEL_NODES,
    hat_moment_tables,
    jacobi_rule_01,
    left_moment_weights,
)
from .special import gamma

# geometric grading used near the singular end of the R-operator integrals
_GRADE_LEVELS = 20
_GRADE_NODES = 8
_TAIL_NODES = 4
# below this tau/xi ratio the fixed kernel rule loses accuracy to the nearby
# pole and evaluation switches to the hypergeometric closed form
_KERNEL_SMALL_RATIO = 0.02


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"order alpha must lie in (0, 1), got {alpha}")
    return alpha


@dataclass
class OpConstants:
    """Sharp constants attached to the operator family at a given order."""

    alpha: float
    H_I: float  # Hoelder constant of the fractional integral
    M_R: float  # uniform bound of the R operator
    M_J: float  # growth constant of the J operator
    H_J: float  # Hoelder constant of the J operator


def op_constants(alpha: float) -> OpConstants:
    alpha = _check_alpha(alpha)
    H_I = 2.0 / gamma(alpha + 1.0)
    M_R = math.sin(alpha * math.pi) / (alpha * math.pi)
    M_J = 1.0 + M_R
    return OpConstants(alpha=alpha, H_I=H_I, M_R=M_R, M_J=M_J, H_J=M_J * H_I)


def beta_sym(alpha: float) -> float:
    """Beta function at (alpha, alpha)."""
    return gamma(alpha) ** 2 / gamma(2.0 * alpha)


def _reflect(fn: GridFn) -> GridFn:
    return GridFn(fn.a, fn.b, fn.N, fn.values[::-1].copy())


def _flat(values):
    n_nodes = values.shape[0]
    return values.reshape(n_nodes, -1)


def fractional_integral(phi: GridFn, alpha: float, side: str = "left") -> GridFn:
    """Riemann-Liouville fractional integral of the piecewise-linear data.

    side="left" anchors at a (value 0 there), side="right" anchors at b.
    Moments of the singular factor are closed-form, so the result is exact
    for affine phi up to rounding.
    """
    alpha = _check_alpha(alpha)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if side == "right":
        return _reflect(fractional_integral(_reflect(phi), alpha, "left"))
    if phi.N == 0:
        return GridFn(phi.a, phi.b, 0, np.zeros_like(phi.values))
    W = left_moment_weights(alpha, phi.N, phi.h)
    out = (W @ _flat(phi.values)) / gamma(alpha)
    return GridFn(phi.a, phi.b, phi.N, out.reshape(phi.values.shape))


def caputo_derivative(x: GridFn, alpha: float) -> GridFn:
    """L1 scheme for the Caputo derivative of order alpha.

    Node 0, where the derivative is only defined almost everywhere, carries
    the k = 1 value so the result stays a total GridFn.  Exact for affine x.
    """
    alpha = _check_alpha(alpha)
    if x.N < 1:
        raise GridMismatchError("caputo_derivative needs at least 2 nodes")
    N, h = x.N, x.h
    flat = _flat(x.values)
    dx = flat[1:] - flat[:-1]
    seq = np.arange(N + 1, dtype=float) ** (1.0 - alpha)
    g = seq[1:] - seq[:-1]
    scale = h ** (-alpha) / gamma(2.0 - alpha)
    out = np.empty_like(flat)
    for k in range(1, N + 1):
        out[k] = scale * (g[k - 1::-1] @ dx[:k])
    out[0] = out[1]
    return GridFn(x.a, x.b, N, out.reshape(x.values.shape))


def _kernel_profile(s: np.ndarray, alpha: float) -> np.ndarray:
    """E(s) = int_0^1 eta^a (1-eta)^(-a) (s + eta(1-s))^(-a) deta, s in (0, 1].

    E is the scale-free profile of K: K(xi, tau) = tau^(alpha-1) xi^(-alpha)
    E(tau/xi).  The fixed 64-node Jacobi rule handles s away from 0; for
    s < _KERNEL_SMALL_RATIO the integrand's pole at eta = -s/(1-s) crowds the
    interval and the Euler-integral hypergeometric form takes over.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    big = s >= _KERNEL_SMALL_RATIO
    if np.any(big):
        u, w = jacobi_rule_01(KERNEL_NODES, alpha, -alpha)
        sb = s[big][:, None]
        out[big] = ((sb + u[None, :] * (1.0 - sb)) ** (-alpha)) @ w
    if np.any(~big):
        sl = s[~big]
        pref = alpha * math.pi / math.sin(alpha * math.pi)
        out[~big] = pref * sl ** (-alpha) * hyp2f1(alpha, 1.0 + alpha, 2.0, 1.0 - 1.0 / sl)
    return out


def kernel_K(xi: float, tau: float, alpha: float) -> float:
    """Scale-invariant kernel of the R operators, K(c*xi, c*tau) = K(xi, tau)/c.

    Defined for 0 < tau < xi (DomainError otherwise); nonnegative; bounded by
    1/((1-alpha) tau^(1-alpha)) on xi = 1.
    """
    alpha = _check_alpha(alpha)
    xi = float(xi)
    tau = float(tau)
    if not (xi > 0.0 and 0.0 < tau < xi):
        raise DomainError(f"kernel_K requires 0 < tau < xi, got tau={tau}, xi={xi}")
    s = tau / xi
    return float(tau ** (alpha - 1.0) * xi ** (-alpha) * _kernel_profile(np.array([s]), alpha)[0])


def _r_grading(k: int):
    """Geometric pieces of [0, 1/k] toward 0: ratio 1/2, _GRADE_LEVELS levels.

    Returns the smooth pieces plus the innermost cut, whose algebraic weight
    is handled by a dedicated rule in the caller.
    """
    pieces = []
    upper = 1.0 / k
    for _ in range(_GRADE_LEVELS):
        lower = upper / 2.0
        pieces.append((lower, upper))
        upper = lower
    return pieces, upper


def r_operator(phi: GridFn, alpha: float, side: str = "left") -> GridFn:
    """R operator: prefactor (1-alpha) sin(alpha pi)/pi against the kernel K.

    By homogeneity each node value reduces to a fixed-interval integral
    c_alpha * int_0^1 u^(alpha-1) E(u) phi(a + (t-a)u) du, evaluated with
    grid-aligned panels, geometric grading toward u = 0, and an innermost
    panel carrying the algebraic weight.  The base node holds the operator's
    right-limit (alpha B(alpha, alpha) - 1) phi(a), which keeps the result
    continuous for continuous phi and the uniform bound valid at every node.
    """
    alpha = _check_alpha(alpha)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if side == "right":
        return _reflect(r_operator(_reflect(phi), alpha, "left"))
    if phi.N == 0:
        limit = (alpha * beta_sym(alpha) - 1.0)
        return GridFn(phi.a, phi.b, 0, limit * phi.values.copy())

    N = phi.N
    c_alpha = (1.0 - alpha) * math.sin(alpha * math.pi) / math.pi
    gl_u, gl_w = jacobi_rule_01(_GRADE_NODES, 0.0, 0.0)
    tail_u, tail_w = jacobi_rule_01(_TAIL_NODES, alpha - 1.0, 0.0)
    sm_u, sm_w = jacobi_rule_01(10, 0.0, 0.0)

    out = np.empty_like(phi.values)
    out[0] = (alpha * beta_sym(alpha) - 1.0) * phi.values[0]
    for k in range(1, N + 1):
        pieces, eps = _r_grading(k)
        us = []
        ws = []
        for lo, hi in pieces:
            width = hi - lo
            uu = lo + width * gl_u
            us.append(uu)
            ws.append(gl_w * width * uu ** (alpha - 1.0))
        # innermost piece [0, eps]: weight u^(alpha-1) carried by the rule
        uu = eps * tail_u
        us.append(uu)
        ws.append(tail_w * eps ** alpha)
        if k > 1:
            j = np.arange(1, k, dtype=float)[:, None]
            uu = (j + sm_u[None, :]) / k
            us.append(uu.ravel())
            ws.append((sm_w[None, :] / k * uu ** (alpha - 1.0)).ravel())
        u_all = np.concatenate(us)
        w_all = np.concatenate(ws) * _kernel_profile(u_all, alpha)
        samples = phi.sample(phi.a + (k * phi.h) * u_all)
        out[k] = c_alpha * np.tensordot(w_all, samples, axes=(0, 0))
    return GridFn(phi.a, phi.b, N, out)


def j_operator(phi: GridFn, alpha: float, side: str = "left") -> GridFn:
    """J operator: doubly weighted product integration on the normalized interval.

    After tau = a + (t-a)u the node value is ((t-a)^alpha / gamma(alpha)) times
    the integral of u^(alpha-1) (1-u)^(alpha-1) against phi, evaluated with the
    shared hat-moment tables; the value at the anchor endpoint is 0.
    """
    alpha = _check_alpha(alpha)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if side == "right":
        return _reflect(j_operator(_reflect(phi), alpha, "left"))
    if phi.N == 0:
        return GridFn(phi.a, phi.b, 0, np.zeros_like(phi.values))
    N, h = phi.N, phi.h
    tables = hat_moment_tables(N, alpha - 1.0, alpha - 1.0)
    flat = _flat(phi.values)
    out = np.zeros_like(flat)
    ga = gamma(alpha)
    for k in range(1, N + 1):
        out[k] = ((k * h) ** alpha / ga) * (tables[k] @ flat[: k + 1])
    return GridFn(phi.a, phi.b, N, out.reshape(phi.values.shape))
