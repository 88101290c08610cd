"""Branch-tracked path integration on the curve y^2 = x^3 + a x + b.

The square root y = sqrt(Q0(x)) is two-valued; integrands are functions
f(x, y).  Along any polyline we fix y at the start node and continue it by
sign-continuity, keeping sample spacing small against the distance to the
nearest branch point.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import BranchTrackingLoss, QuadratureFailure
from .model import curve_roots

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_nodes(n):
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GAUSS_CACHE[n]


def q0_val(a, b, x):
    return ((x + 0j) * x + a) * x + b


def reference_branch(a, b):
    """Branch of sqrt(Q0) with cuts on leftward rays from the roots.

    Returns f(x); f has Re f -> +infinity for x -> +infinity on the real
    axis (the 'lower sheet' normalization).
    """
    roots = curve_roots(a, b)

    def f(x):
        out = 1.0 + 0.0j
        for e in roots:
            out *= cmath.sqrt(x - e)
        return out

    return f


def _continue_sign(y_prev, y_new_abs_branch):
    """Pick +-y_new closest to y_prev; raise if ambiguous."""
    d_plus = abs(y_new_abs_branch - y_prev)
    d_minus = abs(-y_new_abs_branch - y_prev)
    y = y_new_abs_branch if d_plus <= d_minus else -y_new_abs_branch
    if abs(y - y_prev) > 0.6 * max(abs(y), abs(y_prev), 1e-300):
        raise BranchTrackingLoss(
            f"sqrt branch jump too large near x-value with |y|={abs(y):.3e}"
        )
    return y


class BranchTracker:
    """Continuation state of y = sqrt(Q0) along a sampled path."""

    def __init__(self, a, b, x0, y0):
        self.a = a
        self.b = b
        self.x = complex(x0)
        self.y = complex(y0)

    def advance(self, x_new):
        y_raw = cmath.sqrt(q0_val(self.a, self.b, x_new))
        self.y = _continue_sign(self.y, y_raw)
        self.x = complex(x_new)
        return self.y


def _segment_quad(f, a, b, x0, x1, y_start, n):
    """One Gauss pass over [x0, x1]; returns (integral, y at x1)."""
    nodes, weights = gauss_nodes(n)
    mid = 0.5 * (x0 + x1)
    half = 0.5 * (x1 - x0)
    tracker = BranchTracker(a, b, x0, y_start)
    total = 0.0 + 0.0j
    for t, w in zip(nodes, weights):
        x = mid + half * t
        y = tracker.advance(x)
        total += w * f(x, y)
    y_end = tracker.advance(x1)
    return total * half, y_end


def integrate_segment(f, a, b, x0, x1, y_start, tol=1e-12, roots=None, depth=0):
    """Adaptive branch-tracked integral of f(x, y) dx over a straight segment.

    Returns (integral, y at x1).  Splits when the segment is long compared
    with the distance to the nearest branch point, and refines until two
    quadrature levels agree.
    """
    if roots is None:
        roots = curve_roots(a, b)
    if depth > 40:
        raise QuadratureFailure("segment refinement exceeded depth budget")
    length = abs(x1 - x0)
    if length == 0.0:
        return 0.0 + 0.0j, y_start
    mid = 0.5 * (x0 + x1)
    clear = min(min(abs(z - e) for e in roots) for z in (x0, mid, x1))
    if length > 0.5 * clear and clear > 0:
        i1, y_mid = integrate_segment(f, a, b, x0, mid, y_start, tol, roots, depth + 1)
        i2, y_end = integrate_segment(f, a, b, mid, x1, y_mid, tol, roots, depth + 1)
        return i1 + i2, y_end
    coarse, _ = _segment_quad(f, a, b, x0, x1, y_start, 16)
    fine, y_end = _segment_quad(f, a, b, x0, x1, y_start, 32)
    if abs(fine - coarse) <= tol * max(1.0, abs(fine)):
        return fine, y_end
    i1, y_mid = integrate_segment(f, a, b, x0, mid, y_start, tol, roots, depth + 1)
    i2, y_end = integrate_segment(f, a, b, mid, x1, y_mid, tol, roots, depth + 1)
    return i1 + i2, y_end


def integrate_polyline(f, a, b, nodes, y_start, tol=1e-12):
    """Branch-tracked integral over a polyline; returns (integral, y_end)."""
    roots = curve_roots(a, b)
    total = 0.0 + 0.0j
    y = complex(y_start)
    for x0, x1 in zip(nodes[:-1], nodes[1:]):
        part, y = integrate_segment(f, a, b, x0, x1, y, tol, roots)
        total += part
    return total, y


def transport_branch(a, b, x_from, y_from, x_to, roots=None):
    """Continue y = sqrt(Q0) from x_from to x_to along the straight segment."""
    if roots is None:
        roots = curve_roots(a, b)
    steps = 8
    while True:
        tracker = BranchTracker(a, b, x_from, y_from)
        try:
            for k in range(1, steps + 1):
                x = x_from + (x_to - x_from) * k / steps
                clear = min(abs(x - e) for e in roots)
                if clear < 1e-12:
                    raise BranchTrackingLoss("transport path passes through a root")
                tracker.advance(x)
            return tracker.y
        except BranchTrackingLoss:
            steps *= 2
            if steps > 4096:
                raise


def root_pair_integral(f, a, b, root_from, root_to, y_mid, n=64, max_n=512):
    """ integral_{root_from}^{root_to} f(x, y) dx along the straight segment.

    Uses x = c + h sin(t) so inverse-square-root endpoint behaviour of f
    becomes analytic; y is fixed by matching the supplied midpoint branch
    value y_mid and is evaluated as tau * i*h*cos(t) * sqrt(x - x_other).
    """
    roots = curve_roots(a, b)
    d = [min(abs(root_from - e), abs(root_to - e)) for e in roots]
    other = roots[int(np.argmax(d))]
    c = 0.5 * (root_from + root_to)
    h = 0.5 * (root_to - root_from)

    def g(t):
        # sqrt(x(t) - other), continuous on the segment (other is off it)
        return cmath.sqrt(c + h * cmath.sin(t) - other)

    # (x-A)(x-B) = -h^2 cos^2 t, so y = tau * 1j*h*cos(t)*g(t), tau = +-1
    g0 = g(0.0)
    y_mid_plus = 1j * h * g0
    tau = 1.0 if abs(y_mid_plus - y_mid) <= abs(-y_mid_plus - y_mid) else -1.0
    if abs(tau * y_mid_plus - y_mid) > 1e-6 * max(abs(y_mid), 1e-300):
        raise BranchTrackingLoss("midpoint branch value inconsistent with curve")

    prev = None
    while n <= max_n:
        nodes, weights = gauss_nodes(n)
        total = 0.0 + 0.0j
        # continuity of g along t: sample densely in order
        g_prev = g(-np.pi / 2)
        for t, w in zip(nodes * (np.pi / 2), weights * (np.pi / 2)):
            gv = cmath.sqrt(c + h * cmath.sin(t) - other)
            if abs(gv - g_prev) > abs(gv + g_prev):
                gv = -gv
            g_prev = gv
            x = c + h * cmath.sin(t)
            y = tau * 1j * h * cmath.cos(t) * gv
            total += w * f(x, y) * h * cmath.cos(t)
        if prev is not None and abs(total - prev) <= 1e-13 * max(1.0, abs(total)):
            return total
        prev = total
        n *= 2
    if prev is None:
        raise QuadratureFailure("root_pair_integral failed")
    return prev
