"""Contours, cycle integrals and residues on y^2 = x^3 + a x + b.

Homology classes are carried as integer combinations of the two primitive
reference cycles (elliptic.REF_CYCLES).  The generic realization of a
primitive cycle is a stadium-shaped loop around its branch cut, traversed
with a continuously tracked sqrt branch; it works for integrands with
poles of any order at the branch points, unlike the collapsed segment
quadrature used in elliptic.lattice_from_curve (the two agree for
endpoint-integrable forms, which the tests exploit as a cross-check).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .elliptic import REF_CYCLES, CycleSpec, default_cycle_basis
from .errors import QuadratureFailure, SingularityTooClose
from .model import check_curve, curve_roots, curve_scale
from .pathint import (
    integrate_polyline,
    reference_branch,
    transport_branch,
)
from .ratfun import AlgebraicFunction

__all__ = [
    "Contour",
    "CycleSpec",
    "cycle_integral",
    "default_cycle_basis",
    "intersection_sign",
    "period_map",
    "residue_at",
    "stadium_contour",
]


@dataclass
class Contour:
    """Polyline with the sqrt branch value at its first node.

    windings around marked points (if recorded) are informational only;
    the integrands used here are either residue-free or canonical modulo
    the recorded ambiguity.
    """

    nodes: list
    y_start: complex
    closed: bool = False
    windings: dict = field(default_factory=dict)


def _as_callable(f):
    if isinstance(f, AlgebraicFunction):
        return lambda x, y: f(x, y)
    return f


def _segment_distance(p, a, b):
    """Distance from point p to the segment [a, b]."""
    u = b - a
    L2 = abs(u) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * u.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * u))


def stadium_contour(a, b, spec: CycleSpec, avoid=(), n_arc=24) -> Contour:
    """Closed loop around the cut of a primitive cycle.

    The loop keeps clearance from the third root; points listed in avoid
    (e.g. the apparent singularity q) additionally shrink the half-width
    when they sit close to the cut.
    """
    roots = curve_roots(a, b)
    A = roots[spec.root_from]
    B = roots[spec.root_to]
    others = [roots[k] for k in range(3) if k not in (spec.root_from, spec.root_to)]
    u = B - A
    uhat = u / abs(u)
    nhat = 1j * uhat
    delta = 0.35 * abs(u)
    for c in others:
        delta = min(delta, 0.55 * _segment_distance(c, A, B))
    for q in avoid:
        dq = _segment_distance(q, A, B)
        if dq < delta and dq > 1e-9 * abs(u):
            delta = min(delta, 0.45 * dq)
    if delta <= 1e-7 * abs(u):
        raise QuadratureFailure("no room for a cycle realization around the cut")

    mid = 0.5 * (A + B)
    nodes = [mid + delta * nhat]
    nodes += [A + t * u + delta * nhat for t in np.linspace(0.6, 1.0, 5)[:-1]]
    # semicircle around B from +nhat side to -nhat side, passing B + delta*uhat
    phi0 = cmath.phase(nhat)
    for k in range(n_arc + 1):
        ang = phi0 - math.pi * k / n_arc
        nodes.append(B + delta * cmath.exp(1j * ang))
    nodes += [A + t * u - delta * nhat for t in np.linspace(0.9, 0.1, 9)]
    # semicircle around A from -nhat side back to +nhat side via A - delta*uhat
    phi1 = cmath.phase(-nhat)
    for k in range(n_arc + 1):
        ang = phi1 - math.pi * k / n_arc
        nodes.append(A + delta * cmath.exp(1j * ang))
    nodes += [A + t * u + delta * nhat for t in np.linspace(0.1, 0.5, 5)]

    y_ref = spec.sheet * reference_branch(a, b)(mid)
    y0 = transport_branch(a, b, mid, y_ref, nodes[0], roots)
    if spec.orientation < 0:
        nodes = nodes[::-1]
    return Contour(nodes=nodes, y_start=y0, closed=True)


def cycle_integral(f, a, b, cycle, avoid=(), tol=1e-12):
    """Branch-tracked integral of f(x, y) dx over a cycle or contour.

    cycle may be a Contour, a primitive CycleSpec, or an integer
    combination (m, n) of the reference cycles.  Closed contours check
    that the branch returns to its start value.
    """
    f = _as_callable(f)
    if isinstance(cycle, Contour):
        nodes = list(cycle.nodes)
        if cycle.closed and nodes[0] != nodes[-1]:
            nodes.append(nodes[0])
        val, y_end = integrate_polyline(f, a, b, nodes, cycle.y_start, tol)
        if cycle.closed:
            ok = abs(y_end - cycle.y_start) <= 1e-6 * max(1.0, abs(y_end))
            flip = abs(y_end + cycle.y_start) <= 1e-6 * max(1.0, abs(y_end))
            if not (ok or flip):
                raise QuadratureFailure("branch did not return consistently")
        return val
    if isinstance(cycle, CycleSpec):
        return cycle_integral(f, a, b, stadium_contour(a, b, cycle, avoid), (), tol)
    m, n = cycle
    total = 0.0 + 0.0j
    if m:
        total += m * cycle_integral(f, a, b, REF_CYCLES[0], avoid, tol)
    if n:
        total += n * cycle_integral(f, a, b, REF_CYCLES[1], avoid, tol)
    return total


def intersection_sign(a, b):
    """Intersection number <c01, c12> of the two reference cycles (+-1).

    For an ordered basis of the curve the pairing is +1 exactly when the
    ratio of dx/2y periods lies in the upper half plane (Riemann
    bilinear relations), which decides the sign without any homotopy
    bookkeeping.  The pairing of integer combinations follows by
    bilinearity: <c, c'> = det([[m, n], [m', n']]) * <c01, c12>.
    """
    from .elliptic import reference_periods

    o = reference_periods(lambda x, y: 1.0 / (2.0 * y), a, b)
    return 1 if (o[1] / o[0]).imag > 0 else -1


def pairing(a, b, combo1, combo2, ref_sign=None):
    if ref_sign is None:
        ref_sign = intersection_sign(a, b)
    det = combo1[0] * combo2[1] - combo1[1] * combo2[0]
    return int(det) * ref_sign


def period_map(a, b, basis=None):
    """Central charges z_i = oint_{gamma_i} sqrt(Q0) dx over the basis.

    Satisfies dz_i/da = -eta_i and dz_i/db = omega_i against
    lattice_from_curve on the same basis.
    """
    check_curve(a, b)
    if basis is None:
        basis = default_cycle_basis(a, b)
    from .elliptic import reference_periods

    vals = reference_periods(lambda x, y: y, a, b)
    c1, c2 = (np.asarray(c) for c in basis)
    return complex(c1 @ vals), complex(c2 @ vals)


# ---------------------------------------------------------------------------
# residues


def _finite_pole_candidates(f: AlgebraicFunction):
    out = []
    for den in (f.a_part.den, f.b_part.den):
        if len(den) > 1:
            out.extend(np.roots(den[::-1]))
    return out


def _circle_nodes(center, radius, turns, n=48):
    steps = int(n * turns)
    return [
        center + radius * cmath.exp(2j * math.pi * k / n) for k in range(steps + 1)
    ]


def residue_at(f, a, b, point, y_at_point=None, radius=None, tol=1e-12):
    """Residue of the 1-form f dx at a point of the curve.

    point is an x-value for a regular curve point (then y_at_point picks
    the sheet), the string 'branch:k' for the k-th root, or 'infinity'.
    Residues at ramification points integrate around the doubled circle.
    """
    fc = _as_callable(f)
    roots = curve_roots(a, b)
    scale = curve_scale(a, b)
    poles = _finite_pole_candidates(f) if isinstance(f, AlgebraicFunction) else []

    if point == "infinity":
        R = 25.0 * scale
        nodes = _circle_nodes(0.0, R, 2)
        y0 = reference_branch(a, b)(nodes[0])
        val, y_end = integrate_polyline(fc, a, b, nodes, y0, tol)
        if abs(y_end - y0) > 1e-6 * abs(y0):
            raise QuadratureFailure("branch inconsistency on the infinity loop")
        return -val / (2j * math.pi)

    if isinstance(point, str) and point.startswith("branch:"):
        k = int(point.split(":", 1)[1])
        center = roots[k]
        others = [roots[j] for j in range(3) if j != k]
        far_poles = [z for z in poles if abs(z - center) > 1e-6 * scale]
        clear = min(abs(center - z) for z in others + far_poles)
        rho = radius or 0.25 * clear
        if rho <= 1e-9 * scale:
            raise SingularityTooClose("no room for a residue circle at the root")
        nodes = _circle_nodes(center, rho, 2)
        y0 = reference_branch(a, b)(nodes[0])
        val, y_end = integrate_polyline(fc, a, b, nodes, y0, tol)
        if abs(y_end - y0) > 1e-6 * max(1.0, abs(y0)):
            raise QuadratureFailure("branch inconsistency on the root loop")
        return val / (2j * math.pi)

    x0 = complex(point)
    if y_at_point is None:
        y_at_point = reference_branch(a, b)(x0)
    clear = min(abs(x0 - z) for z in roots)
    for z in poles:
        if abs(z - x0) > 1e-6 * scale:
            clear = min(clear, abs(z - x0))
    rho = radius if radius is not None else 0.3 * clear
    if rho <= 1e-10 * scale:
        raise SingularityTooClose(f"another singularity within {clear:.3e} of {x0}")
    y0 = transport_branch(a, b, x0, y_at_point, x0 + rho, roots)
    nodes = _circle_nodes(x0, rho, 1)
    val, y_end = integrate_polyline(fc, a, b, nodes, y0, tol)
    if abs(y_end - y0) > 1e-6 * max(1.0, abs(y0)):
        raise QuadratureFailure("branch inconsistency on the residue circle")
    return val / (2j * math.pi)
