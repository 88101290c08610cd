"""Stokes data of the deformed cubic oscillator.

The five subdominant solutions are produced by seeding WKB-decaying data
far out in each Stokes sector and integrating inward to a common
basepoint with an adaptive embedded Runge-Kutta scheme.  Fock-Goncharov
coordinates and Stokes multipliers are cross-ratios of the resulting
frame, computed from Wronskians; each frame vector enters any cross
ratio once in the numerator and once in the denominator, so the sign
ambiguity of continuing a solution around the apparent singularity
cancels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateQuadrilateral,
    NearApparentSingularity,
    PoleOfFlip,
    SeedBranchAmbiguous,
    StiffnessFailure,
)
from .model import ODESpec, curve_roots, curve_scale

__all__ = [
    "SubdominantFrame",
    "FGCoordinates",
    "integrate_schrodinger",
    "subdominant_frame",
    "fock_goncharov",
    "stokes_multipliers",
    "flip",
    "hbar_infinity_limit",
    "wronskian",
    "cross_ratio_frames",
]

RENORM_THRESHOLD = 1e100
DEFAULT_RTOL = 1e-10

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


@dataclass
class SubdominantFrame:
    """Solution vectors (y, y') of the five subdominant solutions at a
    common basepoint, with accumulated renormalization log-scales."""

    spec: ODESpec
    basepoint: complex
    vectors: list  # five ndarray(2) entries indexed by sector in Z/5
    log_scales: list
    seed_radius: float


@dataclass
class FGCoordinates:
    x1: complex
    x2: complex
    tag: tuple = ()  # stack of flips applied to the base triangulation


def _detour_path(start, end, obstacle, clearance_frac=0.05):
    """Straight path start->end, with a circular detour around obstacle
    when the segment passes too close."""
    seg = end - start
    L = abs(seg)
    if L == 0:
        return [start]
    t = ((obstacle - start) * seg.conjugate()).real / (L * L)
    rho = clearance_frac * max(abs(end - obstacle), 1e-3)
    if not (0.0 < t < 1.0):
        return [start, end]
    foot = start + t * seg
    d = abs(obstacle - foot)
    if d >= rho:
        return [start, end]
    # walk around the obstacle on an arc of radius rho
    if d < 1e-14:
        nhat = 1j * seg / L
        entry = foot - rho * 0 + 0j
        side = nhat
    else:
        side = (foot - obstacle) / d
    a_in = start + t * seg - foot  # zero; arc endpoints built from angles
    ang_mid = cmath.phase(side)
    enter = obstacle + rho * cmath.exp(1j * (ang_mid))
    # arc from projection of entry segment: go from angle of (start-side)
    ang0 = cmath.phase(start - obstacle)
    ang1 = cmath.phase(end - obstacle)
    # choose the arc passing through side direction
    def _arc(a0, a1, through):
        d1 = (a1 - a0) % (2 * math.pi)
        mid1 = a0 + 0.5 * d1
        d2 = d1 - 2 * math.pi
        mid2 = a0 + 0.5 * d2
        pick = d1 if abs((mid1 - through + math.pi) % (2 * math.pi) - math.pi) <= abs(
            (mid2 - through + math.pi) % (2 * math.pi) - math.pi
        ) else d2
        return [a0 + pick * k / 12 for k in range(13)]

    angles = _arc(ang0, ang1, ang_mid)
    pts = [start] + [obstacle + rho * cmath.exp(1j * ang) for ang in angles] + [end]
    return pts


def integrate_schrodinger(
    spec: ODESpec,
    path,
    init,
    rtol=DEFAULT_RTOL,
    atol=0.0,
    min_clearance=1e-6,
):
    """Integrate y'' = Q(x, hbar) y along a polyline.

    init is the vector (y, y') at path[0].  Returns (vector, log_scale):
    the solution is renormalized whenever its norm exceeds 1e100 and the
    accumulated log of the removed factors is reported separately.
    """
    Q = spec.potential()
    q = spec.point.q
    v = np.asarray(init, dtype=complex)
    log_scale = 0.0
    scale = curve_scale(spec.point.a, spec.point.b, q)
    for x0, x1 in zip(path[:-1], path[1:]):
        seg = x1 - x0
        L = abs(seg)
        if L == 0.0:
            continue
        # clearance check against the apparent singularity
        tfoot = ((q - x0) * seg.conjugate()).real / (L * L)
        tfoot = min(1.0, max(0.0, tfoot))
        if abs(q - (x0 + tfoot * seg)) < min_clearance * scale:
            raise NearApparentSingularity(
                f"path segment passes within {min_clearance * scale} of x = q"
            )
        u = seg / L

        def rhs(s, w):
            x = x0 + u * s
            return np.array([u * w[1], u * Q(x) * w[0]])

        s = 0.0
        # initial step from the local oscillation scale
        qq = abs(Q(x0 + 0.5 * seg))
        h = min(L, 0.5 / math.sqrt(qq) if qq > 0 else L)
        while s < L:
            h = min(h, L - s)
            if h < 1e-14 * L:
                raise StiffnessFailure("step size underflow")
            k = [None] * 7
            k[0] = rhs(s, v)
            for i in range(1, 7):
                acc = v + h * sum(
                    aij * k[j] for j, aij in enumerate(_DP_A[i])
                )
                k[i] = rhs(s + _DP_C[i] * h, acc)
            v5 = v + h * sum(b * k[i] for i, b in enumerate(_DP_B5) if b)
            v4 = v + h * sum(b * k[i] for i, b in enumerate(_DP_B4) if b)
            sc = np.max(np.abs(v5)) + atol
            err = np.max(np.abs(v5 - v4)) / (rtol * sc + 1e-300)
            if err <= 1.0:
                s += h
                v = v5
                n = np.max(np.abs(v))
                if n > RENORM_THRESHOLD:
                    v = v / n
                    log_scale += math.log(n)
            h *= min(4.0, max(0.1, 0.9 * err ** (-0.2)))
        # endpoint reached for this segment
    return v, log_scale


def _alpha1_at(spec: ODESpec, x, sqrt_q0):
    a, b, q, p, r = (
        spec.point.a,
        spec.point.b,
        spec.point.q,
        spec.point.p,
        spec.point.r,
    )
    q0p = 3.0 * x * x + a
    q0 = ((x + 0j) * x + a) * x + b
    q1 = p / (x - q) + r
    return -q0p / (4.0 * q0) + q1 / (2.0 * sqrt_q0)


def seed_radius(spec: ODESpec) -> float:
    """Radius where the cubic term dominates all corrections."""
    a, b, q, p, r = (
        spec.point.a,
        spec.point.b,
        spec.point.q,
        spec.point.p,
        spec.point.r,
    )
    h = abs(spec.hbar)
    base = curve_scale(a, b, q)
    cand = [
        base,
        h ** 0.4,
        (h * abs(r)) ** (1.0 / 3.0),
        (h * abs(r) / (2.0 * abs(p))) ** (2.0 / 3.0) if r != 0 else 0.0,
        (h * h * abs(r * r / (4.0 * p * p))) ** (1.0 / 3.0),
    ]
    return 8.0 * max(cand)


def subdominant_frame(spec: ODESpec, r_seed=None, basepoint=None, rtol=DEFAULT_RTOL):
    """Five subdominant solutions transported to a common basepoint.

    Sector k is seeded at r_seed times its center direction with the WKB
    value (y, y') = (1, hbar^{-1} alpha_0 + alpha_1) on the decaying
    branch, then integrated inward along the ray with a detour when the
    path passes near the apparent singularity.  Inward integration damps
    the seeding error, so the frame is insensitive to r_seed.
    """
    if r_seed is None:
        r_seed = seed_radius(spec)
    pt = spec.point
    if basepoint is None:
        # deterministic basepoint away from q and the roots
        scale = curve_scale(pt.a, pt.b, pt.q)
        cands = [
            0.45 * scale * cmath.exp(2j * math.pi * (k + 0.31) / 7) for k in range(7)
        ]
        basepoint = max(
            cands,
            key=lambda c: min(
                abs(c - pt.q), *(abs(c - z) for z in curve_roots(pt.a, pt.b))
            ),
        )
    vectors = []
    log_scales = []
    for k in range(5):
        d = spec.sector_direction(k)
        x_seed = r_seed * d
        q0 = ((x_seed + 0j) * x_seed + pt.a) * x_seed + pt.b
        root = cmath.sqrt(q0)
        # decaying branch: moving outward, d/d|x| log y must have Re < 0
        decay = (root / spec.hbar * d).real
        if abs(decay) < 1e-12 * abs(root / spec.hbar):
            raise SeedBranchAmbiguous(f"sector {k}: neither branch dominates")
        if decay > 0:
            root = -root
        dlog = root / spec.hbar + _alpha1_at(spec, x_seed, root)
        path = _detour_path(x_seed, basepoint, pt.q)
        vec, ls = integrate_schrodinger(spec, path, (1.0, dlog), rtol=rtol)
        n = np.max(np.abs(vec))
        vec = vec / n
        log_scales.append(ls + math.log(n))
        vectors.append(vec)
    return SubdominantFrame(
        spec=spec,
        basepoint=basepoint,
        vectors=vectors,
        log_scales=log_scales,
        seed_radius=r_seed,
    )


def wronskian(u, v):
    return u[0] * v[1] - u[1] * v[0]


def cross_ratio_frames(f1, f2, f3, f4):
    """CR(a1, a2, a3, a4) = (a1-a2)(a3-a4) / ((a1-a4)(a2-a3)) computed as
    a Wronskian ratio of the representing vectors."""
    num = wronskian(f1, f2) * wronskian(f3, f4)
    den = wronskian(f1, f4) * wronskian(f2, f3)
    if den == 0:
        raise DegenerateQuadrilateral("vanishing Wronskian in cross-ratio")
    return num / den


def fock_goncharov(frame: SubdominantFrame, distinguished_vertex=0) -> FGCoordinates:
    """Fock-Goncharov coordinates of the frame for the WKB triangulation
    with distinguished vertex l:

        X1 = CR(a_l, a_{l+1}, a_{l+2}, a_{l-2}),
        X2 = CR(a_l, a_{l+2}, a_{l-2}, a_{l-1}).
    """
    l = distinguished_vertex
    f = lambda j: frame.vectors[j % 5]
    x1 = cross_ratio_frames(f(l), f(l + 1), f(l + 2), f(l - 2))
    x2 = cross_ratio_frames(f(l), f(l + 2), f(l - 2), f(l - 1))
    return FGCoordinates(x1=x1, x2=x2, tag=())


def stokes_multipliers(frame: SubdominantFrame):
    """sigma_k = i CR(a_{k-1}, a_{k+1}, a_{k+2}, a_{k-2}) for k in Z/5."""
    f = lambda j: frame.vectors[j % 5]
    return [
        1j * cross_ratio_frames(f(k - 1), f(k + 1), f(k + 2), f(k - 2))
        for k in range(5)
    ]


def stokes_identity_residuals(frame: SubdominantFrame, distinguished_vertex=0):
    """Residuals of X1 = (-i sigma_{l-1})^{-1} and X2 = -i sigma_{l+1}."""
    fg = fock_goncharov(frame, distinguished_vertex)
    sig = stokes_multipliers(frame)
    l = distinguished_vertex
    r1 = fg.x1 - 1.0 / (-1j * sig[(l - 1) % 5])
    r2 = fg.x2 - (-1j) * sig[(l + 1) % 5]
    return abs(r1) / max(1.0, abs(fg.x1)), abs(r2) / max(1.0, abs(fg.x2))


def flip(fg: FGCoordinates, edge: int) -> FGCoordinates:
    """Coordinate change under flipping one internal edge.

    Forward maps (from the base triangulation):
      edge 1: (X1, X2) -> (1/X1, X2 (1 + 1/X1)^{-1})
      edge 2: (X1, X2) -> (X1 (1 + X2), 1/X2)
    Flipping the same edge again applies the inverse map, so flip o flip
    is the identity; the tag records the pending flips.
    """
    if edge not in (1, 2):
        raise ValueError("edge must be 1 or 2")
    x1, x2 = fg.x1, fg.x2
    if fg.tag and fg.tag[-1] == edge:
        # undo the most recent flip
        if edge == 1:
            if x1 == 0 or 1 + 1 / x1 == 0:
                raise PoleOfFlip("flip evaluated at its pole")
            new = FGCoordinates(1.0 / x1, x2 * (1.0 + x1), fg.tag[:-1])
        else:
            if x2 == 0 or 1 + 1 / x2 == 0:
                raise PoleOfFlip("flip evaluated at its pole")
            new = FGCoordinates(x1 / (1.0 + 1.0 / x2), 1.0 / x2, fg.tag[:-1])
        return new
    if edge == 1:
        if x1 == 0 or 1.0 + 1.0 / x1 == 0:
            raise PoleOfFlip("1 + 1/X1 = 0")
        return FGCoordinates(1.0 / x1, x2 / (1.0 + 1.0 / x1), fg.tag + (1,))
    if 1.0 + x2 == 0 or x2 == 0:
        raise PoleOfFlip("1 + X2 = 0")
    return FGCoordinates(x1 * (1.0 + x2), 1.0 / x2, fg.tag + (2,))


def hbar_infinity_limit():
    """Fock-Goncharov coordinates of the Z/5-symmetric limit monodromy.

    The limit configuration is projectively (0, 1, oo, x, x+1) with
    x^2 + x - 1 = 0; the root is selected to match the computed large
    hbar limit of the oscillator.
    """
    x = (-1.0 + math.sqrt(5.0)) / 2.0
    pts = _golden_configuration(x)
    frames = [np.array(v) for v in pts]
    x1 = cross_ratio_frames(frames[0], frames[1], frames[2], frames[-2])
    x2 = cross_ratio_frames(frames[0], frames[2], frames[-2], frames[-1])
    return FGCoordinates(x1=x1, x2=x2, tag=())


def _golden_configuration(x):
    """Projective 5-tuple (0, 1, oo, x, x+1) as C^2 vectors."""
    return [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (x, 1.0), (x + 1.0, 1.0)]
