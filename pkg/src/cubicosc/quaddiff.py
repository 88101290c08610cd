"""Horizontal trajectories of Q0 dx^2, WKB triangulations and BPS data.

Trajectories of phase theta are the curves along which Im(e^{-i pi theta}
int sqrt(Q0) dx) is constant.  Tracing runs at unit speed, dx/dt =
e^{i pi theta} |y|/y with the sqrt branch y continued along the path;
this reparameterizes dx/dt = e^{i pi theta}/sqrt(Q0) without changing
the trajectory.

Saddle connections are located in two ways: by predicting the connection
phase of a candidate homology class from its period and confirming with
a trace (fast path), or by scanning phases in a unit interval for
separatrix endpoint switches and bisecting (independent oracle).  The
measured complex length identifies the class by rounding in the period
lattice of the two reference cycles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curvealg import pairing
from .elliptic import reference_periods
from .errors import (
    Inconclusive,
    NonGenericPoint,
    NotSaddleFree,
    StepBudgetExceeded,
)
from .model import check_curve, curve_roots

WALL_IM_THRESHOLD = 1e-6
CAPTURE_FACTOR = 1e-6  # of root spacing: "trajectory hits a zero"
ESCAPE_FACTOR = 14.0


@dataclass
class TraceResult:
    kind: str  # 'sector' | 'zero' | 'budget'
    index: int  # sector k or zero index
    w_integral: complex  # int sqrt(Q0) dx up to termination
    closest: list  # per-zero closest approach distance
    w_at_closest: list  # per-zero int sqrt(Q0) dx at closest approach
    points: list


@dataclass
class TrajectoryReport:
    zeros: list
    endpoints: dict  # (zero index, ray index) -> ('sector', k) | ('zero', j)
    saddle_free: bool
    phase: float
    n_strips: int = 0
    n_half_planes: int = 0


@dataclass
class WKBTriangulationData:
    """Pentagon triangulation carried by the horizontal strips.

    edges: the two internal edges as vertex pairs in Z/5, sharing the
    distinguished vertex l as (l, l+2) and (l, l-2).  classes: integer
    combinations of the reference cycles for (gamma1, gamma2), oriented
    so Im(e^{-i pi phase} z_i) > 0, ordered so <gamma1, gamma2> = +1.
    chamber: sign of Im(z2/z1).
    """

    edges: tuple
    classes: tuple
    z: tuple
    chamber: int
    distinguished_vertex: int
    zero_triangles: dict
    saddle_phases: tuple
    phase: float = 0.0


@dataclass
class BPSStructureA2:
    pairing_12: int
    z: tuple  # central charges of (gamma1, gamma2)
    omega: dict  # combos in the (gamma1, gamma2) basis -> invariant
    basis: tuple  # reference-cycle combos of gamma1, gamma2
    chamber: int


def _zero_ray_dirs(c1, phase):
    """Directions of the three separatrices at a simple zero, Q0'(z)=c1."""
    base = (math.pi * phase - cmath.phase(c1) / 2.0) * (2.0 / 3.0)
    return [cmath.exp(1j * (base + 2.0 * math.pi * m / 3.0)) for m in range(3)]


def _sector_index(x, phase):
    """Escape sector: arg x is near (2 pi phase + 2 pi k) / 5."""
    k = (5.0 * cmath.phase(x) - 2.0 * math.pi * phase) / (2.0 * math.pi)
    return int(round(k)) % 5


def _root_geometry(a, b):
    roots = curve_roots(a, b)
    spacing = min(
        abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)
    )
    scale = max(1.0, max(abs(z) for z in roots))
    return roots, spacing, scale


def trace_horizontal(
    a,
    b,
    start,
    direction=None,
    phase=0.0,
    h_base=0.06,
    capture=None,
    escape=None,
    budget=60000,
    record=False,
):
    """Trace one phase-theta trajectory until escape or zero capture.

    start may be a regular point or a zero of Q0 (then direction picks
    one of the three local rays and tracing begins just off the zero).
    """
    roots, spacing, scale = _root_geometry(a, b)
    cap = capture if capture is not None else CAPTURE_FACTOR * spacing
    R = escape if escape is not None else ESCAPE_FACTOR * scale
    rot = cmath.exp(1j * math.pi * phase)

    def q0(z):
        return ((z + 0j) * z + a) * z + b

    x = complex(start)
    start_zero = None
    dists = [abs(x - z) for z in roots]
    jmin = int(np.argmin(dists))
    if dists[jmin] < 1e-9 * scale:
        start_zero = jmin
        eps = min(2e-4 * spacing, 1e-3 * scale)
        x = roots[jmin] + eps * direction

    y = cmath.sqrt(q0(x))
    if direction is not None:
        if abs(rot * abs(y) / y - direction) > abs(-rot * abs(y) / y - direction):
            y = -y

    w_acc = 0.0 + 0.0j
    closest = [abs(x - z) for z in roots]
    w_at_closest = [w_acc] * 3
    points = [x] if record else []
    release_r = 10.0 * max(cap, 3e-4 * spacing)
    released = start_zero is None

    def track(ybr, znew):
        yn = cmath.sqrt(q0(znew))
        return yn if abs(yn - ybr) <= abs(yn + ybr) else -yn

    for _ in range(budget):
        dmin = min(abs(x - z) for z in roots)
        h = min(h_base * scale, 0.35 * dmin + 0.02 * cap, 0.3 * abs(x) + h_base)
        y1 = y
        k1 = rot * abs(y1) / y1
        x2 = x + 0.5 * h * k1
        y2 = track(y1, x2)
        k2 = rot * abs(y2) / y2
        x3 = x + 0.5 * h * k2
        y3 = track(y2, x3)
        k3 = rot * abs(y3) / y3
        x4 = x + h * k3
        y4 = track(y3, x4)
        k4 = rot * abs(y4) / y4
        x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        w_acc += (h / 6.0) * (y1 * k1 + 2.0 * y2 * k2 + 2.0 * y3 * k3 + y4 * k4)
        y = track(y, x_new)
        x = x_new
        if record:
            points.append(x)
        if not released and abs(x - roots[start_zero]) > release_r:
            released = True
        for j in range(3):
            d = abs(x - roots[j])
            if d < closest[j]:
                closest[j] = d
                w_at_closest[j] = w_acc
            if d < cap and (released or j != start_zero):
                return TraceResult("zero", j, w_acc, closest, w_at_closest, points)
        if abs(x) > R:
            return TraceResult(
                "sector", _sector_index(x, phase), w_acc, closest, w_at_closest, points
            )
    return TraceResult("budget", -1, w_acc, closest, w_at_closest, points)


def separatrices(a, b, phase=0.0, **kw):
    """Trace the three separatrices from each zero."""
    roots, _, _ = _root_geometry(a, b)
    out = {}
    for j in range(3):
        c1 = 3.0 * roots[j] ** 2 + a
        for m, d in enumerate(_zero_ray_dirs(c1, phase)):
            out[(j, m)] = trace_horizontal(a, b, roots[j], d, phase, **kw)
    return out


def classify(a, b, phase=0.0, **kw) -> TrajectoryReport:
    """Separatrix structure of the phase-theta foliation.

    saddle_free means no separatrix connects two zeros; then the plane
    decomposes into 5 half planes and 2 horizontal strips and the
    separatrix targets form a pentagon triangulation.
    """
    check_curve(a, b)
    roots = list(curve_roots(a, b))
    traces = separatrices(a, b, phase, **kw)
    endpoints = {}
    saddle_free = True
    for key, tr in traces.items():
        if tr.kind == "budget":
            raise StepBudgetExceeded(f"separatrix {key} did not terminate")
        if tr.kind == "zero":
            endpoints[key] = ("zero", tr.index)
            saddle_free = False
        else:
            endpoints[key] = ("sector", tr.index)
    report = TrajectoryReport(
        zeros=roots, endpoints=endpoints, saddle_free=saddle_free, phase=phase
    )
    if saddle_free:
        tris = _zero_triangles(endpoints)
        _validate_triangulation(tris)
        report.n_strips = 2
        report.n_half_planes = 5
    return report


def _zero_triangles(endpoints):
    tris = {}
    for (j, _), (kind, idx) in endpoints.items():
        if kind == "sector":
            tris.setdefault(j, set()).add(idx)
    return tris


def _validate_triangulation(tris):
    if len(tris) != 3 or any(len(t) != 3 for t in tris.values()):
        raise Inconclusive(f"separatrix targets do not form triangles: {tris}")
    edge_count = {}
    for t in tris.values():
        tt = sorted(t)
        for e in [(tt[0], tt[1]), (tt[1], tt[2]), (tt[0], tt[2])]:
            edge_count[e] = edge_count.get(e, 0) + 1
    internal = [e for e, c in edge_count.items() if c == 2]
    boundary = [e for e, c in edge_count.items() if c == 1]
    if len(internal) != 2 or len(boundary) != 5:
        raise Inconclusive(f"unexpected edge multiplicities: {edge_count}")
    for u, v in boundary:
        if (v - u) % 5 not in (1, 4):
            raise Inconclusive(f"boundary edge {(u, v)} is not a pentagon side")
    return internal


# ---------------------------------------------------------------------------
# saddle connections


def _phase_lift(z, base_phase):
    """Phase theta in (base, base+1] with arg z = pi * theta (mod 2 pi)."""
    t = cmath.phase(z) / math.pi
    while t <= base_phase:
        t += 2.0
    while t > base_phase + 2.0:
        t -= 2.0
    return t


def confirm_saddle(a, b, combo, base_phase=0.0, ref_z=None, **kw):
    """Check whether the class combo carries a saddle connection.

    The candidate phase is fixed by the exact period of the class; the
    separatrices of each zero are traced at that phase and a connection
    is accepted when a trace captures another zero with matching length.
    Returns {'theta', 'zeros', 'z', 'combo'} or None.
    """
    roots, spacing, _ = _root_geometry(a, b)
    if ref_z is None:
        ref_z = reference_periods(lambda x, y: y, a, b)
    z_combo = combo[0] * ref_z[0] + combo[1] * ref_z[1]
    # orient into the scanned phase window
    theta = _phase_lift(z_combo, base_phase)
    if theta > base_phase + 1.0:
        z_combo = -z_combo
        combo = (-combo[0], -combo[1])
        theta = _phase_lift(z_combo, base_phase)
    cap = kw.pop("capture", 1e-3 * spacing)
    for j in range(3):
        c1 = 3.0 * roots[j] ** 2 + a
        for d in _zero_ray_dirs(c1, theta):
            tr = trace_horizontal(
                a, b, roots[j], d, theta, capture=cap, h_base=0.03, **kw
            )
            if tr.kind != "zero" or tr.index == j:
                continue
            z_meas = 2.0 * tr.w_at_closest[tr.index]
            for sgn in (1.0, -1.0):
                if abs(sgn * z_meas - z_combo) < 2e-2 * max(1.0, abs(z_combo)):
                    return {
                        "theta": theta,
                        "zeros": frozenset((j, tr.index)),
                        "z": z_combo,
                        "combo": combo,
                    }
    return None


def candidate_classes(max_coeff=3):
    out = []
    for m in range(-max_coeff, max_coeff + 1):
        for n in range(-max_coeff, max_coeff + 1):
            if (m, n) != (0, 0) and (m > 0 or (m == 0 and n > 0)):
                out.append((m, n))
    return out


def finite_trajectories(
    a, b, base_phase=0.0, method="candidates", max_coeff=3, n_scan=72, **kw
):
    """Saddle connections with phase in (base_phase, base_phase + 1).

    method 'candidates' confirms lattice classes at their predicted
    phases; method 'scan' finds separatrix endpoint switches on a phase
    grid and bisects them (independent of any period data).
    """
    check_curve(a, b)
    ref_z = reference_periods(lambda x, y: y, a, b)
    if method == "candidates":
        found = []
        cands = sorted(
            candidate_classes(max_coeff),
            key=lambda c: abs(c[0] * ref_z[0] + c[1] * ref_z[1]),
        )
        for combo in cands:
            hit = confirm_saddle(a, b, combo, base_phase, ref_z, **kw)
            if hit is not None:
                found.append(hit)
        found.sort(key=lambda f: f["theta"])
        return found
    if method != "scan":
        raise ValueError(f"unknown method {method!r}")
    return _finite_trajectories_scan(a, b, base_phase, n_scan, ref_z, **kw)


def _finite_trajectories_scan(a, b, base_phase, n_scan, ref_z, bisect_iters=44, **kw):
    roots, spacing, _ = _root_geometry(a, b)

    def endpoint(j, m, phase):
        c1 = 3.0 * roots[j] ** 2 + a
        d = _zero_ray_dirs(c1, phase)[m]
        return trace_horizontal(a, b, roots[j], d, phase, **kw)

    grid = np.linspace(base_phase, base_phase + 1.0, n_scan + 2)[1:-1]
    prev = {key: tr for key, tr in separatrices(a, b, grid[0], **kw).items()}
    events = []
    for t0, t1 in zip(grid[:-1], grid[1:]):
        cur = separatrices(a, b, t1, **kw)
        for key in prev:
            e0, e1 = prev[key], cur[key]
            switched = (
                e0.kind != e1.kind
                or (e0.kind == "sector" and e0.index != e1.index)
            )
            if switched:
                events.append((t0, t1, key))
        prev = cur

    found = []
    for t0, t1, (j, m) in events:
        lo, hi = t0, t1
        e_lo = endpoint(j, m, lo)
        if e_lo.kind == "zero":
            theta = lo
        else:
            for _ in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                e_mid = endpoint(j, m, mid)
                if e_mid.kind == "zero":
                    lo = hi = mid
                    break
                if e_mid.kind == "sector" and e_mid.index == e_lo.index:
                    lo, e_lo = mid, e_mid
                else:
                    hi = mid
            theta = 0.5 * (lo + hi)
        fine = endpoint(j, m, theta)
        others = [jj for jj in range(3) if jj != j]
        target = min(others, key=lambda jj: fine.closest[jj])
        if fine.kind == "zero":
            target = fine.index
        if fine.closest[target] > 1e-3 * spacing:
            continue
        z = 2.0 * fine.w_at_closest[target]
        if _phase_lift(z, base_phase) > base_phase + 1.0:
            z = -z
        dup = any(
            f["zeros"] == frozenset((j, target))
            and abs(f["z"] - z) < 1e-2 * max(1.0, abs(z))
            for f in found
        )
        if dup:
            continue
        combo, resid = _round_class(z, ref_z)
        found.append(
            {
                "theta": theta,
                "zeros": frozenset((j, target)),
                "z": combo[0] * ref_z[0] + combo[1] * ref_z[1]
                if resid < 2e-2 * max(1.0, abs(z))
                else z,
                "combo": combo if resid < 2e-2 * max(1.0, abs(z)) else None,
            }
        )
    found.sort(key=lambda f: f["theta"])
    return found


def _round_class(z, ref_z):
    arr = np.array(
        [[ref_z[0].real, ref_z[1].real], [ref_z[0].imag, ref_z[1].imag]]
    )
    coef = np.linalg.solve(arr, [z.real, z.imag])
    mn = np.round(coef).astype(int)
    resid = abs(mn[0] * ref_z[0] + mn[1] * ref_z[1] - z)
    return (int(mn[0]), int(mn[1])), resid


# ---------------------------------------------------------------------------
# WKB triangulation and BPS structure


def wkb_triangulation(a, b, phase=0.0, **kw) -> WKBTriangulationData:
    """Triangulation, edge classes and chamber of a saddle-free phase.

    The internal edges are (l, l+2) and (l, l-2) for the distinguished
    vertex l; their classes are measured from the saddle connections of
    the two strips and normalized so Im z_i > 0 (relative to the phase)
    and <gamma1, gamma2> = +1.
    """
    report = classify(a, b, phase, **kw)
    if not report.saddle_free:
        raise NotSaddleFree(f"phase {phase} carries a saddle connection")
    tris = _zero_triangles(report.endpoints)
    internal = _validate_triangulation(tris)
    common = set(internal[0]) & set(internal[1])
    if len(common) != 1:
        raise Inconclusive(f"internal edges {internal} share no unique vertex")
    l = common.pop()
    e1 = (l, (l + 2) % 5)
    e2 = (l, (l - 2) % 5)
    tri_sets = {j: frozenset(t) for j, t in tris.items()}
    zmap = {v: k for k, v in tri_sets.items()}
    mid_tri = frozenset((l, (l + 2) % 5, (l - 2) % 5))
    tri_a = frozenset((l, (l + 1) % 5, (l + 2) % 5))
    tri_b = frozenset((l, (l - 1) % 5, (l - 2) % 5))
    if set(zmap) != {mid_tri, tri_a, tri_b}:
        raise Inconclusive(f"triangles {tri_sets} do not form the fan at {l}")
    z_mid, z_a, z_b = zmap[mid_tri], zmap[tri_a], zmap[tri_b]

    ref_z = reference_periods(lambda x, y: y, a, b)
    needed = [frozenset((z_a, z_mid)), frozenset((z_mid, z_b))]
    cands = sorted(
        candidate_classes(3),
        key=lambda c: abs(c[0] * ref_z[0] + c[1] * ref_z[1]),
    )
    results = {}
    for combo in cands:
        if all(p in results for p in needed):
            break
        hit = confirm_saddle(a, b, combo, phase, ref_z, **kw)
        if hit is not None and hit["zeros"] in needed and hit["zeros"] not in results:
            results[hit["zeros"]] = hit
    missing = [p for p in needed if p not in results]
    if missing:
        for f in _finite_trajectories_scan(a, b, phase, 72, ref_z, **kw):
            if f["zeros"] in needed and f["combo"] is not None:
                results.setdefault(f["zeros"], f)
    missing = [p for p in needed if p not in results]
    if missing:
        raise Inconclusive(f"no saddle found for zero pairs {missing}")

    g1 = results[needed[0]]
    g2 = results[needed[1]]
    if pairing(a, b, g1["combo"], g2["combo"]) != 1:
        raise Inconclusive("triangulation basis does not have intersection +1")
    z1, z2 = g1["z"], g2["z"]
    chamber = 1 if (z2 / z1).imag > 0 else -1
    return WKBTriangulationData(
        edges=(e1, e2),
        classes=(g1["combo"], g2["combo"]),
        z=(z1, z2),
        chamber=chamber,
        distinguished_vertex=l,
        zero_triangles=tris,
        saddle_phases=(g1["theta"], g2["theta"]),
        phase=phase,
    )


def bps_invariants(a, b, tri: WKBTriangulationData | None = None) -> BPSStructureA2:
    """A2 BPS invariants at a generic point.

    Chamber Im(z2/z1) > 0: support {+-gamma1, +-gamma2}; chamber
    Im(z2/z1) < 0: additionally +-(gamma1 + gamma2); all invariants 1.
    """
    if tri is None:
        tri = wkb_triangulation(a, b)
    z1, z2 = tri.z
    im = (z2 / z1).imag
    if abs(im) < WALL_IM_THRESHOLD:
        raise NonGenericPoint(f"Im(z2/z1) = {im} below the wall threshold")
    omega = {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
    if im < 0:
        omega[(1, 1)] = 1
        omega[(-1, -1)] = 1
    return BPSStructureA2(
        pairing_12=1, z=tri.z, omega=omega, basis=tri.classes, chamber=tri.chamber
    )


def central_charge(bps: BPSStructureA2, combo):
    return combo[0] * bps.z[0] + combo[1] * bps.z[1]


def active_rays(bps: BPSStructureA2):
    """Rays through Z(gamma) for active gamma, deduplicated, sorted.

    Returns a list of (angle in [0, 2 pi), [combos on the ray]).
    """
    rays = {}
    for combo, om in bps.omega.items():
        if om == 0:
            continue
        z = central_charge(bps, combo)
        ang = cmath.phase(z) % (2.0 * math.pi)
        for known in rays:
            if abs((ang - known + math.pi) % (2.0 * math.pi) - math.pi) < 1e-9:
                rays[known].append(combo)
                break
        else:
            rays[ang] = [combo]
    return sorted(rays.items())


def trajectory_csv_rows(points):
    """(x_re, x_im) rows for plotting exported trajectories."""
    return [(z.real, z.imag) for z in points]
