"""Weierstrass elliptic functions and lattices of y^2 = x^3 + a x + b.

The curve dictionary is x = wp(u), y = wp'(u)/2, which forces the
invariants g2 = -4a, g3 = -4b.  Evaluation reduces u to a fundamental
cell, halves it into the radius of convergence of the Laurent series at
0, and applies duplication formulas; truncation is chosen so the
defining ODE wp'^2 = 4 wp^3 - g2 wp - g3 holds to ~1e-12 relative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchMismatch,
    NoConvergence,
    PoleAtLatticePoint,
)
from .model import check_curve, curve_roots
from .pathint import reference_branch, root_pair_integral

_N_SERIES = 14  # Laurent coefficients c_2 .. c_{N+1}
_HALVE_TARGET = 0.28  # halve u until |u| below this multiple of min |omega|


# ---------------------------------------------------------------------------
# lattice data


@dataclass(frozen=True)
class LatticeData:
    """Periods, quasi-periods and invariants of a curve lattice.

    omega1, omega2 span the lattice with Im(omega2/omega1) > 0; eta_i are
    the zeta quasi-periods on the same cycles, satisfying the Legendre
    relation omega2*eta1 - omega1*eta2 = 2*pi*i.
    """

    omega1: complex
    omega2: complex
    eta1: complex
    eta2: complex
    g2: complex
    g3: complex

    def legendre_defect(self) -> complex:
        return self.omega2 * self.eta1 - self.omega1 * self.eta2 - 2j * math.pi

    @property
    def curve(self):
        return (-self.g2 / 4.0, -self.g3 / 4.0)

    def reduced_basis(self):
        """Lagrange-reduced lattice basis (w1 shortest) and change matrix.

        Returns (w1, w2, M) with (w1, w2) = (omega1, omega2) @ M, M integer
        with det +-1.
        """
        w = np.array([self.omega1, self.omega2], dtype=complex)
        m = np.eye(2, dtype=np.int64)
        for _ in range(64):
            if abs(w[0]) > abs(w[1]):
                w = w[::-1]
                m = m[:, ::-1]
            mu = round((w[1] / w[0]).real) if False else None
            # minimize |w2 - k w1| over integers k
            k = round(((w[1] * w[0].conjugate()).real) / (abs(w[0]) ** 2))
            if k == 0:
                break
            w = np.array([w[0], w[1] - k * w[0]])
            m = m @ np.array([[1, -k], [0, 1]], dtype=np.int64)
        return w[0], w[1], m

    def nearest_lattice_point(self, u):
        """Closest lattice point to u, returned as (point, (m, n)) in the
        (omega1, omega2) basis."""
        w1, w2, mat = self.reduced_basis()
        det = w1 * w2.conjugate() - 0  # use real 2x2 solve instead
        arr = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
        coef = np.linalg.solve(arr, [u.real, u.imag])
        best = None
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                mm = round(coef[0]) + dm
                nn = round(coef[1]) + dn
                pt = mm * w1 + nn * w2
                d = abs(u - pt)
                if best is None or d < best[0]:
                    best = (d, pt, mm, nn)
        _, pt, mm, nn = best
        m_orig = mat @ np.array([mm, nn])
        return pt, (int(m_orig[0]), int(m_orig[1]))


# ---------------------------------------------------------------------------
# Laurent series machinery


def _series_coeffs(g2, g3, n=_N_SERIES):
    """c_k, k = 2..n+1, of wp(u) = u^-2 + sum c_k u^(2k-2)."""
    c = np.zeros(n + 2, dtype=complex)
    c[2] = g2 / 20.0
    c[3] = g3 / 28.0
    for k in range(4, n + 2):
        acc = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return c


def _series_eval(c, u):
    """wp, wp', zeta, log sigma from the Laurent series at small |u|."""
    u2 = u * u
    wp = 1.0 / u2
    wpp = -2.0 / (u2 * u)
    zeta = 1.0 / u
    logsig = cmath.log(u)
    upow = u2  # u^{2k-2} for k=2
    for k in range(2, len(c)):
        ck = c[k]
        wp += ck * upow
        wpp += ck * (2 * k - 2) * upow / u
        zeta -= ck * upow * u / (2 * k - 1)
        logsig -= ck * upow * u2 / ((2 * k) * (2 * k - 1))
        upow *= u2
    return wp, wpp, zeta, logsig


def _duplicate(g2, wp, wpp, zeta, logsig):
    """Values at 2u from values at u."""
    wp2d = 6.0 * wp * wp - 0.5 * g2  # wp''
    ratio = wp2d / (2.0 * wpp)
    wp_2 = ratio * ratio - 2.0 * wp
    # d/du of wp(2u) = 2 wp'(2u); differentiate the duplication formula
    wp3d = 12.0 * wp * wpp  # wp'''
    dratio = (wp3d * 2.0 * wpp - wp2d * 2.0 * wp2d) / (4.0 * wpp * wpp)
    wpp_2 = 0.5 * (2.0 * ratio * dratio - 2.0 * wpp)
    zeta_2 = 2.0 * zeta + ratio
    logsig_2 = 4.0 * logsig + cmath.log(-wpp)
    return wp_2, wpp_2, zeta_2, logsig_2


def wp_eval(u, L: LatticeData, pole_tol=1e-10):
    """Evaluate (wp, wp'/1, zeta, log sigma) at u for the lattice L.

    log sigma is well-defined up to 2*pi*i times an integer.  Raises
    PoleAtLatticePoint when u is within pole_tol of the lattice (relative
    to the shortest period).
    """
    u = complex(u)
    w1, _, _ = L.reduced_basis()
    lam, (m, n) = L.nearest_lattice_point(u)
    if abs(u - lam) < pole_tol * abs(w1):
        raise PoleAtLatticePoint(f"u = {u} is within {pole_tol} of the lattice")
    # shift to the representative nearest 0 (minimal |u0|)
    u0 = u - (m * L.omega1 + n * L.omega2)
    _, (m0, n0) = L.nearest_lattice_point(u0)
    # nearest point to u0 should now be 0; if not, shift again
    if (m0, n0) != (0, 0):
        u0 = u0 - (m0 * L.omega1 + n0 * L.omega2)
        m, n = m + m0, n + n0
    halvings = 0
    uh = u0
    target = _HALVE_TARGET * abs(w1)
    while abs(uh) > target:
        uh *= 0.5
        halvings += 1
    c = _series_coeffs(L.g2, L.g3)
    wp, wpp, zeta, logsig = _series_eval(c, uh)
    for _ in range(halvings):
        wp, wpp, zeta, logsig = _duplicate(L.g2, wp, wpp, zeta, logsig)
    if m or n:
        eta_shift = m * L.eta1 + n * L.eta2
        lam_shift = m * L.omega1 + n * L.omega2
        zeta = zeta + eta_shift
        logsig = (
            logsig
            + eta_shift * (u0 + 0.5 * lam_shift)
            + 1j * math.pi * (m + n + m * n)
        )
    return wp, wpp, zeta, logsig


def wp_value(u, L):
    return wp_eval(u, L)[0]


def wp_prime(u, L):
    return wp_eval(u, L)[1]


def zeta_value(u, L):
    return wp_eval(u, L)[2]


def log_sigma(u, L):
    return wp_eval(u, L)[3]


# ---------------------------------------------------------------------------
# lattice from a curve


@dataclass(frozen=True)
class CycleSpec:
    """A primitive cycle realized around the cut between two labeled roots.

    root_from/root_to index into curve_roots(a, b); sheet is the sign of
    y at the cut midpoint relative to the reference branch; orientation
    +1 traverses root_from -> root_to on that sheet.
    """

    root_from: int
    root_to: int
    sheet: int = +1
    orientation: int = +1


#: The two primitive cycles every homology class is expanded over: loops
#: around the cuts (root0, root1) and (root1, root2) in the deterministic
#: root order, on the reference sheet.
REF_CYCLES = (CycleSpec(0, 1), CycleSpec(1, 2))


def cycle_midpoint_branch(a, b, spec: CycleSpec, roots=None):
    if roots is None:
        roots = curve_roots(a, b)
    mid = 0.5 * (roots[spec.root_from] + roots[spec.root_to])
    return spec.sheet * reference_branch(a, b)(mid)


def _cycle_quadrature(f, a, b, spec: CycleSpec, roots=None):
    """ oint over a primitive cycle of an endpoint-integrable form
    f(x, y) dx, realized as twice the root-to-root segment integral."""
    if roots is None:
        roots = curve_roots(a, b)
    y_mid = cycle_midpoint_branch(a, b, spec, roots)
    val = root_pair_integral(
        f, a, b, roots[spec.root_from], roots[spec.root_to], y_mid
    )
    return 2.0 * spec.orientation * val


def reference_periods(f, a, b, roots=None):
    """ oint of f(x, y) dx over the two primitive reference cycles."""
    return np.array(
        [_cycle_quadrature(f, a, b, c, roots) for c in REF_CYCLES], dtype=complex
    )


def combo_period(f, a, b, combo, roots=None):
    """ oint over an integer combination combo = (m, n) of REF_CYCLES."""
    vals = reference_periods(f, a, b, roots)
    return combo[0] * vals[0] + combo[1] * vals[1]


def default_cycle_basis(a, b):
    """Deterministic basis with Im(omega2/omega1) > 0, as integer
    combinations of REF_CYCLES.

    The ratio tau = omega2/omega1 is shifted into Re(tau) in (-1/2, 1/2]
    so symmetric curves land on the classical lattice shapes (i for the
    square lattice, exp(i*pi/3) for the hexagonal one).
    """
    check_curve(a, b)
    o = reference_periods(lambda x, y: 1.0 / (2.0 * y), a, b)
    g1 = np.array([1, 0], dtype=np.int64)
    g2 = np.array([0, 1], dtype=np.int64)
    if (o[1] / o[0]).imag < 0:
        g2 = -g2
    tau = (g2 @ o) / (g1 @ o)
    shift = -math.floor(tau.real + 0.5)
    if (tau.real + shift) <= -0.5 + 1e-12:
        shift += 1
    g2 = g2 + shift * g1
    return (tuple(int(v) for v in g1), tuple(int(v) for v in g2))


def lattice_from_curve(a, b, basis=None) -> LatticeData:
    """Periods and quasi-periods of dx/2y over the given cycle basis.

    omega_i = oint dx/2y, eta_i = -oint x dx/2y, both by branch-tracked
    quadrature over basis cycles given as integer combinations of
    REF_CYCLES.  With a basis of intersection +1 the Legendre relation
    omega2*eta1 - omega1*eta2 = 2*pi*i holds; the defect is checked to
    1e-10.
    """
    check_curve(a, b)
    if basis is None:
        basis = default_cycle_basis(a, b)
    c1, c2 = (np.asarray(c, dtype=np.int64) for c in basis)
    o = reference_periods(lambda x, y: 1.0 / (2.0 * y), a, b)
    e = -reference_periods(lambda x, y: x / (2.0 * y), a, b)
    omega1, omega2 = c1 @ o, c2 @ o
    eta1, eta2 = c1 @ e, c2 @ e
    L = LatticeData(omega1, omega2, eta1, eta2, g2=-4.0 * a, g3=-4.0 * b)
    if (omega2 / omega1).imag <= 0:
        raise ValueError("cycle basis is not positively oriented")
    defect = abs(L.legendre_defect())
    if defect > 1e-10 * max(1.0, abs(omega1 * eta1)):
        raise NoConvergence(f"Legendre relation defect {defect:.3e}")
    return L


def quasi_periods_from_series(L: LatticeData):
    """eta_i = 2 zeta(omega_i / 2) computed from the series alone."""
    out = []
    for w in (L.omega1, L.omega2):
        c = _series_coeffs(L.g2, L.g3)
        uh = 0.5 * w
        halvings = 0
        w1, _, _ = L.reduced_basis()
        while abs(uh) > _HALVE_TARGET * abs(w1):
            uh *= 0.5
            halvings += 1
        wp, wpp, zeta, logsig = _series_eval(c, uh)
        for _ in range(halvings):
            wp, wpp, zeta, logsig = _duplicate(L.g2, wp, wpp, zeta, logsig)
        out.append(2.0 * zeta)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# inversion of wp


def wp_inverse(q, p, L: LatticeData, tol=1e-12, max_iter=60):
    """Point v in the fundamental cell with wp(v) = q and wp'(v) = 2p.

    Newton refinement from a coarse grid seed.  Raises BranchMismatch if
    the solved point matches neither +-p, NoConvergence if Newton stalls.
    """
    a, b = L.curve
    res = p * p - (q**3 + a * q + b)
    if abs(res) > 1e-8 * max(1.0, abs(p) ** 2, abs(q) ** 3):
        raise BranchMismatch(f"(q, p) off the curve by {abs(res):.3e}")
    w1, w2, _ = L.reduced_basis()
    scale = max(1.0, abs(q))

    best = None
    for su in np.linspace(0.08, 0.92, 11):
        for sv in np.linspace(0.08, 0.92, 11):
            u = su * w1 + sv * w2
            try:
                wp, wpp, _, _ = wp_eval(u, L)
            except PoleAtLatticePoint:
                continue
            d = abs(wp - q)
            if best is None or d < best[0]:
                best = (d, u)
    if best is None:
        raise NoConvergence("no usable grid seed for wp inversion")
    u = best[1]
    for _ in range(max_iter):
        wp, wpp, _, _ = wp_eval(u, L)
        err = wp - q
        if abs(err) < tol * scale:
            break
        if wpp == 0:
            u += 0.03 * w1
            continue
        step = err / wpp
        limit = 0.45 * abs(w1)
        if abs(step) > limit:
            step *= limit / abs(step)
        u = u - step
    else:
        raise NoConvergence("Newton for wp inversion did not converge")
    wp, wpp, _, _ = wp_eval(u, L)
    if abs(wp - q) > 1e-9 * scale:
        raise NoConvergence(f"wp inversion residual {abs(wp - q):.3e}")
    half = 0.5 * wpp
    pscale = max(1.0, abs(p))
    if abs(half - p) <= 1e-7 * pscale:
        v = u
    elif abs(half + p) <= 1e-7 * pscale:
        v = -u
    else:
        raise BranchMismatch(
            f"wp'(v)/2 = {half} matches neither +-p = +-{p}"
        )
    # move to the fundamental cell representative nearest 0
    lam, (m, n) = L.nearest_lattice_point(v)
    return v - (m * L.omega1 + n * L.omega2)
