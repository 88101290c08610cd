"""Base point types for the deformed cubic oscillator."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurve

DISCRIMINANT_TOL = 1e-12
CONSTRAINT_TOL = 1e-10


def discriminant(a, b):
    return 4.0 * a**3 + 27.0 * b**2


def curve_roots(a, b):
    """Roots of x^3 + a x + b in a deterministic order."""
    r = np.roots([1.0, 0.0, complex(a), complex(b)])
    order = np.lexsort((np.round(r.imag, 12), np.round(r.real, 12)))
    return r[order]


def curve_scale(a, b, *extra):
    """Characteristic length scale: max of 1 and all relevant |x|'s."""
    vals = [1.0] + [abs(z) for z in curve_roots(a, b)] + [abs(z) for z in extra]
    return max(vals)


def check_curve(a, b, tol=DISCRIMINANT_TOL):
    disc = discriminant(a, b)
    scale = max(1.0, abs(a) ** 3, abs(b) ** 2)
    if abs(disc) < tol * scale:
        raise DegenerateCurve(f"discriminant {disc} too small for (a,b)=({a},{b})")
    return disc


@dataclass(frozen=True)
class FramePoint:
    """Point (a, b, q, p, r) with p^2 = q^3 + a q + b, p != 0, disc != 0."""

    a: complex
    b: complex
    q: complex
    p: complex
    r: complex = 0.0

    def __post_init__(self):
        check_curve(self.a, self.b)
        res = self.p**2 - (self.q**3 + self.a * self.q + self.b)
        scale = max(1.0, abs(self.p) ** 2, abs(self.q) ** 3)
        if abs(res) > CONSTRAINT_TOL * scale:
            raise ValueError(f"p^2 = q^3 + a q + b violated by {res}")
        if self.p == 0:
            raise ValueError("p = 0 is excluded")

    @property
    def s(self):
        return (self.a, self.b)

    def rescale(self, lam: complex) -> "FramePoint":
        """Action with weights (4, 6, 2, 3, 1) on (a, b, q, p, r)."""
        return FramePoint(
            self.a * lam**4,
            self.b * lam**6,
            self.q * lam**2,
            self.p * lam**3,
            self.r * lam,
        )

    def reduce_r(self, hbar: complex) -> "FramePoint":
        """Equivalent point with r = 0 defining the same equation."""
        a, b, q, p, r = self.a, self.b, self.q, self.p, self.r
        return FramePoint(
            a,
            b + r * hbar + r**2 * hbar**2 / (4 * p**2),
            q,
            p + r * hbar / (2 * p),
            0.0,
        )


def frame_point_on_curve(a, b, q, r=0.0, sign=+1):
    """Build a FramePoint by solving for p on the chosen branch."""
    p = cmath.sqrt(q**3 + a * q + b)
    if sign < 0:
        p = -p
    return FramePoint(a, b, q, p, r)


def apparent_singularity_residual(m: FramePoint, hbar: complex) -> complex:
    """Defect of (p/h + r/2p)^2 = (q^3+aq+b)/h^2 + r/h + r^2/4p^2 (== 0 on M)."""
    lhs = (m.p / hbar + m.r / (2 * m.p)) ** 2
    rhs = (m.q**3 + m.a * m.q + m.b) / hbar**2 + m.r / hbar + m.r**2 / (4 * m.p**2)
    return lhs - rhs


@dataclass(frozen=True)
class ODESpec:
    """FramePoint plus hbar and a real lift theta of arg(hbar).

    theta picks the fifth root of hbar^2: Stokes sector k is centered on
    the direction exp(i*(2*theta + 2*pi*k)/5).  theta must equal arg(hbar)
    up to a multiple of 2*pi.
    """

    point: FramePoint
    hbar: complex
    theta: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.hbar == 0:
            raise ValueError("hbar must be nonzero")
        theta = self.theta
        if theta is None:
            theta = cmath.phase(self.hbar)
        k = round((theta - cmath.phase(self.hbar)) / (2 * math.pi))
        if abs(theta - cmath.phase(self.hbar) - 2 * math.pi * k) > 1e-9:
            raise ValueError("theta is not a lift of arg(hbar)")
        object.__setattr__(self, "theta", float(theta))

    @property
    def fifth_root_branch(self) -> int:
        """Label shift induced by the chosen lift of arg(hbar), mod 5."""
        k = round((self.theta - cmath.phase(self.hbar)) / (2 * math.pi))
        return k % 5

    def sector_direction(self, k: int) -> complex:
        return cmath.exp(1j * (2.0 * self.theta + 2.0 * math.pi * k) / 5.0)

    def potential(self):
        """Q(x, hbar) as a closure of one complex argument."""
        a, b, q, p, r = (
            self.point.a,
            self.point.b,
            self.point.q,
            self.point.p,
            self.point.r,
        )
        h = self.hbar
        ih = 1.0 / h
        ih2 = ih * ih
        c_lin = r / (2.0 * p)
        c_const = r**2 / (4.0 * p**2)

        def Q(x):
            d = x - q
            return (
                ih2 * ((x * x + a) * x + b)
                + ih * (p / d + r)
                + 0.75 / (d * d)
                + c_lin / d
                + c_const
            )

        return Q

    def rescale(self, lam: complex) -> "ODESpec":
        """Weight-(4,6,2,3,1) rescale with hbar weight 5 (same equation in
        rescaled x); lam real positive keeps theta."""
        if abs(lam.imag if isinstance(lam, complex) else 0.0) > 0:
            raise ValueError("only real positive lam keeps the sector labels")
        lam = float(lam.real if isinstance(lam, complex) else lam)
        return ODESpec(self.point.rescale(lam), self.hbar * lam**5, self.theta)
