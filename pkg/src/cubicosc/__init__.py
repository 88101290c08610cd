"""Numerical monodromy and wall-crossing data of the deformed cubic oscillator.

The equation is y''(x) = Q(x, hbar) y(x) with

    Q = Q0/hbar^2 + Q1/hbar + Q2,
    Q0 = x^3 + a x + b,
    Q1 = p/(x - q) + r,
    Q2 = 3/(4(x-q)^2) + r/(2p(x-q)) + r^2/(4 p^2),

specified by a point (a, b, q, p, r) with p^2 = q^3 + a q + b.  The
package computes its Stokes data (Fock-Goncharov coordinates), periods,
abelian holonomy, WKB/Voros expansions, BPS/wall-crossing structures and
the associated Riemann-Hilbert verification.
"""

from .model import FramePoint, ODESpec, curve_roots, discriminant
from .elliptic import (
    CycleSpec,
    LatticeData,
    default_cycle_basis,
    lattice_from_curve,
    wp_eval,
    wp_inverse,
)

__all__ = [
    "FramePoint",
    "ODESpec",
    "curve_roots",
    "discriminant",
    "CycleSpec",
    "LatticeData",
    "default_cycle_basis",
    "lattice_from_curve",
    "wp_eval",
    "wp_inverse",
]

__version__ = "0.1.0"
