"""Independent reference values for G(t, 0, 0) with V = -v 1{|x| < R}.

The resolvent (lam - Lap - V)^{-1} at the origin solves a piecewise constant
ODE in closed form; G follows by numerical Laplace inversion (Talbot contour,
mpmath). A shift sigma keeps every singularity left of the contour when V > 0.
"""
import math

import mpmath as mp


def _invert(F, t, sigma):
    with mp.workdps(30):
        val = mp.invertlaplace(lambda lam: F(lam + sigma), t, method="talbot")
        return float(val * mp.exp(sigma * t))


def well_ratio_1d(v: float, t: float, R: float = 1.0) -> float:
    """G/g at (t, 0, 0) in d = 1 for V = -v on |x| < R."""
    def F(lam):
        k0, k1 = mp.sqrt(lam), mp.sqrt(lam + v)
        c, s = mp.cosh(k1 * R), mp.sinh(k1 * R)
        return (k1 * c + k0 * s) / (2 * k1 * (k1 * s + k0 * c))
    g = (4 * math.pi * t) ** -0.5
    return _invert(F, t, max(0.0, -v) + 0.25) / g


def well_ratio_3d(v: float, t: float, R: float = 1.0) -> float:
    """G/g at (t, 0, 0) in d = 3 for V = -v on |x| < R, via the s-wave regular part of G - g."""
    def F(lam):
        k0, k1 = mp.sqrt(lam), mp.sqrt(lam + v)
        beta = (k1 - k0) * mp.exp(-k1 * R) / (k1 * mp.cosh(k1 * R) + k0 * mp.sinh(k1 * R))
        return ((beta - 1) * k1 + k0) / (4 * mp.pi)
    g = (4 * math.pi * t) ** -1.5
    return 1.0 + _invert(F, t, max(0.0, -v) + 0.25) / g
