"""Tidal potential of a triaxial satellite and its time-Fourier coefficients.

The (dimensionless) Newtonian potential felt by an equatorially elongated
satellite on a Keplerian orbit is

    V(x, t) = -cos(2x - 2 f_e(t)) / (2 rho_e(t)^3),

with x the orientation angle and (rho_e, f_e) the orbital radius and true
anomaly at mean anomaly t.  Expanded in time harmonics,

    V(x, t) = sum_{j != 0} alpha_j(e) cos(2x - j t),

and the alpha_j control which p:q resonances can be sustained.  This module
evaluates V_x and V_xx pointwise and provides three routes to alpha_j:

* ``fourier_coefficient``       -- periodic-trapezoid quadrature of a real
                                   integrand in the eccentric anomaly;
* ``fourier_coefficient_exponential`` -- quadrature of the complex kernel
                                   -exp(2i f_e)/(2 rho_e^3) on the mean-
                                   anomaly grid (independent cross-check);
* ``alpha_series``              -- exact-rational truncated Taylor
                                   polynomial in e (j = 2, 3 only), with a
                                   certified Cauchy remainder bound from
                                   ``remainder_bound``.

The series and remainder provide rigorous lower bounds |alpha_j(e)| >=
|series| - remainder used by the certification conditions.
"""

import math
from fractions import Fraction

import numpy as np

from .kepler import anomalies, eccentric_anomaly

__all__ = [
    "potential_fx",
    "potential_fxx",
    "fx_sup_bound",
    "fxx_sup_bound",
    "fourier_coefficient",
    "fourier_coefficient_exponential",
    "tidal_kernel",
    "alpha_series",
    "remainder_bound",
    "alpha_lower_bound",
    "canonical_disk",
    "CANONICAL_B",
    "CANONICAL_ORDER",
    "QuadratureError",
]


class QuadratureError(RuntimeError):
    """Successive quadrature refinements disagree; n_quad too small."""


# Taylor coefficients of alpha_2(e) (order 4) and alpha_3(e) (order 21),
# exact rationals; index = power of e.  Only these two harmonics admit a
# certified truncation, via the disk parameters in CANONICAL_B below.
_ALPHA2_COEFFS = {
    0: Fraction(-1, 2),
    2: Fraction(5, 4),
    4: Fraction(-13, 32),
}

_ALPHA3_COEFFS = {
    1: Fraction(-7, 4),
    3: Fraction(123, 32),
    5: Fraction(-489, 256),
    7: Fraction(1763, 4096),
    9: Fraction(-13527, 327680),
    11: Fraction(180369, 13107200),
    13: Fraction(5986093, 734003200),
    15: Fraction(24606987, 3355443200),
    17: Fraction(33790034193, 5261334937600),
    19: Fraction(1193558821627, 210453397504000),
    21: Fraction(467145991400853, 92599494901760000),
}

_SERIES = {2: _ALPHA2_COEFFS, 3: _ALPHA3_COEFFS}
CANONICAL_ORDER = {2: 4, 3: 21}
# Disk parameters chosen to tighten the Cauchy estimate for each harmonic.
CANONICAL_B = {2: 0.462678, 3: 0.768368}


def potential_fx(e, x, t, tol: float = 1e-13):
    """d/dx of the potential: sin(2x - 2 f_e(t)) / rho_e(t)^3.

    Doubly 2*pi-periodic in (x, t); broadcasts over ndarray x and t.
    """
    _, rho, f = anomalies(e, t, tol)
    return np.sin(2.0 * np.asarray(x) - 2.0 * f) / rho**3


def potential_fxx(e, x, t, tol: float = 1e-13):
    """d2/dx2 of the potential: 2 cos(2x - 2 f_e(t)) / rho_e(t)^3."""
    _, rho, f = anomalies(e, t, tol)
    return 2.0 * np.cos(2.0 * np.asarray(x) - 2.0 * f) / rho**3


def fx_sup_bound(e: float) -> float:
    """sup over the (x, t) torus of |V_x|, bounded by 1/(1-e)^3."""
    return 1.0 / (1.0 - e) ** 3


def fxx_sup_bound(e: float) -> float:
    """sup over the (x, t) torus of |V_xx|, bounded by 2/(1-e)^3."""
    return 2.0 / (1.0 - e) ** 3


def _quadrature_nodes(n_quad):
    if n_quad < 64 or n_quad % 2:
        raise ValueError(f"n_quad must be even and >= 64, got {n_quad}")
    return 2.0 * np.pi * np.arange(n_quad) / n_quad


def _alpha_trapezoid(e, j, n_quad):
    # Integrate in the eccentric anomaly u (dt = rho du):
    #   alpha_j = -(1/4pi) int_0^{2pi} [P c_j - Q s_j] / (rho^2 (A^2+B^2)^2) du
    # where, with s = sqrt((1+e)/(1-e)), A = s sin(u/2), B = cos(u/2),
    #   P - iQ = (A - iB)^4,
    # c_j = cos(ju - je sin u), s_j = sin(ju - je sin u).  Writing the
    # rational function of w = A/B through A and B removes the w -> inf
    # singularity at u = pi without changing the integrand.
    u = _quadrature_nodes(n_quad)
    s = math.sqrt((1.0 + e) / (1.0 - e))
    a = s * np.sin(0.5 * u)
    b = np.cos(0.5 * u)
    a2, b2 = a * a, b * b
    p = a2 * a2 - 6.0 * a2 * b2 + b2 * b2
    q = 4.0 * a * b * (a2 - b2)
    rho = 1.0 - e * np.cos(u)
    phase = j * (u - e * np.sin(u))
    integrand = (p * np.cos(phase) - q * np.sin(phase)) / (rho**2 * (a2 + b2) ** 2)
    # periodic trapezoid = plain node average; fsum keeps the reduction
    # order fixed so results are bit-reproducible
    return -0.5 * math.fsum(integrand) / n_quad


def fourier_coefficient(e: float, j: int, n_quad: int = 2048) -> float:
    """Coefficient alpha_j(e) by periodic-trapezoid quadrature.

    Spectrally accurate for the analytic integrand; a doubled-node
    evaluation guards against under-resolution.

    Args:
        e: real eccentricity in [0, 1).
        j: nonzero integer harmonic (the expansion has no j = 0 term).
        n_quad: number of quadrature nodes, even, >= 64.

    Raises:
        QuadratureError: the n_quad and 2*n_quad evaluations differ by
            more than 1e-10 (increase n_quad).
    """
    if j == 0:
        raise ValueError("j = 0 is undefined: the potential has no static harmonic")
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must satisfy 0 <= e < 1, got {e}")
    value = _alpha_trapezoid(e, j, n_quad)
    refined = _alpha_trapezoid(e, j, 2 * n_quad)
    if abs(value - refined) > 1e-10:
        raise QuadratureError(
            f"alpha_{j}({e}): refinement moved by {abs(value - refined):.3e}; "
            f"n_quad={n_quad} too small"
        )
    return value


def tidal_kernel(e, t, tol: float = 1e-13):
    """Complex kernel -exp(2i f_e(t)) / (2 rho_e(t)^3).

    Its j-th Fourier coefficient in t equals alpha_j(e).  Supports real and
    complex eccentricities (the latter scalar-wise), which makes it usable
    for bounding |alpha_j| on a complex disk.
    """
    if isinstance(e, complex):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t_arr.shape, dtype=complex)
        for idx, tv in np.ndenumerate(t_arr):
            u = eccentric_anomaly(e, float(tv), tol)
            out[idx] = _kernel_from_u(e, u)
        return out[0] if np.ndim(t) == 0 else out
    u = eccentric_anomaly(e, t, tol)
    return _kernel_from_u(e, u)


def _kernel_from_u(e, u):
    # -(w - i)^4 / (2 rho^3 (w^2+1)^2) with w = s tan(u/2); clearing the
    # tan denominator gives the overflow-free form below.
    s = ((1.0 + e) / (1.0 - e)) ** 0.5
    a = s * np.sin(0.5 * np.asarray(u))
    b = np.cos(0.5 * np.asarray(u))
    rho = 1.0 - e * np.cos(u)
    z = a - 1j * b
    return -(z**4) / (2.0 * rho**3 * (a * a + b * b) ** 2)


def fourier_coefficient_exponential(e: float, j: int, n_quad: int = 2048) -> complex:
    """alpha_j(e) as the j-th Fourier coefficient of the complex kernel.

    Independent of :func:`fourier_coefficient`: integrates on the mean-
    anomaly grid (one Kepler solve per node) instead of the eccentric-
    anomaly grid.  The imaginary part is a numerical-zero diagnostic.
    """
    if j == 0:
        raise ValueError("j = 0 is undefined: the potential has no static harmonic")
    t = _quadrature_nodes(n_quad)
    g = tidal_kernel(e, t)
    weights = g * np.exp(-1j * j * t)
    return complex(math.fsum(weights.real) / n_quad, math.fsum(weights.imag) / n_quad)


def alpha_series(j: int, e: float) -> float:
    """Truncated Taylor polynomial of alpha_j(e), j in {2, 3}.

    Evaluated in exact rational arithmetic (the float e is used with its
    exact binary value) and rounded once at the end, so cancellation across
    the 11 high-order terms of the j = 3 series cannot degrade the result.
    """
    if j not in _SERIES:
        raise ValueError(f"series coefficients available only for j in (2, 3), got {j}")
    if e < 0.0:
        raise ValueError(f"eccentricity must be >= 0, got {e}")
    e_exact = Fraction(e)
    acc = Fraction(0)
    for k in range(CANONICAL_ORDER[j], -1, -1):
        acc = acc * e_exact + _SERIES[j].get(k, Fraction(0))
    return float(acc)


def remainder_bound(e: float, order: int, b: float) -> float:
    """Cauchy-estimate bound on the Taylor remainder of alpha_j after ``order``.

    For 0 < b < 1 and 0 < e < b/cosh(b), the tail of the Taylor expansion in
    eccentricity is bounded by

        2/(1-b)^5 * ((1 + b/cosh(b) - e)(1 + cosh(b)) + 1 - b)^2
                  * (e / (b/cosh(b) - e))^(order+1),

    monotone increasing in e on its domain and vanishing at e = 0.
    """
    if not 0.0 < b < 1.0:
        raise ValueError(f"disk parameter b must lie in (0, 1), got {b}")
    e_star = b / math.cosh(b)
    if not 0.0 <= e < e_star:
        raise ValueError(
            f"e={e} outside the Cauchy-estimate disk e < b/cosh(b) = {e_star:.6f}"
        )
    if e == 0.0:
        return 0.0
    prefactor = (
        2.0
        / (1.0 - b) ** 5
        * ((1.0 + e_star - e) * (1.0 + math.cosh(b)) + 1.0 - b) ** 2
    )
    return prefactor * (e / (e_star - e)) ** (order + 1)


def canonical_disk(j: int) -> float:
    """Radius b/cosh(b) of the certified eccentricity disk for harmonic j."""
    b = CANONICAL_B[j]
    return b / math.cosh(b)


def alpha_lower_bound(j: int, e: float) -> float:
    """Certified lower bound on |alpha_j(e)|: |series| minus remainder bound.

    May be non-positive, in which case no certificate is available at this
    eccentricity.  Raises ValueError outside the canonical disk of j.
    """
    if j not in _SERIES:
        raise ValueError(f"certified bounds available only for j in (2, 3), got {j}")
    return abs(alpha_series(j, e)) - remainder_bound(e, CANONICAL_ORDER[j], CANONICAL_B[j])
