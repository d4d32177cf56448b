"""Certification and construction of p:q spin-orbit resonances.

The package checks, for Solar-system bodies locked in a 1:1 or 3:2
spin-orbit resonance, four explicit inequality conditions that guarantee
the existence of a resonant periodic rotation in the dissipative
spin-orbit model, and constructs the orbit itself by a spectral
fixed-point iteration combined with a one-dimensional bisection for the
resonance phase.  A fixed-step Runge-Kutta integrator serves as an
independent cross-check.
"""

from .catalog import (
    Body,
    CatalogError,
    ResonanceParams,
    bundled_catalog,
    bundled_catalog_path,
    load_catalog,
    nu_of_e,
    oblateness,
    serialize_catalog,
)
from .certification import (
    GREEN_ETA_HAT_MAX,
    CertificationReport,
    certify,
    certify_catalog,
    eta_max,
    green_eta_cap,
    green_norm_bound,
    nonempty_margin,
    range_margin,
)
from .dynamics import SpinState, Trajectory, check_resonance, integrate, orbit_residual, rhs
from .kepler import CRITICAL_ECC, AnomalyTriple, KeplerError, anomalies, eccentric_anomaly
from .potential import (
    alpha_lower_bound,
    alpha_series,
    fourier_coefficient,
    fourier_coefficient_exponential,
    potential_fx,
    potential_fxx,
    remainder_bound,
    tidal_kernel,
)
from .solver import (
    PeriodicFunction,
    RangeSolution,
    ResonantOrbit,
    bifurcation_halfwidth,
    green_apply,
    phi_hat,
    phi_mean,
    solve_bifurcation,
    solve_range,
)

__version__ = "0.1.0"
