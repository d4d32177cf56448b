"""Constructive solver for resonant periodic orbits.

A p:q resonant rotation x(t) is written as x(t) = (p/q) t + xi + u(t/q)
with u a 2*pi-periodic zero-average correction.  u solves

    u'' + eta_hat u' = eta_hat nu_hat - eps_hat V_x(xi + p t + u(t), q t)

which splits into a fixed-point ("range") equation on the zero-average
part, solved here by contraction in a truncated Fourier representation,
and a scalar ("bifurcation") equation

    phi(xi) := <V_x(xi + p t + u(t; xi), q t)> = eta_hat nu_hat / eps_hat

for the phase xi, solved by bisection on a bracket around the extremizers
of the leading term -2 alpha_j sin(2 xi).

All operations are pure; a solve is deterministic for fixed inputs.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog import ResonanceParams
from .certification import GREEN_ETA_HAT_MAX, range_margin
from .kepler import anomalies
from .potential import alpha_lower_bound, potential_fx

__all__ = [
    "PeriodicFunction",
    "RangeSolution",
    "ResonantOrbit",
    "SolverError",
    "PreconditionError",
    "AliasingError",
    "green_apply",
    "phi_hat",
    "solve_range",
    "phi_mean",
    "bifurcation_halfwidth",
    "solve_bifurcation",
]

_RANGE_ITERATION_CAP = 2000
_BISECTION_CAP = 200


class SolverError(RuntimeError):
    """Iteration cap or stagnation; indicates misconfiguration, not divergence."""


class PreconditionError(ValueError):
    """A certification condition required by the solver does not hold."""


class AliasingError(RuntimeError):
    """Collocation spectrum not resolved; increase the truncation order."""


class PeriodicFunction:
    """Real 2*pi-periodic function with zero average, as Fourier coefficients.

    Stores c_k for 0 <= k <= N with the convention
        v(t) = sum_{|k| <= N} c_k exp(i k t),  c_{-k} = conj(c_k),
    and c_0 = 0 enforced at construction.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        c = np.asarray(coefficients, dtype=complex).copy()
        if c.ndim != 1 or len(c) < 1:
            raise ValueError("coefficients must be a non-empty 1-d array")
        scale = np.max(np.abs(c)) if len(c) else 0.0
        if abs(c[0]) > 1e-12 * max(scale, 1.0):
            raise ValueError(f"zero-average function required, got mean term {c[0]}")
        c[0] = 0.0
        self.coefficients = c

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def zero(cls, order: int) -> "PeriodicFunction":
        return cls(np.zeros(order + 1, dtype=complex))

    @classmethod
    def from_samples(cls, values, order: int) -> "PeriodicFunction":
        """Project n uniform samples onto modes 1..order (mean discarded)."""
        values = np.asarray(values, dtype=float)
        n = len(values)
        if n < 2 * order + 2:
            raise ValueError(f"need at least {2 * order + 2} samples for order {order}")
        spectrum = np.fft.rfft(values) / n
        c = np.zeros(order + 1, dtype=complex)
        c[1:] = spectrum[1 : order + 1]
        return cls(c)

    def samples(self, n: int):
        """Values at n uniform nodes on [0, 2*pi); exact for n >= 2N+2."""
        if n < 2 * self.order + 2:
            raise ValueError(f"need n >= {2 * self.order + 2} to represent order {self.order}")
        spectrum = np.zeros(n // 2 + 1, dtype=complex)
        spectrum[1 : self.order + 1] = self.coefficients[1:] * n
        return np.fft.irfft(spectrum, n)

    def evaluate(self, t):
        """Pointwise evaluation at arbitrary (scalar or array) t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(1, self.order + 1)
        phases = np.exp(1j * np.outer(k, t_arr))
        vals = 2.0 * np.real(self.coefficients[1:] @ phases)
        return float(vals[0]) if np.ndim(t) == 0 else vals.reshape(np.shape(t))

    def derivative(self, order: int = 1) -> "PeriodicFunction":
        k = np.arange(len(self.coefficients))
        return PeriodicFunction(self.coefficients * (1j * k) ** order)

    def sup_norm(self, n: Optional[int] = None) -> float:
        n = n or max(512, 8 * self.order)
        return float(np.max(np.abs(self.samples(n))))

    def __mul__(self, scalar):
        return PeriodicFunction(self.coefficients * scalar)

    __rmul__ = __mul__

    def __sub__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        n = max(self.order, other.order)
        c = np.zeros(n + 1, dtype=complex)
        c[: self.order + 1] = self.coefficients
        c[: other.order + 1] -= other.coefficients
        return PeriodicFunction(c)


def green_apply(g: PeriodicFunction, eta_hat: float) -> PeriodicFunction:
    """Invert u'' + eta_hat u' = g on zero-average functions.

    Fourier multiplier u_k = g_k / (-k^2 + i eta_hat k) for k != 0; the
    zero mode is absent by the PeriodicFunction invariant.
    """
    if eta_hat < 0.0:
        raise ValueError(f"eta_hat must be >= 0, got {eta_hat}")
    k = np.arange(len(g.coefficients), dtype=float)
    multiplier = np.zeros(len(k), dtype=complex)
    multiplier[1:] = 1.0 / (-(k[1:] ** 2) + 1j * eta_hat * k[1:])
    return PeriodicFunction(g.coefficients * multiplier)


class _Workspace:
    """Cached orbit geometry on the collocation grid (fixed e, q, n)."""

    def __init__(self, params: ResonanceParams, n: int):
        self.params = params
        self.n = n
        self.t = 2.0 * np.pi * np.arange(n) / n
        _, rho, f = anomalies(params.e, params.q * self.t)
        self.two_f = 2.0 * f
        self.inv_rho3 = 1.0 / rho**3

    def neg_fx_samples(self, xi: float, u_samples) -> np.ndarray:
        x = xi + self.params.p * self.t + u_samples
        return -np.sin(2.0 * x - self.two_f) * self.inv_rho3


def _project(samples, order: int):
    """Zero-mean spectral projection plus aliasing check.

    Returns (PeriodicFunction of the given order, removed mean).  Raises
    AliasingError when the top third of the resolved band holds more than
    1e-8 of the total oscillatory energy.
    """
    n = len(samples)
    spectrum = np.fft.rfft(np.asarray(samples, dtype=float)) / n
    mean = float(spectrum[0].real)
    energy = np.abs(spectrum[1:]) ** 2
    cutoff = int(math.ceil(2.0 * len(energy) / 3.0))
    # reference power includes the mean so that rounding noise riding on a
    # constant signal does not masquerade as aliasing; signals below the
    # double-precision noise floor are treated as resolved
    total = float(np.sum(energy)) + mean * mean
    top = float(np.sum(energy[cutoff:]))
    if top > 1e-8 * total and total > 1e-20:
        raise AliasingError(
            f"unresolved collocation spectrum (top-band energy fraction "
            f"{top / total:.2e} of the signal power); increase the "
            f"truncation order"
        )
    c = np.zeros(order + 1, dtype=complex)
    c[1:] = spectrum[1 : order + 1]
    return PeriodicFunction(c), mean


def _collocation_size(order: int, n_coll: Optional[int]) -> int:
    n = n_coll if n_coll is not None else max(4 * order, 256)
    if n < 2 * order + 2:
        raise ValueError(f"n_coll={n} too small for truncation order {order}")
    return n


def phi_hat(xi: float, u: PeriodicFunction, params: ResonanceParams,
            n_coll: Optional[int] = None):
    """Zero-average part of -V_x(xi + p t + u(t), q t) on the collocation grid.

    Returns (PeriodicFunction, removed_mean); the removed mean equals
    -phi(xi) for the given u.  The composite is 2*pi-periodic in t because
    p and q are integers.
    """
    n = _collocation_size(u.order, n_coll)
    t = 2.0 * np.pi * np.arange(n) / n
    values = -potential_fx(params.e, xi + params.p * t + u.samples(n), params.q * t)
    return _project(values, u.order)


@dataclass(frozen=True)
class RangeSolution:
    """Fixed point of the contraction at one phase xi."""

    xi: float
    u: PeriodicFunction
    sup_norm: float
    iterations: int
    increments: tuple


@dataclass(frozen=True)
class ResonantOrbit:
    """Constructed p:q resonant orbit x(s) = (p/q) s + xi_star + u(s/q)."""

    params: ResonanceParams
    xi_star: float
    u: PeriodicFunction
    bifurcation_residual: float
    sign_changes: tuple
    xi_average: float

    def x_of(self, s):
        """Rotation angle at time s (satisfies x(s + 2 pi q) = x(s) + 2 pi p)."""
        p, q = self.params.p, self.params.q
        return p / q * np.asarray(s) + self.xi_star + self.u.evaluate(np.asarray(s) / q)

    def xdot_of(self, s):
        p, q = self.params.p, self.params.q
        return p / q + self.u.derivative().evaluate(np.asarray(s) / q) / q

    def initial_state(self):
        """(x, xdot) at s = 0, for handing to a direct integrator."""
        return float(self.x_of(0.0)), float(self.xdot_of(0.0))

    def to_dict(self, n_samples: int = 256) -> dict:
        s = 2.0 * np.pi * self.params.q * np.arange(n_samples) / n_samples
        coeffs = self.u.coefficients
        return {
            "p": self.params.p,
            "q": self.params.q,
            "e": self.params.e,
            "eps": self.params.eps,
            "eta": self.params.eta,
            "nu": self.params.nu,
            "xi_star": self.xi_star,
            "xi_average": self.xi_average,
            "bifurcation_residual": self.bifurcation_residual,
            "sign_changes": [list(br) for br in self.sign_changes],
            "u_coefficients": [[c.real, c.imag] for c in coeffs],
            "t": list(s),
            "x": list(np.asarray(self.x_of(s), dtype=float)),
        }

    def to_json(self, n_samples: int = 256) -> str:
        return json.dumps(self.to_dict(n_samples), indent=1) + "\n"


def _check_preconditions(params: ResonanceParams):
    if params.eta_hat > GREEN_ETA_HAT_MAX:
        raise PreconditionError(
            f"eta_hat={params.eta_hat:.6g} violates the Green-norm condition "
            f"(max {GREEN_ETA_HAT_MAX:.6g})"
        )
    margin = range_margin(params.e, params.eps, params.p, params.q)
    if margin <= 0.0:
        raise PreconditionError(
            f"range (contraction) condition fails: margin {margin:.6g} <= 0"
        )


def _solve_range_ws(xi, params, order, tol, ws, max_iter, initial=None):
    eps_hat, eta_hat = params.eps_hat, params.eta_hat
    if initial is None:
        u = PeriodicFunction.zero(order)
        u_samples = np.zeros(ws.n)
    else:
        u = initial
        u_samples = initial.samples(ws.n)
    increments = []
    phi_value = None
    for _ in range(max_iter):
        neg_fx = ws.neg_fx_samples(xi, u_samples)
        rhs, mean = _project(neg_fx, order)
        phi_value = -mean
        new_u = green_apply(rhs, eta_hat) * eps_hat
        new_samples = new_u.samples(ws.n)
        increment = float(np.max(np.abs(new_samples - u_samples)))
        increments.append(increment)
        u, u_samples = new_u, new_samples
        if increment <= tol:
            break
    else:
        raise SolverError(
            f"fixed-point iteration cap {max_iter} reached at xi={xi:.6g} "
            f"(last increment {increments[-1]:.3e}); check N and tol"
        )
    # one more sample pass so the reported phase average matches the
    # returned fixed point, not the previous iterate
    final_neg_fx = ws.neg_fx_samples(xi, u_samples)
    phi_value = -float(math.fsum(final_neg_fx) / ws.n)
    sol = RangeSolution(
        xi=xi,
        u=u,
        sup_norm=float(np.max(np.abs(u_samples))),
        iterations=len(increments),
        increments=tuple(increments),
    )
    return sol, phi_value


def solve_range(xi: float, params: ResonanceParams, N: int = 64,
                tol: float = 1e-12, n_coll: Optional[int] = None,
                max_iter: int = _RANGE_ITERATION_CAP,
                initial: Optional[PeriodicFunction] = None) -> RangeSolution:
    """Solve the fixed-point equation u = eps_hat G[-V_x(...) + mean] at xi.

    Iterates from u = 0 (or ``initial``); geometric convergence with ratio
    at most (5/2) eps_hat sup|V_xx| < 1 under the range condition, which is
    checked (with the Green-norm condition) before iterating.  The fixed
    point is unique in its ball, so the starting iterate only affects the
    step count.
    """
    _check_preconditions(params)
    n = _collocation_size(N, n_coll)
    ws = _Workspace(params, n)
    sol, _ = _solve_range_ws(xi, params, N, tol, ws, max_iter, initial=initial)
    return sol


def phi_mean(xi: float, params: ResonanceParams, N: int = 64,
             tol: float = 1e-12, n_coll: Optional[int] = None) -> float:
    """Average of V_x(xi + p t + u(t; xi), q t) at the solved fixed point."""
    _check_preconditions(params)
    n = _collocation_size(N, n_coll)
    ws = _Workspace(params, n)
    _, phi = _solve_range_ws(xi, params, N, tol, ws, _RANGE_ITERATION_CAP)
    return phi


def bifurcation_halfwidth(params: ResonanceParams) -> float:
    """Guaranteed half-width of the range of phi:
    2 |alpha_j|_lower - eps_hat * 5/(1-e)^6."""
    m1 = 5.0 / (1.0 - params.e) ** 6
    return 2.0 * alpha_lower_bound(params.harmonic, params.e) - params.eps_hat * m1


def solve_bifurcation(params: ResonanceParams, N: int = 64,
                      tol_fixed_point: float = 1e-12,
                      tol_bifurcation: float = 1e-10,
                      n_coll: Optional[int] = None,
                      scan_points: int = 64) -> ResonantOrbit:
    """Find xi* with phi(xi*) = eta_hat nu_hat / eps_hat and assemble the orbit.

    Bisects phi - target on [pi/4, 3*pi/4], the bracket between the
    extremizers of the leading term of phi, where the certified range of
    phi contains the target.  A coarse scan over [0, 2*pi) records every
    sign-change bracket for diagnostics (existence, not uniqueness, is
    guaranteed, so several roots may coexist).
    """
    _check_preconditions(params)
    if params.eps_hat == 0.0:
        raise PreconditionError("eps = 0: the phase equation is undefined")
    target = params.eta_hat * params.nu_hat / params.eps_hat
    halfwidth = bifurcation_halfwidth(params)
    if abs(target) > halfwidth:
        raise PreconditionError(
            f"|eta_hat nu_hat / eps_hat| = {abs(target):.6g} exceeds the "
            f"certified phase-equation half-width {halfwidth:.6g}"
        )

    n = _collocation_size(N, n_coll)
    ws = _Workspace(params, n)
    cache = {}

    def phi_tilde(xi):
        if xi not in cache:
            sol, phi = _solve_range_ws(xi, params, N, tol_fixed_point, ws,
                                       _RANGE_ITERATION_CAP)
            cache[xi] = (sol, phi - target)
        return cache[xi][1]

    # diagnostic scan: all sign changes of phi - target on a coarse grid
    sign_changes = []
    if scan_points:
        grid = 2.0 * np.pi * np.arange(scan_points) / scan_points
        vals = [phi_tilde(float(g)) for g in grid]
        for i in range(scan_points):
            a, b = vals[i], vals[(i + 1) % scan_points]
            if a == 0.0 or (a < 0.0) != (b < 0.0):
                sign_changes.append(
                    (float(grid[i]), float(grid[(i + 1) % scan_points]))
                )

    lo, hi = math.pi / 4.0, 3.0 * math.pi / 4.0
    f_lo, f_hi = phi_tilde(lo), phi_tilde(hi)
    if abs(f_lo) <= tol_bifurcation:
        root = lo
    elif abs(f_hi) <= tol_bifurcation:
        root = hi
    elif f_lo < 0.0 or f_hi > 0.0:
        raise SolverError(
            f"no sign change on the seeded bracket: phi-target = "
            f"({f_lo:.3e}, {f_hi:.3e}) at (pi/4, 3pi/4)"
        )
    else:
        root = None
        for _ in range(_BISECTION_CAP):
            mid = 0.5 * (lo + hi)
            f_mid = phi_tilde(mid)
            if abs(f_mid) <= tol_bifurcation:
                root = mid
                break
            if f_mid > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15:
                raise SolverError(
                    f"bisection stagnated at width {hi - lo:.3e} with "
                    f"residual {f_mid:.3e} > {tol_bifurcation:.1e}"
                )
        if root is None:
            raise SolverError("bisection iteration cap reached")

    sol, residual = cache[root]
    # the time-average normalization (mean of x(q t) - p t) coincides with
    # the bisection root because u has zero average by construction
    xi_average = root + float(np.mean(sol.u.samples(n)))
    return ResonantOrbit(
        params=params,
        xi_star=root,
        u=sol.u,
        bifurcation_residual=abs(residual),
        sign_changes=tuple(sign_changes),
        xi_average=xi_average,
    )
