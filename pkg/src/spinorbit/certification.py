"""Existence conditions for p:q spin-orbit resonances and report assembly.

A body certifies when four inequalities hold simultaneously.  With
eps the oblateness, e the eccentricity, nu the dissipation drift and
alpha_j the resonant Fourier coefficient of the tidal potential
(j = 2 for 1:1, j = 3 for 3:2):

1. Green-operator norm: eta_hat = q eta small enough that the inverse of
   u'' + eta_hat u' on zero-average periodic functions has norm <= 5/4;
   this caps eta at (pi/(5q)) (10/pi^2 - 1).
2. Range (contraction) condition: eps < (1-e)^3/5 for 1:1 and (1-e)^3/20
   for 3:2, which makes the periodic-correction fixed-point map contract.
3. Non-empty (topological) condition: eps < (2(1-e)^6/5)|alpha_2| for 1:1,
   eps < ((1-e)^6/10)|alpha_3| for 3:2, guaranteeing the scalar phase
   equation sweeps an interval of positive half-width.
4. Bifurcation condition: an explicit ceiling on eta ensuring the phase
   equation's target value stays inside that interval.

All |alpha_j| enter through the certified lower bound (truncated series
minus Cauchy remainder), so a positive report is conservative.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

from .catalog import Body
from .potential import alpha_lower_bound

__all__ = [
    "GREEN_ETA_HAT_MAX",
    "green_eta_cap",
    "green_norm_bound",
    "range_margin",
    "nonempty_margin",
    "eta_max",
    "certify",
    "certify_catalog",
    "CertificationReport",
    "reports_to_csv",
    "reports_to_json",
    "reports_to_markdown",
    "REPORT_COLUMNS",
]

# Largest eta_hat keeping the Green-operator norm bound at 5/4 exactly:
# (pi/5)(10/pi^2 - 1) = 0.00830124...
GREEN_ETA_HAT_MAX = math.pi / 5.0 * (10.0 / math.pi**2 - 1.0)


def green_eta_cap(q: int) -> float:
    """Ceiling on eta itself from the Green-norm condition: eta_hat_max / q."""
    return GREEN_ETA_HAT_MAX / q


def green_norm_bound(eta_hat: float) -> float:
    """Operator-norm bound (1 + eta_hat (pi/2)/(1 - eta_hat pi/2)) pi^2/8.

    Valid for 0 <= eta_hat < 2/pi; equals pi^2/8 at eta_hat = 0 and exactly
    5/4 at eta_hat = GREEN_ETA_HAT_MAX.
    """
    if not 0.0 <= eta_hat < 2.0 / math.pi:
        raise ValueError(f"eta_hat must lie in [0, 2/pi), got {eta_hat}")
    half_pi_eta = eta_hat * math.pi / 2.0
    return (1.0 + half_pi_eta / (1.0 - half_pi_eta)) * math.pi**2 / 8.0


def _check_resonance(p, q):
    if (p, q) not in ((1, 1), (3, 2)):
        raise ValueError(f"unsupported resonance {p}:{q} (certifiable: 1:1 and 3:2)")


def range_margin(e: float, eps: float, p: int, q: int) -> float:
    """RHS - LHS of the contraction condition; positive iff it holds."""
    _check_resonance(p, q)
    divisor = 5.0 if (p, q) == (1, 1) else 20.0
    return (1.0 - e) ** 3 / divisor - eps


def nonempty_margin(e: float, eps: float, p: int, q: int) -> float:
    """RHS - LHS of the topological condition, with |alpha_j| replaced by
    its certified lower bound (conservative)."""
    _check_resonance(p, q)
    if (p, q) == (1, 1):
        return 0.4 * (1.0 - e) ** 6 * alpha_lower_bound(2, e) - eps
    return 0.1 * (1.0 - e) ** 6 * alpha_lower_bound(3, e) - eps


def eta_max(e: float, eps: float, nu: float, p: int, q: int) -> float:
    """Ceiling on eta from the bifurcation condition.

    Returns +inf when q nu - p = 0 (the constraint degenerates and only the
    Green-norm cap remains) and 0.0 when the bracket
    2|alpha_j| - {5,20} eps/(1-e)^6 is non-positive (no certificate).
    """
    _check_resonance(p, q)
    if (p, q) == (1, 1):
        bracket = 2.0 * alpha_lower_bound(2, e) - 5.0 * eps / (1.0 - e) ** 6
        denom = abs(nu - 1.0)
        scale = eps
    else:
        bracket = 2.0 * alpha_lower_bound(3, e) - 20.0 * eps / (1.0 - e) ** 6
        denom = abs(2.0 * nu - 3.0)
        scale = 2.0 * eps
    if bracket <= 0.0:
        return 0.0
    if denom == 0.0:
        return math.inf
    return scale / denom * bracket


@dataclass(frozen=True)
class CertificationReport:
    """Per-body evaluation of the four conditions.

    Columns 2-5 of the printed summary: certified lower bound on
    |alpha_j|, the range and non-empty margins (positive = satisfied), and
    the bifurcation ceiling on eta.  ``eta_admissible`` is the ceiling
    combined with the Green-norm cap.
    """

    body_name: str
    alpha_lower: float
    range_margin: float
    nonempty_margin: float
    eta_bif_max: float
    eta_green_max: float
    eta_admissible: float
    certified: bool

    def to_dict(self) -> dict:
        d = {
            "body_name": self.body_name,
            "alpha_lower": self.alpha_lower,
            "range_margin": self.range_margin,
            "nonempty_margin": self.nonempty_margin,
            "eta_bif_max": self.eta_bif_max,
            "eta_green_max": self.eta_green_max,
            "eta_admissible": self.eta_admissible,
            "certified": self.certified,
        }
        # strict-JSON-friendly sentinel for the degenerate drift case
        if math.isinf(self.eta_bif_max):
            d["eta_bif_max"] = "inf"
        if math.isinf(self.eta_admissible):
            d["eta_admissible"] = "inf"
        return d


REPORT_COLUMNS = (
    "body_name",
    "alpha_lower",
    "range_margin",
    "nonempty_margin",
    "eta_bif_max",
    "eta_green_max",
    "eta_admissible",
    "certified",
)


def certify(body: Body) -> CertificationReport:
    """Evaluate all conditions for one body."""
    e, eps, nu = body.e, body.oblateness, body.nu
    p, q = body.p, body.q
    alpha_lower = alpha_lower_bound(2 * p // q, e)
    r_margin = range_margin(e, eps, p, q)
    n_margin = nonempty_margin(e, eps, p, q)
    bif = eta_max(e, eps, nu, p, q)
    green = green_eta_cap(q)
    admissible = min(bif, green)
    certified = alpha_lower > 0.0 and r_margin > 0.0 and n_margin > 0.0 and admissible > 0.0
    return CertificationReport(
        body_name=body.name,
        alpha_lower=alpha_lower,
        range_margin=r_margin,
        nonempty_margin=n_margin,
        eta_bif_max=bif,
        eta_green_max=green,
        eta_admissible=admissible,
        certified=certified,
    )


def certify_catalog(bodies) -> list:
    """Certify every body, preserving input order."""
    return [certify(b) for b in bodies]


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        writer.writerow([_cell(getattr(r, c)) for c in REPORT_COLUMNS])
    return buf.getvalue()


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=1) + "\n"


def reports_to_markdown(reports) -> str:
    """Markdown table with the summary-column order, for visual diffing."""
    head = "| body | lower bound on the resonant coefficient | range margin | non-empty margin | eta ceiling (bifurcation) | eta ceiling (Green) | eta admissible | certified |"
    sep = "|" + "---|" * 8
    lines = [head, sep]
    for r in reports:
        cells = [r.body_name] + [
            ("inf" if math.isinf(v) else f"{v:.6g}")
            for v in (
                r.alpha_lower,
                r.range_margin,
                r.nonempty_margin,
                r.eta_bif_max,
                r.eta_green_max,
                r.eta_admissible,
            )
        ] + ["yes" if r.certified else "no"]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
