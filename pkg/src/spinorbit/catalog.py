"""Physical parameter catalog of resonant bodies and derived model parameters.

A body record carries the observed maximal/minimal equatorial radii a >= b
(km), the informational polar radius c, the orbital eccentricity e and the
locked resonance p:q.  From these the model derives the oblateness

    eps = (3/2) (a^2 - b^2) / (a^2 + b^2)

and the dissipation drift

    nu(e) = N(e) / Omega(e),
    Omega(e) = (1 + 3 e^2 + (3/8) e^4) / (1 - e^2)^(9/2),
    N(e)     = (1 + (15/2) e^2 + (45/8) e^4 + (5/16) e^6) / (1 - e^2)^6,

the tidal-torque averages of the linear viscous model.  Catalogs load from
CSV (columns name,primary,a_km,b_km,c_km,e,p,q[,K]; '#' comments allowed)
or an equivalent JSON array; three transcribed catalogs ship with the
package (the eighteen synchronous moons, Mercury, and five minor bodies).
"""

import io
import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional

__all__ = [
    "Body",
    "ResonanceParams",
    "CatalogError",
    "oblateness",
    "nu_of_e",
    "load_catalog",
    "serialize_catalog",
    "bundled_catalog",
    "bundled_catalog_path",
    "BUNDLED_NAMES",
]

# resonances covered by the certification conditions
SUPPORTED_RESONANCES = ((1, 1), (3, 2))

BUNDLED_NAMES = ("moons", "mercury", "minor", "all")

_CSV_HEADER = ["name", "primary", "a_km", "b_km", "c_km", "e", "p", "q", "K"]


class CatalogError(ValueError):
    """Malformed catalog input (parse failure or invariant violation)."""


def oblateness(a_km: float, b_km: float) -> float:
    """Equatorial oblateness (3/2)(a^2 - b^2)/(a^2 + b^2) from the radii."""
    if not (a_km > 0.0 and b_km > 0.0):
        raise ValueError(f"radii must be positive, got a={a_km}, b={b_km}")
    if a_km < b_km:
        raise ValueError(f"expected a >= b, got a={a_km} < b={b_km}")
    return 1.5 * (a_km**2 - b_km**2) / (a_km**2 + b_km**2)


def nu_of_e(e: float) -> float:
    """Dissipation drift nu(e) = N(e)/Omega(e); equals 1 iff e = 0."""
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must satisfy 0 <= e < 1, got {e}")
    e2 = e * e
    omega = (1.0 + 3.0 * e2 + 0.375 * e2 * e2) / (1.0 - e2) ** 4.5
    n = (1.0 + 7.5 * e2 + 5.625 * e2 * e2 + 0.3125 * e2 * e2 * e2) / (1.0 - e2) ** 6
    return n / omega


@dataclass(frozen=True)
class Body:
    """One catalog record: radii in km, eccentricity, resonance p:q.

    ``rigidity`` (CSV/JSON column ``K``) is the internal dissipation
    constant; stored for documentation, never used by the certification,
    which constrains the dissipation parameter eta directly.  The polar
    radius ``c_km`` is likewise informational.
    """

    name: str
    primary: str
    a_km: float
    b_km: float
    c_km: float
    e: float
    p: int
    q: int
    rigidity: Optional[float] = None

    def __post_init__(self):
        if not self.name:
            raise CatalogError("body name must be non-empty")
        if not (self.a_km > 0.0 and self.b_km > 0.0):
            raise CatalogError(f"{self.name}: radii must be positive")
        if self.a_km < self.b_km:
            raise CatalogError(
                f"{self.name}: max equatorial radius a={self.a_km} < b={self.b_km}"
            )
        if not 0.0 <= self.e < 1.0:
            raise CatalogError(f"{self.name}: eccentricity {self.e} outside [0, 1)")
        if self.p < 1 or self.q < 1:
            raise CatalogError(f"{self.name}: p and q must be >= 1")
        if math.gcd(self.p, self.q) != 1:
            raise CatalogError(f"{self.name}: p={self.p}, q={self.q} not co-prime")
        if (self.p, self.q) not in SUPPORTED_RESONANCES:
            raise CatalogError(
                f"{self.name}: resonance {self.p}:{self.q} not supported "
                f"(certifiable cases: 1:1 and 3:2)"
            )

    @property
    def oblateness(self) -> float:
        return oblateness(self.a_km, self.b_km)

    @property
    def nu(self) -> float:
        return nu_of_e(self.e)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "primary": self.primary,
            "a_km": self.a_km,
            "b_km": self.b_km,
            "c_km": self.c_km,
            "e": self.e,
            "p": self.p,
            "q": self.q,
            "K": self.rigidity,
        }


@dataclass(frozen=True)
class ResonanceParams:
    """Model parameters (p, q, e, eps, eta, nu) for one certification/solve.

    The rescaled parameters of the period-normalized equation are exposed
    as properties: eta_hat = q eta, nu_hat = q nu - p, eps_hat = q^2 eps.
    """

    p: int
    q: int
    e: float
    eps: float
    eta: float
    nu: float

    @classmethod
    def from_body(cls, body: Body, eta: float = 0.0) -> "ResonanceParams":
        return cls(p=body.p, q=body.q, e=body.e, eps=body.oblateness,
                   eta=eta, nu=body.nu)

    def with_eta(self, eta: float) -> "ResonanceParams":
        return replace(self, eta=eta)

    @property
    def eta_hat(self) -> float:
        return self.q * self.eta

    @property
    def nu_hat(self) -> float:
        return self.q * self.nu - self.p

    @property
    def eps_hat(self) -> float:
        return self.q**2 * self.eps

    @property
    def harmonic(self) -> int:
        """Index j of the resonant Fourier mode (solves 2p - j q = 0)."""
        return 2 * self.p // self.q


def _parse_float(field, value, line_no):
    try:
        return float(value)
    except ValueError:
        raise CatalogError(f"line {line_no}: bad numeric value {value!r} for {field}")


def _parse_int(field, value, line_no):
    try:
        return int(value)
    except ValueError:
        raise CatalogError(f"line {line_no}: bad integer value {value!r} for {field}")


def _body_from_fields(fields: dict, line_no) -> Body:
    try:
        rigidity = fields.get("K")
        if rigidity in (None, ""):
            rigidity = None
        else:
            rigidity = _parse_float("K", rigidity, line_no)
        body = Body(
            name=str(fields["name"]).strip(),
            primary=str(fields["primary"]).strip(),
            a_km=_parse_float("a_km", fields["a_km"], line_no),
            b_km=_parse_float("b_km", fields["b_km"], line_no),
            c_km=_parse_float("c_km", fields["c_km"], line_no),
            e=_parse_float("e", fields["e"], line_no),
            p=_parse_int("p", fields["p"], line_no),
            q=_parse_int("q", fields["q"], line_no),
            rigidity=rigidity,
        )
    except KeyError as exc:
        raise CatalogError(f"line {line_no}: missing column {exc}")
    except CatalogError as exc:
        raise CatalogError(f"line {line_no}: {exc}")
    return body


def _load_csv(text: str) -> list:
    bodies = []
    header = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            if cells[: len(_CSV_HEADER) - 1] != _CSV_HEADER[:-1]:
                raise CatalogError(
                    f"line {line_no}: expected header "
                    f"{','.join(_CSV_HEADER[:-1])}[,K], got {line!r}"
                )
            header = cells
            continue
        if len(cells) not in (len(header), len(header) - 1):
            raise CatalogError(
                f"line {line_no}: expected {len(header)} fields, got {len(cells)}"
            )
        fields = dict(zip(header, cells))
        bodies.append(_body_from_fields(fields, line_no))
    if header is None:
        raise CatalogError("no header row found")
    return bodies


def _load_json(text: str) -> list:
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"JSON parse failure: {exc}")
    if not isinstance(records, list):
        raise CatalogError("JSON catalog must be an array of body objects")
    return [_body_from_fields(rec, f"record {i}") for i, rec in enumerate(records)]


def load_catalog(source) -> list:
    """Load and validate a catalog from a path, file object, bytes or str.

    The format is sniffed: input starting with '[' is parsed as JSON,
    anything else as CSV.  Duplicate body names are rejected; every
    invariant violation is reported with its row.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        # multi-line strings and JSON arrays are content, anything else a path
        if "\n" in source or source.lstrip().startswith("["):
            text = source
        else:
            text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        raise TypeError(f"unsupported catalog source {type(source)!r}")

    stripped = text.lstrip()
    bodies = _load_json(text) if stripped.startswith("[") else _load_csv(text)

    seen = set()
    for body in bodies:
        if body.name in seen:
            raise CatalogError(f"duplicate body name {body.name!r}")
        seen.add(body.name)
    return bodies


def _format_float(x: float) -> str:
    return repr(float(x))


def serialize_catalog(bodies, fmt: str = "csv") -> str:
    """Serialize bodies back to the documented CSV or JSON format."""
    if fmt == "csv":
        lines = [",".join(_CSV_HEADER)]
        for b in bodies:
            lines.append(
                ",".join(
                    [
                        b.name,
                        b.primary,
                        _format_float(b.a_km),
                        _format_float(b.b_km),
                        _format_float(b.c_km),
                        _format_float(b.e),
                        str(b.p),
                        str(b.q),
                        "" if b.rigidity is None else _format_float(b.rigidity),
                    ]
                )
            )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps([b.to_dict() for b in bodies], indent=1) + "\n"
    raise ValueError(f"unknown serialization format {fmt!r}")


def bundled_catalog_path(name: str) -> Path:
    """Filesystem path of a bundled catalog ('moons', 'mercury', 'minor')."""
    if name not in ("moons", "mercury", "minor"):
        raise ValueError(f"no bundled catalog {name!r}; choose from moons/mercury/minor")
    return Path(resources.files("spinorbit").joinpath(f"data/{name}.csv"))


def bundled_catalog(name: str) -> list:
    """Load a bundled catalog; 'all' concatenates moons + mercury."""
    if name == "all":
        return bundled_catalog("moons") + bundled_catalog("mercury")
    return load_catalog(bundled_catalog_path(name))
