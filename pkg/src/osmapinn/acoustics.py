"""Ground-truth simulation of point sources, free field and around a rigid sphere.

Time dependence is :math:`e^{+i\\omega t}`: an outgoing spherical wave is
:math:`e^{-ikd}/(4\\pi d)` and radiating modes use second-kind Hankel
functions.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import specfun
from .coeffs import CoeffSet
from .errors import SingularityError
from .geometry import SphericalGrid, cart_to_sph

SCATTER_MAX_ORDER = 60
SCATTER_TOL = 1e-12


@dataclass(frozen=True)
class Medium:
    speed_of_sound: float = 343.0

    def __post_init__(self):
        if not self.speed_of_sound > 0:
            raise ValueError(f"speed of sound must be positive, got {self.speed_of_sound}")

    def wavenumber(self, f):
        return 2.0 * np.pi * f / self.speed_of_sound


@dataclass(frozen=True)
class PointSource:
    position: tuple
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        pos = tuple(float(c) for c in self.position)
        if len(pos) != 3:
            raise ValueError("source position must have three coordinates")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def distance(self):
        return float(np.linalg.norm(self.position))


@dataclass(frozen=True, eq=False)
class FieldSnapshot:
    """Complex pressures at one frequency sampled on a :class:`SphericalGrid`."""

    frequency: float
    grid: SphericalGrid
    pressures: np.ndarray

    def __post_init__(self):
        p = np.array(self.pressures, dtype=complex).ravel()
        if p.size != len(self.grid):
            raise ValueError(f"{p.size} pressures for a grid of {len(self.grid)} points")
        if not self.frequency > 0:
            raise ValueError("snapshot frequency must be positive")
        p.setflags(write=False)
        object.__setattr__(self, "pressures", p)
        object.__setattr__(self, "frequency", float(self.frequency))

    def __len__(self):
        return self.pressures.size

    def with_pressures(self, pressures):
        return FieldSnapshot(self.frequency, self.grid, pressures)

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# frequency_hz={self.frequency!r} radius_m={self.grid.radius!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "phi", "re", "im"])
        for t, ph, p in zip(self.grid.theta, self.grid.phi, self.pressures):
            w.writerow([repr(float(t)), repr(float(ph)), repr(float(p.real)), repr(float(p.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        """Parse :meth:`to_csv` output; the grid gets equal weights."""
        lines = text.splitlines()
        meta = dict(item.split("=") for item in lines[0].lstrip("# ").split())
        rows = list(csv.DictReader(lines[1:]))
        n = len(rows)
        grid = SphericalGrid(
            float(meta["radius_m"]),
            [float(r["theta"]) for r in rows],
            [float(r["phi"]) for r in rows],
            np.full(n, 4.0 * np.pi / n),
        )
        p = [complex(float(r["re"]), float(r["im"])) for r in rows]
        return cls(float(meta["frequency_hz"]), grid, p)

    def to_dict(self):
        return {
            "frequency": self.frequency,
            "grid": self.grid.to_dict(),
            "re": self.pressures.real.tolist(),
            "im": self.pressures.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        p = np.asarray(doc["re"]) + 1j * np.asarray(doc["im"])
        return cls(doc["frequency"], SphericalGrid.from_dict(doc["grid"]), p)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def green_free_field(f, medium, src, rcv):
    """Free-field pressure at ``rcv`` (shape ``(..., 3)``) due to ``src``.

    ``amplitude * exp(-1j k d) / (4 pi d)`` with ``d = |src - rcv|``.
    """
    rcv = np.asarray(rcv, dtype=float)
    d = np.linalg.norm(rcv - np.asarray(src.position), axis=-1)
    if np.any(d == 0):
        raise SingularityError("receiver coincides with the point source")
    k = medium.wavenumber(f)
    return src.amplitude * np.exp(-1j * k * d) / (4.0 * np.pi * d)


def simulate_free_field(f, medium, src, grid):
    return FieldSnapshot(f, grid, green_free_field(f, medium, src, grid.cartesian))


def point_source_coeffs(f, medium, src, max_order):
    """Field coefficients of the interior expansion of a point source.

    ``K_uv = -1j k h_u(k r_s) conj(Y_uv(theta_s, phi_s)) * amplitude``, valid
    for evaluation radii below ``|src|``.
    """
    r_s, t_s, p_s = (float(a) for a in cart_to_sph(*src.position))
    if r_s == 0:
        raise SingularityError("source at the expansion origin has no interior expansion")
    k = medium.wavenumber(f)
    h = np.array([specfun.sph_hankel_h2(u, k * r_s) for u in range(max_order + 1)])
    Y = specfun.sph_harmonics_matrix(max_order, t_s, p_s)
    values = -1j * k * h[specfun.mode_orders(max_order)] * np.conj(Y) * src.amplitude
    return CoeffSet("field", max_order, f, values)


def rigid_sphere_field(f, medium, a, src, rcv):
    """Total and scattered pressure around a sound-hard sphere of radius ``a``.

    Parameters
    ----------
    f : float
        Frequency in Hz.
    medium : Medium
    a : float
        Sphere radius in metres, centred at the origin.
    src : PointSource
        Source outside the sphere.
    rcv : array_like
        Receiver positions ``(..., 3)`` with ``|rcv| >= a``.

    Returns
    -------
    total, scattered : numpy.ndarray
        Complex pressures with shape ``rcv.shape[:-1]``.
    """
    rcv = np.asarray(rcv, dtype=float)
    r = np.linalg.norm(rcv, axis=-1)
    if np.any(r < a * (1.0 - 1e-12)):
        raise ValueError("receiver inside the rigid sphere")
    r_s = src.distance
    if not r_s > a:
        raise ValueError("source must lie outside the rigid sphere")
    k = medium.wavenumber(f)
    incident = green_free_field(f, medium, src, rcv)

    N = SCATTER_MAX_ORDER
    with np.errstate(over="ignore", invalid="ignore"):
        _, jpa, _, hpa = specfun.radial_tables(N, k * a)
        _, _, hs, _ = specfun.radial_tables(N, k * r_s)
        _, _, hr, _ = specfun.radial_tables(N, k * r.ravel())
        # Neumann condition: d/dr (j_u + T_u h_u) = 0 at r = a
        radial = (2 * np.arange(N + 1) + 1) / (4.0 * np.pi) * hs * (-jpa / hpa)
        cos_g = (rcv.reshape(-1, 3) @ np.asarray(src.position)) / (r.ravel() * r_s)
        P = specfun.legendre_p(N, np.clip(cos_g, -1.0, 1.0))
        terms = radial[:, None] * hr * P
        bound = np.abs(radial[:, None] * hr)

    running = np.abs(np.cumsum(terms, axis=0))
    n_used = N + 1
    for u in range(1, N + 1):
        if np.all(bound[u] <= SCATTER_TOL * running[u - 1]):
            n_used = u
            break
    used = terms[:n_used]
    if not np.all(np.isfinite(used)):
        raise SingularityError("scattering series overflowed before converging")
    scattered = (-1j * k * src.amplitude * used.sum(axis=0)).reshape(r.shape)
    return incident + scattered, scattered


def simulate_rigid_sphere(f, medium, a, src, grid):
    total, _ = rigid_sphere_field(f, medium, a, src, grid.cartesian)
    return FieldSnapshot(f, grid, total)
