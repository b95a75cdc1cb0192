"""Spherical harmonic analysis and synthesis of sampled sound fields.

Pressure coefficients are the projection of sampled pressure onto the
(conjugated) spherical harmonics.  Field coefficients follow by dividing
out the radial dependence ``j_u(kr)``, which fails wherever ``kr`` sits on a
zero of ``j_u``; :func:`detect_bessel_nulls` reports those orders and
:func:`estimate_field_coeffs` handles them according to a policy.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .acoustics import FieldSnapshot
from .coeffs import CoeffSet
from .errors import BesselNullError, SingularityError

DEFAULT_NULL_THRESHOLD = 1e-2
NULL_POLICIES = ("error", "skip", "force")

__all__ = [
    "CoeffSet",
    "NullReport",
    "OrderBudget",
    "detect_bessel_nulls",
    "estimate_field_coeffs",
    "estimate_pressure_coeffs",
    "order_budget",
    "radial_translator",
    "rigid_reconstruct",
    "synthesize_field",
    "synthesize_pressure",
]


@dataclass(frozen=True)
class OrderBudget:
    U: int

    def __post_init__(self):
        if self.U < 0:
            raise ValueError("order budget must be non-negative")

    def __int__(self):
        return self.U


@dataclass(frozen=True)
class NullEntry:
    order: int
    magnitude: float
    is_null: bool


@dataclass(frozen=True)
class NullReport:
    frequency: float
    radius: float
    threshold: float
    entries: tuple

    @property
    def null_orders(self):
        return [e.order for e in self.entries if e.is_null]

    def to_dict(self):
        return {
            "frequency": self.frequency,
            "radius": self.radius,
            "threshold": self.threshold,
            "entries": [
                {"u": e.order, "abs_j": e.magnitude, "is_null": e.is_null} for e in self.entries
            ],
        }

    def format(self):
        lines = [f"f = {self.frequency:g} Hz, r = {self.radius:g} m, threshold = {self.threshold:g}"]
        for e in self.entries:
            flag = "NULL" if e.is_null else "ok"
            lines.append(f"  u={e.order:2d}  |j_u(kr)| = {e.magnitude:.3e}  {flag}")
        return "\n".join(lines)


def order_budget(f, r, medium):
    """``U = ceil(2 pi f r / s)``."""
    if not (f > 0 and r > 0):
        raise ValueError("frequency and radius must be positive")
    return OrderBudget(math.ceil(2.0 * math.pi * f * r / medium.speed_of_sound))


def detect_bessel_nulls(f, r, medium, max_order, threshold=DEFAULT_NULL_THRESHOLD):
    if not threshold > 0:
        raise ValueError("null threshold must be positive")
    j = specfun.sph_bessel_j_table(max_order, medium.wavenumber(f) * r)
    entries = tuple(
        NullEntry(u, float(abs(j[u])), bool(abs(j[u]) < threshold)) for u in range(max_order + 1)
    )
    return NullReport(float(f), float(r), float(threshold), entries)


def estimate_pressure_coeffs(snapshot, max_order):
    """Quadrature projection ``sum_q P_q conj(Y_uv(q)) gamma_q`` for ``u <= max_order``."""
    grid = snapshot.grid
    need = (max_order + 1) ** 2
    if len(grid) < need:
        raise ValueError(
            f"grid of {len(grid)} points cannot resolve order {max_order}: at least {need} points required"
        )
    Y = specfun.sph_harmonics_matrix(max_order, grid.theta, grid.phi)
    values = (snapshot.pressures * grid.weights) @ np.conj(Y)
    return CoeffSet("pressure", max_order, snapshot.frequency, values, radius=grid.radius)


def estimate_field_coeffs(pcoeffs, medium, null_policy="skip", threshold=DEFAULT_NULL_THRESHOLD):
    """Divide pressure coefficients by ``j_u(kr)`` to get field coefficients.

    Parameters
    ----------
    pcoeffs : CoeffSet
        Pressure coefficients (``kind="pressure"``).
    medium : Medium
    null_policy : {"error", "skip", "force"}
        What to do with orders flagged by :func:`detect_bessel_nulls`:
        raise :class:`BesselNullError`, mark them absent, or divide anyway.
    threshold : float
        Null threshold on ``|j_u(kr)|``.
    """
    if pcoeffs.kind != "pressure":
        raise ValueError("estimate_field_coeffs needs pressure coefficients")
    if null_policy not in NULL_POLICIES:
        raise ValueError(f"null_policy must be one of {NULL_POLICIES}")
    U = pcoeffs.max_order
    report = detect_bessel_nulls(pcoeffs.frequency, pcoeffs.radius, medium, U, threshold)
    nulls = report.null_orders
    if nulls and null_policy == "error":
        raise BesselNullError(nulls)
    j = specfun.sph_bessel_j_table(U, medium.wavenumber(pcoeffs.frequency) * pcoeffs.radius)
    j_modes = j[specfun.mode_orders(U)]
    present = pcoeffs.present.copy()
    if null_policy == "skip":
        present &= ~np.isin(specfun.mode_orders(U), nulls)
    elif np.any(j_modes[present] == 0):
        raise SingularityError("j_u(kr) is exactly zero; cannot force the division")
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(present, pcoeffs.values / np.where(j_modes == 0, 1.0, j_modes), 0.0)
    return CoeffSet("field", U, pcoeffs.frequency, values, present=present)


def synthesize_pressure(kcoeffs, grid, medium):
    """Pressure values ``sum K_uv j_u(kr) Y_uv`` on ``grid`` (absent modes skipped)."""
    if kcoeffs.kind != "field":
        raise ValueError("synthesis needs field coefficients")
    U = kcoeffs.max_order
    j = specfun.sph_bessel_j_table(U, medium.wavenumber(kcoeffs.frequency) * grid.radius)
    Y = specfun.sph_harmonics_matrix(U, grid.theta, grid.phi)
    return Y @ (kcoeffs.values * kcoeffs.present * j[specfun.mode_orders(U)])


def synthesize_field(kcoeffs, grid, medium):
    return FieldSnapshot(kcoeffs.frequency, grid, synthesize_pressure(kcoeffs, grid, medium))


def _translator_parts(max_order, f, r_c, r_a, medium):
    k = medium.wavenumber(f)
    j_a, jp_a, h_a, hp_a = specfun.radial_tables(max_order, k * r_a)
    j_c = specfun.sph_bessel_j_table(max_order, k * r_c)
    denom = j_a * hp_a - jp_a * h_a
    if np.any(np.abs(denom) < 1e-300):
        raise SingularityError("radial translator denominator vanishes")
    return hp_a * j_c, denom


def radial_translator(u, f, r_c, r_a, medium):
    """Rigid-sphere radial translator ``G_u(omega, r_c, r_a)``.

    ``h_u'(k r_a) j_u(k r_c) / (j_u(k r_a) h_u'(k r_a) - j_u'(k r_a) h_u(k r_a))``.
    The denominator is the Wronskian ``-1j/(k r_a)**2``, so it never vanishes.
    """
    if not (r_a > 0 and r_c > 0):
        raise ValueError("radii must be positive")
    num, denom = _translator_parts(u, f, r_c, r_a, medium)
    return complex(num[u] / denom[u])


def rigid_reconstruct(pcoeffs, grid, medium):
    """Pressure on ``grid`` (radius ``r_c``) from rigid-sphere pressure coefficients."""
    if pcoeffs.kind != "pressure":
        raise ValueError("rigid_reconstruct needs pressure coefficients")
    U = pcoeffs.max_order
    num, denom = _translator_parts(U, pcoeffs.frequency, grid.radius, pcoeffs.radius, medium)
    G = (num / denom)[specfun.mode_orders(U)]
    Y = specfun.sph_harmonics_matrix(U, grid.theta, grid.phi)
    p = Y @ (G * pcoeffs.values * pcoeffs.present)
    return FieldSnapshot(pcoeffs.frequency, grid, p)
