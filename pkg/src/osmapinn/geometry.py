"""Point sets on spheres with quadrature weights, and coordinate conversions.

Angles follow the physics convention: ``theta`` is the colatitude measured
from +z, ``phi`` the azimuth measured from +x.  Quadrature weights are
normalised so that they sum to ``4*pi``; a weighted sum over a grid then
approximates the surface integral over the unit sphere.
"""

import functools
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

FOUR_PI = 4.0 * np.pi

GRID_KINDS = ("gauss-legendre", "spherical-t-design", "fibonacci")

# point count -> design degree
T_DESIGN_CATALOG = {6: 3, 12: 5, 36: 8}

GAUSS_LEGENDRE_MAX_DEGREE = 128
FIBONACCI_MAX_POINTS = 100_000


def sph_to_cart(r, theta, phi):
    """Spherical ``(r, theta, phi)`` to Cartesian ``(x, y, z)``, each broadcast."""
    r, theta, phi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (r, theta, phi)))
    st = np.sin(theta)
    return r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)


def cart_to_sph(x, y, z):
    """Inverse of :func:`sph_to_cart`; ``phi`` is returned in ``[0, 2*pi)``.

    The origin maps to ``(0, 0, 0)``.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, z)))
    rho = np.hypot(x, y)
    r = np.hypot(rho, z)
    theta = np.arctan2(rho, z)
    phi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    phi = np.where(phi >= 2.0 * np.pi, 0.0, phi)  # mod of a tiny negative rounds up to 2*pi
    return r, theta, phi


@dataclass(frozen=True, eq=False)
class SphericalGrid:
    """Points on a sphere of radius ``radius`` together with quadrature weights.

    Parameters
    ----------
    radius : float
        Sphere radius in metres.
    theta, phi : numpy.ndarray
        Colatitude and azimuth of each point, radians.
    weights : numpy.ndarray
        Quadrature weights, summing to ``4*pi``.
    kind : str
        Label of the construction (informational).
    """

    radius: float
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    kind: str = field(default="custom")

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        phi = np.array(self.phi, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if not self.radius > 0:
            raise ValueError(f"grid radius must be positive, got {self.radius}")
        if not (theta.shape == phi.shape == weights.shape):
            raise ValueError("theta, phi and weights must have the same length")
        if abs(weights.sum() - FOUR_PI) > 1e-9:
            raise ValueError(f"weights must sum to 4*pi, got {weights.sum()!r}")
        for a in (theta, phi, weights):
            a.setflags(write=False)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.theta.size

    @functools.cached_property
    def cartesian(self):
        """``(n, 3)`` array of point positions in metres."""
        xyz = np.stack(sph_to_cart(self.radius, self.theta, self.phi), axis=-1)
        xyz.setflags(write=False)
        return xyz

    def with_radius(self, radius):
        """Same directions and weights on a sphere of another radius."""
        return SphericalGrid(radius, self.theta, self.phi, self.weights, self.kind)

    def to_dict(self):
        return {
            "radius": self.radius,
            "kind": self.kind,
            "points": [
                {"theta": float(t), "phi": float(p), "weight": float(w)}
                for t, p, w in zip(self.theta, self.phi, self.weights)
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        pts = doc["points"]
        return cls(
            radius=doc["radius"],
            theta=[p["theta"] for p in pts],
            phi=[p["phi"] for p in pts],
            weights=[p["weight"] for p in pts],
            kind=doc.get("kind", "custom"),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def gauss_legendre_grid(degree, radius):
    """Product grid integrating spherical polynomials up to ``degree`` exactly.

    Uses ``ceil((degree+1)/2)`` Gauss-Legendre nodes in ``cos(theta)`` and
    ``degree+1`` equispaced azimuths.
    """
    n_theta = (degree + 2) // 2
    n_phi = degree + 1
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.repeat(w[:, None], n_phi, axis=1) * (2.0 * np.pi / n_phi)
    return SphericalGrid(radius, tt.ravel(), pp.ravel(), ww.ravel(), "gauss-legendre")


def fibonacci_grid(n, radius):
    """Golden-angle spiral of ``n`` points with equal weights ``4*pi/n``."""
    i = np.arange(n) + 0.5
    theta = np.arccos(1.0 - 2.0 * i / n)
    phi = np.mod(np.pi * (1.0 + np.sqrt(5.0)) * i, 2.0 * np.pi)
    return SphericalGrid(radius, theta, phi, np.full(n, FOUR_PI / n), "fibonacci")


def _polyhedron_points(n):
    if n == 6:
        v = np.vstack([np.eye(3), -np.eye(3)])
    else:
        g = (1.0 + np.sqrt(5.0)) / 2.0
        v = []
        for a in (-1.0, 1.0):
            for b in (-g, g):
                v += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
        v = np.array(v)
    return cart_to_sph(*v.T)[1:]


def _catalog_points(n):
    if n in (6, 12):
        return _polyhedron_points(n)
    text = resources.files("osmapinn.data").joinpath(f"tdesign_{n:03d}.txt").read_text()
    pts = np.loadtxt(text.splitlines(), ndmin=2)
    return pts[:, 0], pts[:, 1]


def t_design_grid(n, radius):
    """Equal-weight spherical t-design from the built-in catalog."""
    if n not in T_DESIGN_CATALOG:
        raise ValueError(
            f"no spherical t-design with {n} points; supported sizes: {sorted(T_DESIGN_CATALOG)}"
        )
    theta, phi = _catalog_points(n)
    return SphericalGrid(radius, theta, phi, np.full(n, FOUR_PI / n), "spherical-t-design")


def make_grid(kind, n, radius):
    """Build a grid of the given kind.

    Parameters
    ----------
    kind : {"gauss-legendre", "spherical-t-design", "fibonacci"}
    n : int
        Exactness degree for ``gauss-legendre``; point count otherwise.
    radius : float
        Sphere radius in metres.
    """
    n = int(n)
    if kind == "gauss-legendre":
        if not 0 <= n <= GAUSS_LEGENDRE_MAX_DEGREE:
            raise ValueError(
                f"gauss-legendre degree {n} unsupported; supported degrees: 0..{GAUSS_LEGENDRE_MAX_DEGREE}"
            )
        return gauss_legendre_grid(n, radius)
    if kind == "spherical-t-design":
        return t_design_grid(n, radius)
    if kind == "fibonacci":
        if not 1 <= n <= FIBONACCI_MAX_POINTS:
            raise ValueError(
                f"fibonacci point count {n} unsupported; supported sizes: 1..{FIBONACCI_MAX_POINTS}"
            )
        return fibonacci_grid(n, radius)
    raise ValueError(f"unknown grid kind {kind!r}; expected one of {GRID_KINDS}")


def quadrature_degree(grid):
    """Exactness degree of a catalog grid, or ``None`` when not known."""
    if grid.kind == "spherical-t-design":
        return T_DESIGN_CATALOG.get(len(grid))
    if grid.kind == "gauss-legendre":
        n_phi = len(np.unique(np.round(grid.phi, 12)))
        n_theta = len(grid) // n_phi
        return min(2 * n_theta - 1, n_phi - 1)
    return None
