"""Spherical Bessel/Hankel functions and complex spherical harmonics.

Everything here is vectorised over the argument arrays and returns plain
numpy values (``float64`` / ``complex128``).  Orders are limited to
``MAX_ORDER``.

Conventions
-----------
* :math:`h_u(x) = j_u(x) - i\\,y_u(x)` (second kind), paired with the
  :math:`e^{+i\\omega t}` time dependence used throughout the package.
* :math:`Y_{u,v}` are orthonormal complex spherical harmonics including the
  Condon-Shortley phase, so that :math:`Y_{u,-v} = (-1)^v \\overline{Y_{u,v}}`.
* Coefficient vectors use ACN ordering, ``index = u*u + u + v``.
"""

from typing import NamedTuple

import numpy as np

MAX_ORDER = 64

# below this argument the ascending series is used for j_u
_SERIES_CROSSOVER = 0.5
_RESCALE = 1e100


class ModeIndex(NamedTuple):
    """Spherical harmonic order ``u`` and degree ``v`` with ``|v| <= u``."""

    u: int
    v: int

    @classmethod
    def checked(cls, u, v):
        u, v = int(u), int(v)
        if u < 0 or abs(v) > u:
            raise ValueError(f"invalid mode (u={u}, v={v}): need u >= 0 and |v| <= u")
        return cls(u, v)

    @property
    def acn(self):
        return self.u * self.u + self.u + self.v


def acn_index(u, v):
    return u * u + u + v


def mode_list(max_order):
    """All ``ModeIndex`` values up to ``max_order`` in ACN order."""
    return [ModeIndex(u, v) for u in range(max_order + 1) for v in range(-u, u + 1)]


def n_modes(max_order):
    return (max_order + 1) ** 2


def mode_orders(max_order):
    """Order ``u`` of every ACN slot, as an int array of length ``(U+1)**2``."""
    return np.repeat(np.arange(max_order + 1), 2 * np.arange(max_order + 1) + 1)


def _check_order(u):
    if u < 0:
        raise ValueError(f"order must be non-negative, got {u}")
    if u > MAX_ORDER:
        raise ValueError(f"order {u} exceeds the supported limit MAX_ORDER={MAX_ORDER}")


def _series_table(nmax, x):
    # j_n(x) = x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    out = np.empty((nmax + 1,) + x.shape)
    t = -0.5 * x * x
    lead = np.ones_like(x)
    for n in range(nmax + 1):
        if n > 0:
            lead = lead * x / (2 * n + 1)
        term = np.ones_like(x)
        total = np.ones_like(x)
        for k in range(1, 30):
            term = term * t / (k * (2 * n + 2 * k + 1))
            total = total + term
        out[n] = lead * total
    return out


def _miller_table(nmax, x):
    # downward recurrence normalised by sum_n (2n+1) j_n(x)^2 = 1
    start = int(max(nmax, np.max(x))) + 40 + int(np.sqrt(40.0 * max(nmax, np.max(x)) + 1.0))
    out = np.zeros((nmax + 1,) + x.shape)
    f_up = np.zeros_like(x)
    f = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for n in range(start, -1, -1):
        if n <= nmax:
            out[n] = f
        norm += (2 * n + 1) * f * f
        if n == 0:
            break
        f_down = (2 * n + 1) / x * f - f_up
        f_up, f = f, f_down
        big = np.abs(f) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f = f * scale
            f_up = f_up * scale
            norm = norm * scale * scale
            out[: nmax + 1] *= scale
    return out / np.sqrt(norm)


def _j_table(nmax, x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise ValueError("spherical Bessel argument must be finite and non-negative")
    out = np.empty((nmax + 1,) + x.shape)
    small = x < _SERIES_CROSSOVER
    if np.any(small):
        out[:, small] = _series_table(nmax, x[small])
    if np.any(~small):
        out[:, ~small] = _miller_table(nmax, x[~small])
    return out


def sph_bessel_j_table(nmax, x):
    """Return ``j_0(x) .. j_nmax(x)`` stacked along a new leading axis.

    Parameters
    ----------
    nmax : int
        Highest order, ``0 <= nmax <= MAX_ORDER``.
    x : array_like
        Non-negative finite arguments.

    Returns
    -------
    numpy.ndarray
        Shape ``(nmax + 1,) + x.shape``.
    """
    _check_order(nmax)
    return _j_table(nmax, x)


def sph_bessel_j(u, x):
    """Spherical Bessel function of the first kind ``j_u(x)``."""
    _check_order(u)
    res = _j_table(u, x)[u]
    return res if res.ndim else float(res)


def sph_bessel_j_prime(u, x):
    """Derivative ``j_u'(x)`` with respect to the argument.

    Uses ``j_u' = (u j_{u-1} - (u+1) j_{u+1}) / (2u+1)``, which is equivalent
    to ``j_{u-1} - (u+1)/x j_u`` but has no division by ``x``.
    """
    _check_order(u)
    res = _prime_from_table(_j_table(u + 1, x), u)
    return res if res.ndim else float(res)


def _prime_from_table(tab, u):
    if u == 0:
        return -tab[1]
    return (u * tab[u - 1] - (u + 1) * tab[u + 1]) / (2 * u + 1)


def sph_bessel_y_table(nmax, x):
    """Second-kind spherical Bessel ``y_0 .. y_nmax`` by upward recurrence (stable for y)."""
    _check_order(nmax)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(~np.isfinite(x)):
        raise ValueError("y_u / h_u are singular at the origin: argument must be > 0")
    out = np.empty((nmax + 2,) + x.shape)
    out[0] = -np.cos(x) / x
    out[1] = -np.cos(x) / (x * x) - np.sin(x) / x
    for n in range(1, nmax + 1):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out[: nmax + 1], out[nmax + 1]


def sph_bessel_y(u, x):
    """Spherical Bessel function of the second kind ``y_u(x)``, ``x > 0``."""
    tab, _ = sph_bessel_y_table(u, x)
    res = tab[u]
    return res if res.ndim else float(res)


def sph_bessel_y_prime(u, x):
    tab, extra = sph_bessel_y_table(u, x)
    full = np.concatenate([tab, extra[None]], axis=0)
    res = _prime_from_table(full, u)
    return res if res.ndim else float(res)


def sph_hankel_h2(u, x):
    """Spherical Hankel function of the second kind, ``j_u(x) - i y_u(x)``."""
    x = np.asarray(x, dtype=float)
    res = sph_bessel_j(u, x) - 1j * sph_bessel_y(u, x)
    return res if np.ndim(res) else complex(res)


def sph_hankel_h2_prime(u, x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("h_u is singular at the origin: argument must be > 0")
    res = sph_bessel_j_prime(u, x) - 1j * sph_bessel_y_prime(u, x)
    return res if np.ndim(res) else complex(res)


def radial_tables(nmax, x):
    """``j, j', h, h'`` for orders ``0..nmax`` at argument(s) ``x > 0``.

    Shared by the scattering series and the radial translator so the four
    functions are computed from one pair of recurrences.
    """
    x = np.asarray(x, dtype=float)
    _check_order(nmax)
    jt = _j_table(nmax + 1, x)
    yt, y_extra = sph_bessel_y_table(nmax, x)
    yt = np.concatenate([yt, y_extra[None]], axis=0)
    j = jt[: nmax + 1]
    y = yt[: nmax + 1]
    jp = np.stack([_prime_from_table(jt, u) for u in range(nmax + 1)])
    yp = np.stack([_prime_from_table(yt, u) for u in range(nmax + 1)])
    return j, jp, j - 1j * y, jp - 1j * yp


def _legendre_normalized(nmax, cos_t, sin_t):
    # P[u, m] * sqrt((2u+1)/(4pi) (u-m)!/(u+m)!) with Condon-Shortley phase, m >= 0
    shape = cos_t.shape
    P = np.zeros((nmax + 1, nmax + 1) + shape)
    P[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, nmax + 1):
        P[m, m] = -np.sqrt((2 * m + 1) / (2.0 * m)) * sin_t * P[m - 1, m - 1]
    for m in range(0, nmax):
        P[m + 1, m] = np.sqrt(2 * m + 3) * cos_t * P[m, m]
    for m in range(0, nmax + 1):
        for u in range(m + 2, nmax + 1):
            a = np.sqrt((4.0 * u * u - 1.0) / (u * u - m * m))
            b = np.sqrt(((u - 1.0) ** 2 - m * m) / (4.0 * (u - 1.0) ** 2 - 1.0))
            P[u, m] = a * (cos_t * P[u - 1, m] - b * P[u - 2, m])
    return P


def sph_harmonics_matrix(max_order, theta, phi):
    """Complex orthonormal SH up to ``max_order`` at the given angles.

    Parameters
    ----------
    max_order : int
    theta, phi : array_like
        Colatitude and azimuth in radians, broadcast together.

    Returns
    -------
    numpy.ndarray
        Shape ``theta.shape + ((max_order+1)**2,)``, ACN column order.
    """
    _check_order(max_order)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    P = _legendre_normalized(max_order, np.cos(theta), np.sin(theta))
    Y = np.empty(theta.shape + (n_modes(max_order),), dtype=complex)
    for u in range(max_order + 1):
        for m in range(0, u + 1):
            pos = P[u, m] * np.exp(1j * m * phi)
            Y[..., acn_index(u, m)] = pos
            if m:
                Y[..., acn_index(u, -m)] = (-1) ** m * np.conj(pos)
    return Y


def sph_harmonic(mode, theta, phi):
    """Single spherical harmonic ``Y_{u,v}(theta, phi)``."""
    mode = ModeIndex.checked(*mode)
    res = sph_harmonics_matrix(mode.u, theta, phi)[..., mode.acn]
    return res if res.ndim else complex(res)


def legendre_p(nmax, x):
    """Ordinary Legendre polynomials ``P_0..P_nmax`` at ``x`` (Bonnet recurrence)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out
