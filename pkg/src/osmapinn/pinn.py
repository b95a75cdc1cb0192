"""Physics-informed MLP for a single-frequency pressure field.

The network maps Cartesian coordinates (divided by ``coordinate_scale``) to
``(Re P, Im P)`` through ``L`` tanh layers of ``N`` units and a linear output
head.  Training minimises the mean squared misfit to the array measurements
plus the mean squared Helmholtz residual ``lap(P)/k**2 + P`` on a set of
collocation points.

The input Laplacian is propagated forward through the layers in closed form
(value, Jacobian and Laplacian of every unit), and the parameter gradient is
the exact reverse sweep through that computation.  :func:`loss` is the
vectorised numpy reference; :func:`train` runs the same arithmetic inside a
compiled loop.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _pinn_kernel
from .acoustics import FieldSnapshot, Medium
from .errors import TrainingDivergedError

DESK_EPOCHS = 500_000
DESK_LEARNING_RATE = 1e-3
LONG_EPOCHS = 100_000_000
LONG_LEARNING_RATE = 1e-5


@dataclass(eq=False)
class MlpParams:
    """Weights ``(fan_out, fan_in)`` and biases of every affine layer."""

    weights: list
    biases: list
    coordinate_scale: float = 1.0
    seed: int | None = None

    @property
    def sizes(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def flat(self):
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def with_flat(self, theta):
        """New params with the same layout filled from a flat vector."""
        theta = np.asarray(theta, dtype=float)
        if theta.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {theta.size}")
        weights, biases, o = [], [], 0
        for w in self.weights:
            fo, fi = w.shape
            weights.append(theta[o:o + fo * fi].reshape(fo, fi).copy())
            o += fo * fi
            biases.append(theta[o:o + fo].copy())
            o += fo
        return MlpParams(weights, biases, self.coordinate_scale, self.seed)

    def to_dict(self):
        return {
            "activation": "tanh",
            "coordinate_scale": self.coordinate_scale,
            "seed": self.seed,
            "layers": [{"weight": w.tolist(), "bias": b.tolist()} for w, b in zip(self.weights, self.biases)],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            [np.array(layer["weight"], dtype=float) for layer in doc["layers"]],
            [np.array(layer["bias"], dtype=float) for layer in doc["layers"]],
            doc["coordinate_scale"],
            doc.get("seed"),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrainConfig:
    """Training recipe.

    ``coordinate_scale=None`` means "use the measurement radius".  The
    defaults are the desk-scale budget; :meth:`long_schedule` gives the
    long schedule.
    """

    frequency: float
    medium: Medium = field(default_factory=Medium)
    epochs: int = DESK_EPOCHS
    learning_rate: float = DESK_LEARNING_RATE
    betas: tuple = (0.9, 0.999)
    epsilon: float = 1e-8
    seed: int = 0
    coordinate_scale: float | None = None
    pde_weight: float = 1.0
    hidden_layers: int = 3
    hidden_nodes: int = 3

    def __post_init__(self):
        if self.epochs <= 0:
            raise ValueError("epochs must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning rate must be positive")

    @classmethod
    def long_schedule(cls, frequency, **kw):
        kw.setdefault("epochs", LONG_EPOCHS)
        kw.setdefault("learning_rate", LONG_LEARNING_RATE)
        return cls(frequency, **kw)

    @property
    def wavenumber(self):
        return self.medium.wavenumber(self.frequency)

    def to_dict(self):
        return {
            "frequency": self.frequency,
            "speed_of_sound": self.medium.speed_of_sound,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "betas": list(self.betas),
            "epsilon": self.epsilon,
            "seed": self.seed,
            "coordinate_scale": self.coordinate_scale,
            "pde_weight": self.pde_weight,
            "hidden_layers": self.hidden_layers,
            "hidden_nodes": self.hidden_nodes,
        }


@dataclass(frozen=True)
class LossReport:
    total: float
    data: float
    pde: float


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n), 0)


@dataclass
class LossHistory:
    epoch: np.ndarray
    total: np.ndarray
    data: np.ndarray
    pde: np.ndarray
    final: LossReport | None = None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "total", "data", "pde"])
        for row in zip(self.epoch, self.total, self.data, self.pde):
            w.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])
        return buf.getvalue()


def init_params(L, N, seed, coordinate_scale=1.0):
    """Xavier-uniform weights and zero biases for a ``3 -> N x L -> 2`` network."""
    if L < 1 or N < 1:
        raise ValueError("need at least one hidden layer with at least one unit")
    rng = np.random.default_rng(seed)
    sizes = [3] + [N] * L + [2]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases, float(coordinate_scale), seed)


def _as_points(xyz):
    xyz = np.asarray(xyz, dtype=float)
    return xyz.reshape(-1, 3), xyz.shape[:-1]


def forward(params, xyz):
    """Complex network output at points ``xyz`` (metres, shape ``(..., 3)``)."""
    X, shape = _as_points(xyz)
    h = X / params.coordinate_scale
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W.T + b
        if i < last:
            h = np.tanh(h)
    return (h[:, 0] + 1j * h[:, 1]).reshape(shape)


def _propagate(params, X):
    # value, per-direction Jacobian and summed second derivative of each unit
    B = X.shape[0]
    h = X
    J = np.broadcast_to(np.eye(3), (B, 3, 3))
    lap = np.zeros((B, 3))
    cache = []
    for W, b in zip(params.weights[:-1], params.biases[:-1]):
        z = h @ W.T + b
        Jz = J @ W.T
        Lz = lap @ W.T
        hn = np.tanh(z)
        d1 = 1.0 - hn * hn
        d2 = -2.0 * hn * d1
        q = np.einsum("bin,bin->bn", Jz, Jz)
        cache.append((h, J, lap, Jz, Lz, hn, d1, d2, q))
        h = hn
        J = d1[:, None, :] * Jz
        lap = d1 * Lz + d2 * q
    Wo, bo = params.weights[-1], params.biases[-1]
    return h @ Wo.T + bo, lap @ Wo.T, (cache, h, lap)


def laplacian(params, xyz):
    """Exact input Laplacian of the complex output, in 1/m**2 units."""
    X, shape = _as_points(xyz)
    _, lap, _ = _propagate(params, X / params.coordinate_scale)
    lap = lap / params.coordinate_scale ** 2
    return (lap[:, 0] + 1j * lap[:, 1]).reshape(shape)


def _targets(snapshot):
    return np.stack([snapshot.pressures.real, snapshot.pressures.imag], axis=1)


def _resolve_scale(config, measurements):
    return config.coordinate_scale or measurements.grid.radius


def loss(params, measurements, collocation, config):
    """Data + PDE cost and its exact gradient.

    Parameters
    ----------
    params : MlpParams
    measurements : FieldSnapshot
        Array pressures the network must reproduce.
    collocation : SphericalGrid
        Points where the Helmholtz residual is penalised.
    config : TrainConfig
        Supplies frequency, medium and ``pde_weight``.

    Returns
    -------
    report : LossReport
    grad : MlpParams
        Gradient of ``report.total`` with the same layout as ``params``.
    """
    k = config.wavenumber
    if k == 0:
        raise ZeroDivisionError("PDE residual is normalised by (omega/s)**2, which is zero at f = 0")
    s = params.coordinate_scale
    xd = measurements.grid.cartesian / s
    xc = collocation.cartesian / s
    nd, A = xd.shape[0], xc.shape[0]
    X = np.concatenate([xd, xc])
    out, lap, (cache, h_last, lap_last) = _propagate(params, X)
    c = 1.0 / (s * s * k * k)
    w = config.pde_weight

    rd = out[:nd] - _targets(measurements)
    rp = lap[nd:] * c + out[nd:]
    data = float(np.sum(rd * rd) / nd)
    pde = float(np.sum(rp * rp) / A)

    g_out = np.zeros_like(out)
    g_out[:nd] = 2.0 * rd / nd
    g_out[nd:] = 2.0 * w * rp / A
    g_lap = np.zeros_like(lap)
    g_lap[nd:] = g_out[nd:] * c

    n_lay = len(params.weights)
    gW = [None] * n_lay
    gb = [None] * n_lay
    gW[-1] = g_out.T @ h_last + g_lap.T @ lap_last
    gb[-1] = g_out.sum(axis=0)
    Wo = params.weights[-1]
    gh, gL, gJ = g_out @ Wo, g_lap @ Wo, None
    for i in range(n_lay - 2, -1, -1):
        hp, Jp, Lp, Jz, Lz, hn, d1, d2, q = cache[i]
        gLz = gL * d1
        gq = gL * d2
        gd1 = gL * Lz
        gd2 = gL * q
        gJz = 2.0 * Jz * gq[:, None, :]
        if gJ is not None:
            gJz = gJz + gJ * d1[:, None, :]
            gd1 = gd1 + np.einsum("bin,bin->bn", gJ, Jz)
        gz = (gh - 2.0 * hn * gd1 + (6.0 * hn * hn - 2.0) * gd2) * d1
        gW[i] = gz.T @ hp + np.einsum("bin,bim->nm", gJz, Jp) + gLz.T @ Lp
        gb[i] = gz.sum(axis=0)
        W = params.weights[i]
        gh, gJ, gL = gz @ W, gJz @ W, gLz @ W
    grad = MlpParams(gW, gb, params.coordinate_scale, params.seed)
    return LossReport(data + w * pde, data, pde), grad


def helmholtz_residual(values, lap, k):
    """Pointwise ``lap/k**2 + P`` for externally supplied field values."""
    return np.asarray(lap) / (k * k) + np.asarray(values)


def adam_step(params, grads, state, config):
    """One bias-corrected ADAM update; returns ``(new_params, new_state)``."""
    theta = params.flat()
    g = grads.flat()
    if state.m.shape != theta.shape:
        raise ValueError("optimizer state does not match the parameter count")
    b1, b2 = config.betas
    t = state.step + 1
    m = b1 * state.m + (1.0 - b1) * g
    v = b2 * state.v + (1.0 - b2) * g * g
    step = config.learning_rate * (m / (1.0 - b1 ** t)) / (np.sqrt(v / (1.0 - b2 ** t)) + config.epsilon)
    return params.with_flat(theta - step), AdamState(m, v, t)


def train(measurements, collocation, config, params=None, log_every=None):
    """Full-batch ADAM training for ``config.epochs`` steps.

    Parameters
    ----------
    measurements : FieldSnapshot
    collocation : SphericalGrid
    config : TrainConfig
    params : MlpParams, optional
        Starting point; defaults to :func:`init_params` with ``config.seed``.
    log_every : int, optional
        History stride, default ``max(1, epochs // 1000)``.

    Returns
    -------
    params : MlpParams
    history : LossHistory
        ``history.final`` holds the loss of the returned parameters.
    """
    if config.wavenumber == 0:
        raise ZeroDivisionError("PDE residual is normalised by (omega/s)**2, which is zero at f = 0")
    scale = _resolve_scale(config, measurements)
    if params is None:
        params = init_params(config.hidden_layers, config.hidden_nodes, config.seed, scale)
    s = params.coordinate_scale
    log_every = log_every or max(1, config.epochs // 1000)
    n_log = (config.epochs + log_every - 1) // log_every
    X = np.ascontiguousarray(np.concatenate([measurements.grid.cartesian, collocation.cartesian]) / s)
    T = np.ascontiguousarray(_targets(measurements))
    theta = params.flat()
    hist = np.zeros((n_log, 4))
    sizes = np.array(params.sizes, dtype=np.int64)
    k = config.wavenumber
    b1, b2 = config.betas
    n, bad = _pinn_kernel.adam_train(
        theta, np.zeros_like(theta), np.zeros_like(theta), 0, sizes, X, T,
        len(measurements), 1.0 / (s * s * k * k), float(config.pde_weight),
        int(config.epochs), float(config.learning_rate), float(b1), float(b2),
        float(config.epsilon), int(log_every), hist,
    )
    if bad >= 0:
        raise TrainingDivergedError(bad)
    trained = params.with_flat(theta)
    final, _ = loss(trained, measurements, collocation, config)
    history = LossHistory(hist[:n, 0].astype(int), hist[:n, 1], hist[:n, 2], hist[:n, 3], final)
    return trained, history


def predict_on_sphere(params, grid, f):
    """Network prediction on every point of ``grid`` as a snapshot at ``f``."""
    return FieldSnapshot(f, grid, forward(params, grid.cartesian))
