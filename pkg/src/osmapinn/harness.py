"""Reconstruction experiments: OSMA, PINN-assisted OSMA, rigid sphere, pure PINN.

All methods reconstruct the pressure on a target sphere of radius ``r_c``
and are scored against the analytic free-field pressure there with
:func:`reconstruction_error`.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import pinn, shd
from .acoustics import (
    FieldSnapshot,
    Medium,
    PointSource,
    point_source_coeffs,
    simulate_free_field,
    simulate_rigid_sphere,
)
from .errors import BesselNullError
from .geometry import make_grid

log = logging.getLogger(__name__)

METHODS = ("osma", "pinn-osma", "rigid", "pure-pinn")
DB_FLOOR = -300.0


@dataclass(frozen=True)
class GridSpec:
    kind: str
    n: int

    def build(self, radius):
        return make_grid(self.kind, self.n, radius)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to run one single-frequency scenario.

    ``virtual_grid`` is the layout used to re-analyse the PINN prediction on
    the virtual sphere ``r_b``.
    """

    frequency: float
    source: PointSource
    seed: int
    medium: Medium = field(default_factory=Medium)
    array_radius: float = 0.05
    array_grid: GridSpec = GridSpec("spherical-t-design", 36)
    virtual_radius: float = 0.048
    target_radius: float = 0.04
    collocation: GridSpec = GridSpec("fibonacci", 500)
    evaluation: GridSpec = GridSpec("fibonacci", 100)
    virtual_grid: GridSpec = GridSpec("gauss-legendre", 16)
    epochs: int = pinn.DESK_EPOCHS
    learning_rate: float = pinn.DESK_LEARNING_RATE
    hidden_layers: int = 3
    hidden_nodes: int = 3
    pde_weight: float = 1.0
    null_threshold: float = shd.DEFAULT_NULL_THRESHOLD
    methods: tuple = METHODS

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not self.target_radius > 0:
            raise ValueError("target radius must be positive")
        if "pinn-osma" in self.methods and self.virtual_radius == self.array_radius:
            raise ValueError("the virtual radius must differ from the array radius")

    @property
    def train_config(self):
        return pinn.TrainConfig(
            self.frequency,
            self.medium,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=self.seed,
            coordinate_scale=self.array_radius,
            pde_weight=self.pde_weight,
            hidden_layers=self.hidden_layers,
            hidden_nodes=self.hidden_nodes,
        )

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "frequency": self.frequency,
            "speed_of_sound": self.medium.speed_of_sound,
            "source": {
                "position": list(self.source.position),
                "amplitude": [self.source.amplitude.real, self.source.amplitude.imag],
            },
            "seed": self.seed,
            "array": {"radius": self.array_radius, "grid": self.array_grid.to_dict()},
            "virtual_radius": self.virtual_radius,
            "target_radius": self.target_radius,
            "collocation": self.collocation.to_dict(),
            "evaluation": self.evaluation.to_dict(),
            "virtual_grid": self.virtual_grid.to_dict(),
            "train": {
                "epochs": self.epochs,
                "learning_rate": self.learning_rate,
                "hidden_layers": self.hidden_layers,
                "hidden_nodes": self.hidden_nodes,
                "pde_weight": self.pde_weight,
            },
            "null_threshold": self.null_threshold,
            "methods": list(self.methods),
        }

    @classmethod
    def from_dict(cls, doc):
        if "seed" not in doc:
            raise ValueError("config must set an RNG seed")
        src = doc["source"]
        amp = src.get("amplitude", [1.0, 0.0])
        kw = dict(
            frequency=float(doc["frequency"]),
            source=PointSource(tuple(src["position"]), complex(amp[0], amp[1])),
            seed=int(doc["seed"]),
            medium=Medium(float(doc.get("speed_of_sound", 343.0))),
        )
        if "array" in doc:
            kw["array_radius"] = float(doc["array"]["radius"])
            if "grid" in doc["array"]:
                kw["array_grid"] = GridSpec(**doc["array"]["grid"])
        for key in ("virtual_radius", "target_radius", "null_threshold"):
            if key in doc:
                kw[key] = float(doc[key])
        for key in ("collocation", "evaluation", "virtual_grid"):
            if key in doc:
                kw[key] = GridSpec(**doc[key])
        train = doc.get("train", {})
        for key in ("epochs", "hidden_layers", "hidden_nodes"):
            if key in train:
                kw[key] = int(train[key])
        for key in ("learning_rate", "pde_weight"):
            if key in train:
                kw[key] = float(train[key])
        if "methods" in doc:
            kw["methods"] = tuple(doc["methods"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def scenario(number, **overrides):
    """The two single-source scenarios of the reference experiment.

    1: 3430 Hz, source at (0.5, 0.5, 0.75) m (order-0 null on the array).
    2: 4905 Hz, source at (0.5, -0.5, -0.75) m (order-1 null on the array).
    """
    if number == 1:
        base = ExperimentConfig(3430.0, PointSource((0.5, 0.5, 0.75)), seed=0)
    elif number == 2:
        base = ExperimentConfig(4905.0, PointSource((0.5, -0.5, -0.75)), seed=0)
    else:
        raise ValueError("scenario number must be 1 or 2")
    return base.replace(**overrides)


def reconstruction_error(truth, estimate):
    """Normalised squared error in dB, floored at ``DB_FLOOR``."""
    p = np.asarray(getattr(truth, "pressures", truth))
    q = np.asarray(getattr(estimate, "pressures", estimate))
    if p.shape != q.shape:
        raise ValueError("truth and estimate must be sampled on the same grid")
    energy = np.sum(np.abs(p) ** 2)
    if energy == 0:
        raise ValueError("reference field has zero energy")
    ratio = np.sum(np.abs(p - q) ** 2) / energy
    if ratio == 0:
        return DB_FLOOR
    return max(DB_FLOOR, 10.0 * math.log10(ratio))


@dataclass
class MethodResult:
    error_db: float | None = None
    field: FieldSnapshot | None = None
    failure: str | None = None


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    order_budget: int
    nulls: shd.NullReport
    truth: FieldSnapshot
    results: dict
    coefficients: dict
    reference_coefficients: shd.CoeffSet
    params: pinn.MlpParams | None = None
    history: pinn.LossHistory | None = None

    @property
    def errors_db(self):
        return {m: r.error_db for m, r in self.results.items()}

    def to_dict(self):
        doc = {
            "config": self.config.to_dict(),
            "order_budget": self.order_budget,
            "nulls": self.nulls.to_dict(),
            "errors_db": self.errors_db,
            "failures": {m: r.failure for m, r in self.results.items() if r.failure},
            "coefficients": {name: c.to_dict() for name, c in self.coefficients.items()},
            "reference_coefficients": self.reference_coefficients.to_dict(),
        }
        if self.params is not None:
            doc["pinn"] = {
                "params": self.params.to_dict(),
                "final_loss": vars(self.history.final) if self.history and self.history.final else None,
            }
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _osma_coeffs(cfg, measurements, U):
    pc = shd.estimate_pressure_coeffs(measurements, U)
    return pc, shd.estimate_field_coeffs(pc, cfg.medium, "skip", cfg.null_threshold)


def virtual_sphere_coeffs(params, cfg, U):
    """Field coefficients from the network prediction on the virtual sphere."""
    grid = cfg.virtual_grid.build(cfg.virtual_radius)
    pred = pinn.predict_on_sphere(params, grid, cfg.frequency)
    pc = shd.estimate_pressure_coeffs(pred, U)
    return pc, shd.estimate_field_coeffs(pc, cfg.medium, "skip", cfg.null_threshold)


def train_network(cfg, measurements=None):
    """Train the PINN on free-field array measurements for ``cfg``."""
    if measurements is None:
        measurements = simulate_free_field(
            cfg.frequency, cfg.medium, cfg.source, cfg.array_grid.build(cfg.array_radius)
        )
    colloc = cfg.collocation.build(cfg.array_radius)
    log.info("training PINN: %d epochs, lr %g, seed %d", cfg.epochs, cfg.learning_rate, cfg.seed)
    return pinn.train(measurements, colloc, cfg.train_config)


def run_experiment(cfg, params=None, history=None):
    """Run every method listed in ``cfg.methods``.

    A pre-trained network may be passed in to skip training.  Failures of a
    single method are recorded in its result and do not stop the others.
    """
    f, medium = cfg.frequency, cfg.medium
    mic_grid = cfg.array_grid.build(cfg.array_radius)
    eval_grid = cfg.evaluation.build(cfg.target_radius)
    truth = simulate_free_field(f, medium, cfg.source, eval_grid)
    measurements = simulate_free_field(f, medium, cfg.source, mic_grid)
    U = shd.order_budget(f, cfg.array_radius, medium).U
    nulls = shd.detect_bessel_nulls(f, cfg.array_radius, medium, U, cfg.null_threshold)
    reference = point_source_coeffs(f, medium, cfg.source, U)

    results = {}
    coefficients = {}

    def attempt(method, fn):
        try:
            field = fn()
            results[method] = MethodResult(reconstruction_error(truth, field), field)
        except Exception as exc:  # noqa: BLE001 - recorded per method
            log.warning("method %s failed: %s", method, exc)
            results[method] = MethodResult(failure=f"{type(exc).__name__}: {exc}")

    def osma():
        pc, kc = _osma_coeffs(cfg, measurements, U)
        coefficients["osma_pressure"] = pc
        coefficients["osma_field"] = kc
        return shd.synthesize_field(kc, eval_grid, medium)

    needs_net = {"pinn-osma", "pure-pinn"} & set(cfg.methods)
    if needs_net and params is None:
        try:
            params, history = train_network(cfg, measurements)
        except Exception as exc:  # noqa: BLE001
            for m in needs_net:
                results[m] = MethodResult(failure=f"training failed: {type(exc).__name__}: {exc}")

    def pinn_osma():
        _, kc = _osma_coeffs(cfg, measurements, U)
        pb, kb = virtual_sphere_coeffs(params, cfg, U)
        still_null = set(nulls.null_orders) & set(kb.absent_orders)
        if still_null:
            raise BesselNullError(sorted(still_null), f"orders {sorted(still_null)} are null on the virtual sphere too")
        coefficients["virtual_pressure"] = pb
        coefficients["virtual_field"] = kb
        merged = kc.merged(kb, nulls.null_orders)
        coefficients["pinn_osma_field"] = merged
        return shd.synthesize_field(merged, eval_grid, medium)

    def rigid():
        rigid_meas = simulate_rigid_sphere(f, medium, cfg.array_radius, cfg.source, mic_grid)
        pc = shd.estimate_pressure_coeffs(rigid_meas, U)
        coefficients["rigid_pressure"] = pc
        return shd.rigid_reconstruct(pc, eval_grid, medium)

    def pure_pinn():
        return pinn.predict_on_sphere(params, eval_grid, f)

    for method, fn in (("osma", osma), ("pinn-osma", pinn_osma), ("rigid", rigid), ("pure-pinn", pure_pinn)):
        if method in cfg.methods and method not in results:
            attempt(method, fn)

    return ExperimentReport(cfg, U, nulls, truth, results, coefficients, reference,
                            params if needs_net else None, history if needs_net else None)


def radius_sweep(cfg, radii, params=None):
    """Pure-PINN error at each target radius, reusing one trained network.

    Returns a list of ``(radius, error_db)`` pairs.
    """
    if params is None:
        params, _ = train_network(cfg)
    out = []
    for r in radii:
        grid = cfg.evaluation.build(r)
        truth = simulate_free_field(cfg.frequency, cfg.medium, cfg.source, grid)
        pred = pinn.predict_on_sphere(params, grid, cfg.frequency)
        out.append((float(r), reconstruction_error(truth, pred)))
    return out


def parse_radii(text):
    """``"start:step:stop"`` (inclusive) or a comma-separated list."""
    if ":" in text:
        start, step, stop = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]
