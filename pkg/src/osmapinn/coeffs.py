"""Container for spherical harmonic coefficient tables."""

import json
from dataclasses import dataclass

import numpy as np

from .specfun import acn_index, mode_list, mode_orders, n_modes

KINDS = ("pressure", "field")


@dataclass(frozen=True, eq=False)
class CoeffSet:
    """Dense ACN-ordered coefficient table up to ``max_order``.

    ``kind="pressure"`` holds projections of the pressure on a sphere of
    ``radius``; ``kind="field"`` holds radius-independent sound field
    coefficients and carries no radius.  Orders that could not be estimated
    are marked absent in ``present`` and their ``values`` are ignored.
    """

    kind: str
    max_order: int
    frequency: float
    values: np.ndarray
    radius: float | None = None
    present: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")
        values = np.array(self.values, dtype=complex).ravel()
        if values.size != n_modes(self.max_order):
            raise ValueError(
                f"expected {(self.max_order + 1) ** 2} coefficients for U={self.max_order}, got {values.size}"
            )
        if self.kind == "field" and self.radius is not None:
            raise ValueError("field coefficients carry no radius")
        if self.kind == "pressure" and self.radius is None:
            raise ValueError("pressure coefficients need the radius they were measured on")
        present = (np.ones(values.size, dtype=bool) if self.present is None
                   else np.array(self.present, dtype=bool).ravel())
        if present.size != values.size:
            raise ValueError("present mask has the wrong length")
        values = np.where(present, values, 0.0)
        values.setflags(write=False)
        present.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "max_order", int(self.max_order))
        object.__setattr__(self, "frequency", float(self.frequency))

    def __getitem__(self, mode):
        u, v = mode
        if u > self.max_order or abs(v) > u:
            raise KeyError(mode)
        i = acn_index(u, v)
        if not self.present[i]:
            raise KeyError(f"mode {tuple(mode)} is absent")
        return complex(self.values[i])

    def has(self, u, v=0):
        return bool(self.present[acn_index(u, v)])

    @property
    def orders(self):
        return mode_orders(self.max_order)

    @property
    def absent_orders(self):
        """Orders with no present degree."""
        return sorted({int(u) for u, p in zip(self.orders, self.present) if not p})

    def _replace(self, **kw):
        d = dict(kind=self.kind, max_order=self.max_order, frequency=self.frequency,
                 values=self.values, radius=self.radius, present=self.present)
        d.update(kw)
        return CoeffSet(**d)

    def without_orders(self, orders):
        mask = ~np.isin(self.orders, list(orders)) & self.present
        return self._replace(present=mask)

    def merged(self, other, orders):
        """Copy of self whose modes of the given ``orders`` come from ``other``."""
        if other.kind != self.kind or other.max_order < self.max_order:
            raise ValueError("can only merge coefficient tables of the same kind and sufficient order")
        take = np.isin(self.orders, list(orders))
        src_vals = other.values[: self.values.size]
        src_present = other.present[: self.values.size]
        return self._replace(values=np.where(take, src_vals, self.values),
                             present=np.where(take, src_present, self.present))

    def scaled(self, factor):
        return self._replace(values=self.values * factor)

    def to_dict(self):
        doc = {"kind": self.kind, "U": self.max_order, "f": self.frequency}
        if self.radius is not None:
            doc["radius"] = self.radius
        doc["entries"] = [
            {"u": m.u, "v": m.v, "re": float(c.real), "im": float(c.imag), "present": bool(p)}
            for m, c, p in zip(mode_list(self.max_order), self.values, self.present)
        ]
        return doc

    @classmethod
    def from_dict(cls, doc):
        U = int(doc["U"])
        values = np.zeros(n_modes(U), dtype=complex)
        present = np.zeros(n_modes(U), dtype=bool)
        for e in doc["entries"]:
            i = acn_index(e["u"], e["v"])
            values[i] = complex(e["re"], e["im"])
            present[i] = e.get("present", True)
        return cls(doc["kind"], U, doc["f"], values, doc.get("radius"), present)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
