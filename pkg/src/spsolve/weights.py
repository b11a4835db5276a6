"""Radial weight coefficients rho(r) and hypothesis-class checks."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import RadialGrid

__all__ = ["WeightModel", "WeightClassReport", "eval_weight", "verify_weight_class"]

KINDS = ("constant", "homogeneous", "coercive", "vanishing_ball")


@dataclass(frozen=True)
class WeightModel:
    """Nonnegative, locally bounded radial weight.

    kinds
        ``constant``        rho = c
        ``homogeneous``     rho = amplitude * r**kbar
        ``coercive``        rho = offset + amplitude * r**power, or a monotone
                            table (``table_r``, ``table_rho``) extended linearly
        ``vanishing_ball``  rho = 0 on [0, r0], then
                            rho_inf * min(1, (r - r0)/ramp)
    """

    kind: str
    c: float = 1.0
    amplitude: float = 1.0
    kbar: float | None = None
    offset: float = 0.0
    power: float = 2.0
    r0: float = 1.0
    rho_inf: float = 1.0
    ramp: float = 1.0
    mbar: float | None = None
    table_r: tuple = field(default=(), repr=False)
    table_rho: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "constant" and self.c < 0:
            raise ValueError("constant weight must be nonnegative")
        if self.kind == "homogeneous":
            if self.kbar is None or not self.kbar > 0 or not self.amplitude > 0:
                raise ValueError("homogeneous weight needs kbar > 0 and amplitude > 0")
        if self.kind == "coercive":
            if self.table_r:
                tr, trho = np.asarray(self.table_r, float), np.asarray(self.table_rho, float)
                if tr.size != trho.size or tr.size < 2:
                    raise ValueError("coercive table needs matching r/rho columns of length >= 2")
                if np.any(np.diff(tr) <= 0) or np.any(np.diff(trho) < 0) or trho[0] < 0:
                    raise ValueError("coercive table must be increasing in r and monotone in rho")
            elif self.offset < 0 or not self.amplitude > 0 or not self.power > 0:
                raise ValueError("coercive formula needs offset >= 0, amplitude > 0, power > 0")
        if self.kind == "vanishing_ball":
            if not self.r0 > 0 or not self.rho_inf > 0 or not self.ramp > 0:
                raise ValueError("vanishing_ball needs r0, rho_inf, ramp > 0")
        if self.mbar is not None and not self.mbar > 0:
            raise ValueError("mbar must be positive")

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float = 1.0, mbar: float | None = None) -> "WeightModel":
        return cls(kind="constant", c=float(c), mbar=mbar)

    @classmethod
    def homogeneous(cls, kbar: float, amplitude: float = 1.0) -> "WeightModel":
        return cls(kind="homogeneous", kbar=float(kbar), amplitude=float(amplitude))

    @classmethod
    def coercive(cls, offset: float = 0.0, amplitude: float = 1.0, power: float = 2.0) -> "WeightModel":
        return cls(kind="coercive", offset=float(offset), amplitude=float(amplitude), power=float(power))

    @classmethod
    def coercive_table(cls, r, rho) -> "WeightModel":
        return cls(kind="coercive", table_r=tuple(map(float, r)), table_rho=tuple(map(float, rho)))

    @classmethod
    def vanishing_ball(
        cls, r0: float = 1.0, rho_inf: float = 1.0, mbar: float | None = None, ramp: float = 1.0
    ) -> "WeightModel":
        return cls(kind="vanishing_ball", r0=float(r0), rho_inf=float(rho_inf), mbar=mbar, ramp=float(ramp))

    # evaluation -------------------------------------------------------
    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.c)
        if self.kind == "homogeneous":
            return self.amplitude * r**self.kbar
        if self.kind == "coercive":
            if self.table_r:
                tr, trho = np.asarray(self.table_r), np.asarray(self.table_rho)
                slope = (trho[-1] - trho[-2]) / (tr[-1] - tr[-2])
                inside = np.interp(r, tr, trho)
                return np.where(r > tr[-1], trho[-1] + slope * (r - tr[-1]), inside)
            return self.offset + self.amplitude * r**self.power
        return self.rho_inf * np.clip((r - self.r0) / self.ramp, 0.0, 1.0)

    @property
    def homogeneity_degree(self) -> float | None:
        return self.kbar if self.kind == "homogeneous" else None

    @property
    def is_homogeneous(self) -> bool:
        return self.kind == "homogeneous"

    def pohozaev_k(self) -> float:
        """Largest k with k*rho(x) <= (x, grad rho) everywhere."""
        if self.kind == "homogeneous":
            return float(self.kbar)
        if self.kind == "coercive" and not self.table_r and self.offset == 0.0:
            return float(self.power)
        return 0.0

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v not in (None, ())}
        if self.table_r:
            d["table_r"] = list(self.table_r)
            d["table_rho"] = list(self.table_rho)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightModel":
        d = dict(d)
        for key in ("table_r", "table_rho"):
            if key in d:
                d[key] = tuple(float(x) for x in d[key])
        return cls(**d)


def eval_weight(model: WeightModel, r):
    """rho(r) for scalar or array ``r >= 0``."""
    out = model(r)
    return float(out) if np.ndim(out) == 0 else out


class WeightClassReport(NamedTuple):
    satisfies_rho1: bool
    satisfies_rho2: bool
    homogeneity_residual: float


def verify_weight_class(model: WeightModel, grid: RadialGrid, levels=None) -> WeightClassReport:
    """Check the vanishing (rho1) and coercive (rho2) hypotheses on a grid.

    rho1: at least two consecutive nodes where rho vanishes, and rho > mbar
    on a tail of the grid.  ``mbar`` defaults to rho(r_max)/2.

    rho2: rho keeps growing over the outer half of the grid and every tested
    sublevel set {rho <= M}, M up to rho(r_max)/2, stays strictly inside
    the grid.

    homogeneity_residual is only meaningful for the homogeneous kind; it is
    0 for the others.
    """
    if not isinstance(grid, RadialGrid):
        raise TypeError("grid must be a RadialGrid")
    rho = np.asarray(model(grid.r), dtype=float)
    if rho.shape != grid.r.shape:
        raise ValueError("weight does not evaluate to one value per node")

    zero = rho == 0.0
    has_interior = bool(np.any(zero[:-1] & zero[1:]))
    mbar = model.mbar if model.mbar is not None else 0.5 * rho[-1]
    above = rho > mbar
    tail_start = grid.n - np.argmin(above[::-1]) if not above.all() else 0
    rho1 = has_interior and mbar > 0 and tail_start < grid.n - 1

    half = grid.n // 2
    outer = rho[half:]
    grows = bool(np.all(np.diff(outer) >= 0) and rho[-1] > rho[half] * (1 + 1e-9))
    if levels is None:
        top = 0.5 * rho[-1]
        levels = [m for m in 2.0 ** np.arange(-4, 64) if m <= top]
    bounded = True
    for m in levels:
        idx = np.nonzero(rho <= m)[0]
        if idx.size and idx[-1] >= grid.n - 1:
            bounded = False
            break
    rho2 = grows and bounded

    resid = 0.0
    if model.kind == "homogeneous":
        ts = np.array([0.25, 0.5, 0.9, 1.5, 2.0, 3.7])
        rs = grid.r[:: max(1, grid.n // 64)]
        for t in ts:
            lhs = model(t * rs)
            rhs = t**model.kbar * model(rs)
            resid = max(resid, float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs)))))
    return WeightClassReport(bool(rho1), bool(rho2), resid)
