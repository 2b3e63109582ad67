"""Spatially varying material parameters of the diffusion-reaction field equation.

A material state at a point bundles the density ``rho``, the symmetric 2x2
diffusion tensor ``alpha`` (stored as three components so symmetry holds by
construction), the decay rate ``beta`` and the source strength ``f``.  A
:class:`ParameterField` maps points to such states through an ordered list of
(region, rule) pairs with a mandatory default, first match wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ValidationError

_PSD_TOL = 1e-12


class MaterialArrays(NamedTuple):
    """Vectorized material samples at a batch of points (all 1-D arrays)."""

    rho: np.ndarray
    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    beta: np.ndarray
    f: np.ndarray


@dataclass(frozen=True)
class ParameterSample:
    """Material parameters at a single point.

    The diffusion tensor is ``[[a11, a12], [a12, a22]]``; storing three
    components makes symmetry structural.  Construction validates
    positive semi-definiteness and sign constraints.
    """

    rho: float
    a11: float
    a12: float
    a22: float
    beta: float
    f: float

    def __post_init__(self):
        if self.rho < 0:
            raise ValidationError(f"rho must be >= 0, got {self.rho}")
        if self.beta < 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if self.a11 < -_PSD_TOL or self.a22 < -_PSD_TOL:
            raise ValidationError("diagonal diffusion components must be >= 0")
        scale = max(abs(self.a11), abs(self.a22), 1.0)
        if self.a11 * self.a22 - self.a12 **2 < -_PSD_TOL * scale**2:
            raise ValidationError("diffusion tensor must be positive semi-definite")

    @classmethod
    def isotropic(cls, rho, alpha, beta, f) -> "ParameterSample":
        if alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {alpha}")
        return cls(rho=rho, a11=alpha, a12=0.0, a22=alpha, beta=beta, f=f)

    @property
    def alpha(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    @property
    def is_isotropic(self) -> bool:
        scale = max(abs(self.a11), abs(self.a22), 1.0)
        return abs(self.a12) <= _PSD_TOL * scale and abs(self.a11 - self.a22) <= _PSD_TOL * scale

    def eigenvalues(self) -> tuple[float, float]:
        mean = 0.5 * (self.a11 + self.a22)
        disc = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return (mean - disc, mean + disc)


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def to_dict(self) -> dict:
        return {"type": "rect", "x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1}


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        dx, dy = pts[:, 0] - self.cx, pts[:, 1] - self.cy
        return dx * dx + dy * dy <= self.r * self.r

    def to_dict(self) -> dict:
        return {"type": "disk", "cx": self.cx, "cy": self.cy, "r": self.r}


@dataclass(frozen=True)
class Annulus:
    cx: float
    cy: float
    r_in: float
    r_out: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        dx, dy = pts[:, 0] - self.cx, pts[:, 1] - self.cy
        rr = dx * dx + dy * dy
        return (rr >= self.r_in**2) & (rr <= self.r_out**2)

    def to_dict(self) -> dict:
        return {
            "type": "annulus",
            "cx": self.cx,
            "cy": self.cy,
            "r_in": self.r_in,
            "r_out": self.r_out,
        }


@dataclass(frozen=True)
class AnnularSector:
    """Annular sector, angles measured counter-clockwise from +x in [0, 2pi)."""

    cx: float
    cy: float
    r_in: float
    r_out: float
    theta0: float
    theta1: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        dx, dy = pts[:, 0] - self.cx, pts[:, 1] - self.cy
        rr = dx * dx + dy * dy
        radial = (rr >= self.r_in**2) & (rr <= self.r_out**2)
        theta = np.mod(np.arctan2(dy, dx), 2 * np.pi)
        lo = self.theta0 % (2 * np.pi)
        hi = self.theta1 % (2 * np.pi)
        if hi >= lo:
            angular = (theta >= lo) & (theta <= hi)
        else:  # wraps through 0
            angular = (theta >= lo) | (theta <= hi)
        return radial & angular

    def to_dict(self) -> dict:
        return {
            "type": "annular_sector",
            "cx": self.cx,
            "cy": self.cy,
            "r_in": self.r_in,
            "r_out": self.r_out,
            "theta0": self.theta0,
            "theta1": self.theta1,
        }


@dataclass(frozen=True)
class HalfPlane:
    """Points with nx*x + ny*y <= c."""

    nx: float
    ny: float
    c: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return self.nx * pts[:, 0] + self.ny * pts[:, 1] <= self.c

    def to_dict(self) -> dict:
        return {"type": "half_plane", "nx": self.nx, "ny": self.ny, "c": self.c}


_REGION_TYPES = {
    "rect": Rect,
    "disk": Disk,
    "annulus": Annulus,
    "annular_sector": AnnularSector,
    "half_plane": HalfPlane,
}


def region_from_dict(d: dict):
    kind = d.get("type")
    if kind not in _REGION_TYPES:
        raise ValidationError(f"unknown region type {kind!r}")
    kwargs = {k: v for k, v in d.items() if k != "type"}
    return _REGION_TYPES[kind](**kwargs)


# ---------------------------------------------------------------------------
# Rules and fields

Rule = Callable[[np.ndarray], MaterialArrays]


def constant_rule(sample: ParameterSample) -> Rule:
    def rule(pts: np.ndarray) -> MaterialArrays:
        n = pts.shape[0]
        full = np.full
        return MaterialArrays(
            full(n, sample.rho, dtype=float),
            full(n, sample.a11, dtype=float),
            full(n, sample.a12, dtype=float),
            full(n, sample.a22, dtype=float),
            full(n, sample.beta, dtype=float),
            full(n, sample.f, dtype=float),
        )

    return rule


def _as_rule(rule) -> Rule:
    if isinstance(rule, ParameterSample):
        return constant_rule(rule)
    if callable(rule):
        return rule
    raise ValidationError(f"rule must be a ParameterSample or callable, got {type(rule)}")


class ParameterField:
    """Piecewise material definition: ordered (region, rule) entries + default.

    Immutable after construction; evaluation is deterministic and safe to
    call concurrently.
    """

    def __init__(self, entries: Sequence[tuple[object, object]] = (), default=None, bbox=None):
        if default is None:
            raise ValidationError("a default rule is required")
        self.entries = [(region, _as_rule(rule)) for region, rule in entries]
        self.default = _as_rule(default)
        self.bbox = bbox  # (x0, x1, y0, y1) or None for unbounded

    def _check_bbox(self, pts: np.ndarray):
        if self.bbox is None:
            return
        x0, x1, y0, y1 = self.bbox
        x, y = pts[:, 0], pts[:, 1]
        if np.any((x < x0) | (x > x1) | (y < y0) | (y > y1)):
            raise DomainError("point outside the declared bounding box")

    def sample_arrays(self, pts: np.ndarray) -> MaterialArrays:
        """Evaluate at a batch of points, shape (n, 2)."""
        pts = np.asarray(pts, dtype=float)
        self._check_bbox(pts)
        out = MaterialArrays(*(np.array(a, dtype=float) for a in self.default(pts)))
        unset = np.ones(pts.shape[0], dtype=bool)
        for region, rule in self.entries:
            hit = region.contains(pts) & unset
            if np.any(hit):
                vals = rule(pts[hit])
                for dst, src in zip(out, vals):
                    dst[hit] = src
            unset &= ~hit
        return out

    def sample(self, point) -> ParameterSample:
        """Evaluate at a single point."""
        arrays = self.sample_arrays(np.asarray(point, dtype=float).reshape(1, 2))
        return ParameterSample(*(float(a[0]) for a in arrays))


def homogeneous_params(rho, alpha, beta, f, bbox=None) -> ParameterField:
    """Constant isotropic material everywhere: alpha * identity tensor."""
    return ParameterField(default=ParameterSample.isotropic(rho, alpha, beta, f), bbox=bbox)


def piecewise_params(entries, default, bbox=None) -> ParameterField:
    """First-match-wins piecewise field over the given regions."""
    return ParameterField(entries=entries, default=default, bbox=bbox)


def sample_params(field: ParameterField, point) -> ParameterSample:
    return field.sample(point)
