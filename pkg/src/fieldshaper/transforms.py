"""Coordinate maps, Jacobians, and the parameter push-forward.

The push-forward rule for the diffusion-reaction equation under a map
``x' = x'(x)`` with Jacobian ``A``:

    alpha' = A alpha A^T / det A
    rho'   = rho  / det A
    beta'  = beta / det A
    f'     = f    / det A

and the field value itself is untransformed (``u'(x') = u(x)``).  Two
canonical designs are generated from this rule: a circular cloak built from
a linear radial stretch, and a bender built from a conformal rectangle-to-
annular-sector map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    CompositionError,
    DegenerateMapError,
    DomainError,
    UnsupportedError,
    ValidationError,
)
from .materials import MaterialArrays, ParameterSample

_DEF_FD_REL_STEP = 1e-6


@dataclass(frozen=True)
class Mapping:
    """Differentiable 2D coordinate map.

    ``forward`` and ``jacobian`` act on point batches of shape (n, 2);
    ``jacobian`` returns (n, 2, 2) with A_ij = d x'_i / d x_j.  When no
    closed-form ``jacobian`` is supplied, central finite differences with
    step ``h = 1e-6 * domain diagonal`` are used.  ``inverse`` is optional
    and required only by operations that pull points back (pullback checks).
    ``domain`` is a bounding box (x0, x1, y0, y1) or None for the whole
    plane.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[tuple] = None
    name: str = "custom"

    def __call__(self, pts) -> np.ndarray:
        return self.forward(np.asarray(pts, dtype=float).reshape(-1, 2))

    def _fd_step(self) -> float:
        if self.domain is None:
            return _DEF_FD_REL_STEP
        x0, x1, y0, y1 = self.domain
        return _DEF_FD_REL_STEP * math.hypot(x1 - x0, y1 - y0)

    def _check_domain(self, pts: np.ndarray):
        if self.domain is None:
            return
        x0, x1, y0, y1 = self.domain
        tol = 1e-12 * (1 + abs(x1 - x0) + abs(y1 - y0))
        x, y = pts[:, 0], pts[:, 1]
        if np.any((x < x0 - tol) | (x > x1 + tol) | (y < y0 - tol) | (y > y1 + tol)):
            raise DomainError(f"point outside the domain of map {self.name!r}")

    def jacobian_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        self._check_domain(pts)
        if self.jacobian is not None:
            A = self.jacobian(pts)
        else:
            h = self._fd_step()
            ex = np.array([h, 0.0])
            ey = np.array([0.0, h])
            dx = (self.forward(pts + ex) - self.forward(pts - ex)) / (2 * h)
            dy = (self.forward(pts + ey) - self.forward(pts - ey)) / (2 * h)
            A = np.stack([dx, dy], axis=-1)
        det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
        if np.any(det <= 0):
            raise DegenerateMapError(
                f"map {self.name!r} has det(A) <= 0 (min {det.min():.3g})"
            )
        return A

    def jacobian_at(self, point) -> np.ndarray:
        return self.jacobian_many(np.asarray(point, dtype=float).reshape(1, 2))[0]


def jacobian_at(mapping: Mapping, point) -> np.ndarray:
    return mapping.jacobian_at(point)


# ---------------------------------------------------------------------------
# Built-in maps


def identity_mapping(domain=None) -> Mapping:
    return Mapping(
        forward=lambda p: p.copy(),
        jacobian=lambda p: np.broadcast_to(np.eye(2), (p.shape[0], 2, 2)).copy(),
        inverse=lambda p: p.copy(),
        domain=domain,
        name="identity",
    )


def scale_mapping(s: float, domain=None) -> Mapping:
    if s <= 0:
        raise ValidationError(f"scale factor must be > 0, got {s}")
    return Mapping(
        forward=lambda p: s * p,
        jacobian=lambda p: np.broadcast_to(s * np.eye(2), (p.shape[0], 2, 2)).copy(),
        inverse=lambda p: p / s,
        domain=domain,
        name=f"scale({s})",
    )


def affine_mapping(A, b=(0.0, 0.0), domain=None) -> Mapping:
    A = np.asarray(A, dtype=float).reshape(2, 2)
    b = np.asarray(b, dtype=float).reshape(2)
    det = np.linalg.det(A)
    if det <= 0:
        raise DegenerateMapError("affine map must be orientation-preserving")
    Ainv = np.linalg.inv(A)
    return Mapping(
        forward=lambda p: p @ A.T + b,
        jacobian=lambda p: np.broadcast_to(A, (p.shape[0], 2, 2)).copy(),
        inverse=lambda p: (p - b) @ Ainv.T,
        domain=domain,
        name="affine",
    )


@dataclass(frozen=True)
class CloakSpec:
    """Circular cloak: linear radial stretch r' = a + (b - a) r / b inside r <= b."""

    center: tuple = (0.0, 0.0)
    a: float = 1.0
    b: float = 2.0
    epsilon: float = 1e-3

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValidationError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if not (0 < self.epsilon < 1):
            raise ValidationError(f"epsilon must be in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class BenderSpec:
    """Bender: rectangle [0, ka] x [0, a] mapped conformally onto an annular sector."""

    k: float = 1.0
    a: float = 1.0
    phi: float = math.pi / 2
    r1: float = 1.0

    def __post_init__(self):
        if self.k <= 0 or self.a <= 0 or self.r1 <= 0:
            raise ValidationError("k, a, r1 must all be > 0")
        if not (0 < self.phi <= 2 * math.pi):
            raise ValidationError(f"phi must be in (0, 2*pi], got {self.phi}")

    @property
    def angle_rate(self) -> float:
        return self.phi / (self.k * self.a)

    @property
    def r2(self) -> float:
        return self.r1 * math.exp(self.phi / self.k)


def cloak_mapping(spec: CloakSpec) -> Mapping:
    """Map sending r in [0, b] to r' in [a, b]; identity outside r = b."""
    cx, cy = spec.center
    a, b = spec.a, spec.b
    slope = (b - a) / b

    def forward(pts):
        d = pts - (cx, cy)
        r = np.hypot(d[:, 0], d[:, 1])
        inside = r < b
        factor = np.ones_like(r)
        rs = r[inside]
        rp = a + slope * rs
        with np.errstate(divide="ignore", invalid="ignore"):
            factor[inside] = np.where(rs > 0, rp / np.maximum(rs, 1e-300), 1.0)
        out = (cx, cy) + d * factor[:, None]
        # r = 0 maps to radius a along +x by convention (the map is singular there)
        at_origin = inside & (r == 0)
        out[at_origin] = (cx + a, cy)
        return out

    def jacobian(pts):
        d = pts - (cx, cy)
        r = np.hypot(d[:, 0], d[:, 1])
        if np.any(r == 0):
            raise DegenerateMapError("cloak map Jacobian is singular at the center")
        ct, st = d[:, 0] / r, d[:, 1] / r
        inside = r < b
        rp = a + slope * r
        s_r = np.where(inside, slope, 1.0)
        s_t = np.where(inside, rp / r, 1.0)
        # A = R(theta) diag(s_r, s_t) R(theta)^T
        A = np.empty((pts.shape[0], 2, 2))
        A[:, 0, 0] = s_r * ct * ct + s_t * st * st
        A[:, 0, 1] = (s_r - s_t) * ct * st
        A[:, 1, 0] = A[:, 0, 1]
        A[:, 1, 1] = s_r * st * st + s_t * ct * ct
        return A

    def inverse(pts):
        d = pts - (cx, cy)
        rp = np.hypot(d[:, 0], d[:, 1])
        if np.any(rp < a - 1e-12 * b):
            raise DomainError("points with r' < a have no preimage under the cloak map")
        inside = rp < b
        factor = np.ones_like(rp)
        factor[inside] = (rp[inside] - a) / (slope * rp[inside])
        return (cx, cy) + d * factor[:, None]

    return Mapping(forward=forward, jacobian=jacobian, inverse=inverse, domain=None, name="cloak")


def bender_mapping(spec: BenderSpec) -> Mapping:
    """Conformal bender map: theta = c x, r = r1 exp(c y), c = phi / (k a).

    The image point is (r sin theta, r cos theta), so the angle is swept
    clockwise from the +y axis and the orientation stays positive.  The
    local stretch is c * r in both principal directions: the Jacobian is a
    scaled rotation at every point.
    """
    c = spec.angle_rate
    r1 = spec.r1
    ka = spec.k * spec.a

    def forward(pts):
        theta = c * pts[:, 0]
        r = r1 * np.exp(c * pts[:, 1])
        return np.column_stack([r * np.sin(theta), r * np.cos(theta)])

    def jacobian(pts):
        theta = c * pts[:, 0]
        r = r1 * np.exp(c * pts[:, 1])
        s = c * r
        A = np.empty((pts.shape[0], 2, 2))
        A[:, 0, 0] = s * np.cos(theta)
        A[:, 0, 1] = s * np.sin(theta)
        A[:, 1, 0] = -s * np.sin(theta)
        A[:, 1, 1] = s * np.cos(theta)
        return A

    def inverse(pts):
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 0], pts[:, 1])
        return np.column_stack([theta / c, np.log(r / r1) / c])

    return Mapping(
        forward=forward,
        jacobian=jacobian,
        inverse=inverse,
        domain=(0.0, ka, 0.0, spec.a),
        name="bender",
    )


def compose(outer: Mapping, inner: Mapping) -> Mapping:
    """outer after inner, with chain-rule Jacobian A_outer(inner(x)) A_inner(x)."""

    def forward(pts):
        mid = inner.forward(pts)
        _check_in_domain(outer, mid)
        return outer.forward(mid)

    def jacobian(pts):
        mid = inner.forward(pts)
        _check_in_domain(outer, mid)
        return np.einsum("nij,njk->nik", outer.jacobian_many(mid), inner.jacobian_many(pts))

    inverse = None
    if outer.inverse is not None and inner.inverse is not None:
        def inverse(pts):
            return inner.inverse(outer.inverse(pts))

    return Mapping(
        forward=forward,
        jacobian=jacobian,
        inverse=inverse,
        domain=inner.domain,
        name=f"{outer.name}*{inner.name}",
    )


def _check_in_domain(mapping: Mapping, pts: np.ndarray):
    if mapping.domain is None:
        return
    try:
        mapping._check_domain(pts)
    except DomainError as exc:
        raise CompositionError(
            f"range of inner map leaves the domain of {mapping.name!r}"
        ) from exc


# ---------------------------------------------------------------------------
# Parameter push-forward


def push_forward(sample: ParameterSample, A) -> ParameterSample:
    """Transform a material sample through Jacobian A per the form-invariance rule."""
    A = np.asarray(A, dtype=float).reshape(2, 2)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if det <= 0:
        raise DegenerateMapError(f"push-forward requires det(A) > 0, got {det:.3g}")
    alpha = A @ sample.alpha @ A.T / det
    return ParameterSample(
        rho=sample.rho / det,
        a11=alpha[0, 0],
        a12=0.5 * (alpha[0, 1] + alpha[1, 0]),
        a22=alpha[1, 1],
        beta=sample.beta / det,
        f=sample.f / det,
    )


def push_forward_arrays(mat: MaterialArrays, A: np.ndarray) -> MaterialArrays:
    """Vectorized push-forward; A has shape (n, 2, 2) with det > 0."""
    det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    if np.any(det <= 0):
        raise DegenerateMapError("push-forward requires det(A) > 0")
    a11, a12, a22 = mat.a11, mat.a12, mat.a22
    # rows of A alpha
    b11 = A[:, 0, 0] * a11 + A[:, 0, 1] * a12
    b12 = A[:, 0, 0] * a12 + A[:, 0, 1] * a22
    b21 = A[:, 1, 0] * a11 + A[:, 1, 1] * a12
    b22 = A[:, 1, 0] * a12 + A[:, 1, 1] * a22
    c11 = (b11 * A[:, 0, 0] + b12 * A[:, 0, 1]) / det
    c12 = (b11 * A[:, 1, 0] + b12 * A[:, 1, 1]) / det
    c22 = (b21 * A[:, 1, 0] + b22 * A[:, 1, 1]) / det
    return MaterialArrays(mat.rho / det, c11, c12, c22, mat.beta / det, mat.f / det)


def principal_to_cartesian(alpha_r: float, alpha_theta: float, theta: float) -> np.ndarray:
    """Rotate principal values (radial, tangential) into Cartesian components."""
    if alpha_r < 0 or alpha_theta < 0:
        raise ValidationError("principal values must be >= 0")
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [alpha_r * ct * ct + alpha_theta * st * st, (alpha_r - alpha_theta) * ct * st],
            [(alpha_r - alpha_theta) * ct * st, alpha_r * st * st + alpha_theta * ct * ct],
        ]
    )


# ---------------------------------------------------------------------------
# Cloak parameters (closed form)


def _cloak_arrays(spec: CloakSpec, base: ParameterSample, pts: np.ndarray) -> MaterialArrays:
    cx, cy = spec.center
    a, b, eps = spec.a, spec.b, spec.epsilon
    dx, dy = pts[:, 0] - cx, pts[:, 1] - cy
    rp = np.hypot(dx, dy)
    if np.any(rp < a * (1 - 1e-12)):
        raise DomainError("cloak parameters are undefined in the core r' < a")
    alpha0 = base.a11
    d = np.maximum(rp - a, eps * a)  # singularity clamp at the inner boundary
    ar = d / rp * alpha0
    at = rp / d * alpha0
    factor = (b / (b - a)) ** 2 * d / rp
    ct, st = dx / rp, dy / rp
    a11 = ar * ct * ct + at * st * st
    a12 = (ar - at) * ct * st
    a22 = ar * st * st + at * ct * ct
    out = MaterialArrays(
        factor * base.rho, a11, a12, a22, factor * base.beta, factor * base.f
    )
    outside = rp > b
    if np.any(outside):
        for arr, val in zip(
            out, (base.rho, base.a11, base.a12, base.a22, base.beta, base.f)
        ):
            arr[outside] = val
    return out


def cloak_params(spec: CloakSpec, base: ParameterSample, point) -> ParameterSample:
    """Closed-form cloak material at a point of the transformed (physical) space.

    Principal values: alpha_r' = (r'-a)/r' alpha, alpha_theta' = r'/(r'-a) alpha,
    and rho', beta', f' all scale by (b/(b-a))^2 (r'-a)/r'.  The factor (r'-a)
    is clamped to epsilon*a to regularize the inner-boundary singularity.
    Points beyond r' = b return the base sample unchanged.
    """
    if not base.is_isotropic:
        raise UnsupportedError("cloak design requires an isotropic base medium")
    arrays = _cloak_arrays(spec, base, np.asarray(point, dtype=float).reshape(1, 2))
    return ParameterSample(*(float(v[0]) for v in arrays))


def cloak_rule(spec: CloakSpec, base: ParameterSample):
    """Vectorized cloak material rule for use inside a ParameterField."""
    if not base.is_isotropic:
        raise UnsupportedError("cloak design requires an isotropic base medium")

    def rule(pts: np.ndarray) -> MaterialArrays:
        return _cloak_arrays(spec, base, pts)

    return rule


# ---------------------------------------------------------------------------
# Bender parameters


def bender_params_paper(spec: BenderSpec, base: ParameterSample, point) -> ParameterSample:
    """Published isotropic bender material: radial factor r*pi/(2a) on rho, beta, f.

    Only stated for phi = pi/2 and k = 1; anything else is rejected.  Note
    this variant differs from the push-forward of the conformal bender map
    (see bender_derived_rule); both are kept so experiments can compare them.
    """
    if abs(spec.phi - math.pi / 2) > 1e-12 or abs(spec.k - 1.0) > 1e-12:
        raise UnsupportedError("paper bender parameters require phi = pi/2 and k = 1")
    if not base.is_isotropic:
        raise UnsupportedError("bender design requires an isotropic base medium")
    pt = np.asarray(point, dtype=float).reshape(2)
    r = math.hypot(pt[0], pt[1])
    factor = r * math.pi / (2 * spec.a)
    return ParameterSample.isotropic(
        factor * base.rho, base.a11, factor * base.beta, factor * base.f
    )


def bender_paper_rule(spec: BenderSpec, base: ParameterSample):
    """Vectorized form of bender_params_paper."""
    bender_params_paper(spec, base, (spec.r1, 0.0))  # validate spec/base once

    def rule(pts: np.ndarray) -> MaterialArrays:
        r = np.hypot(pts[:, 0], pts[:, 1])
        factor = r * math.pi / (2 * spec.a)
        n = pts.shape[0]
        return MaterialArrays(
            factor * base.rho,
            np.full(n, base.a11),
            np.zeros(n),
            np.full(n, base.a11),
            factor * base.beta,
            factor * base.f,
        )

    return rule


def bender_derived_rule(spec: BenderSpec, base: ParameterSample):
    """Bender material obtained by pushing the base through the conformal map.

    The Jacobian is a scaled rotation with scale s = c*r (c = phi/(k a)), so
    alpha is unchanged and rho, beta, f divide by det A = s^2 = (c*r)^2.
    """
    if not base.is_isotropic:
        raise UnsupportedError("bender design requires an isotropic base medium")
    c = spec.angle_rate

    def rule(pts: np.ndarray) -> MaterialArrays:
        det = (c * np.hypot(pts[:, 0], pts[:, 1])) ** 2
        n = pts.shape[0]
        return MaterialArrays(
            base.rho / det,
            np.full(n, base.a11),
            np.zeros(n),
            np.full(n, base.a11),
            base.beta / det,
            base.f / det,
        )

    return rule
