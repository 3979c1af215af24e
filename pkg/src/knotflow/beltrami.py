"""ABC vector fields on the 3-torus and their contact geometry.

The two-parameter family (after normalization)

    u = (A sin z + C cos y,  B sin x + A cos z,  C sin y + B cos x)

on T^3 = (R / 2*pi*Z)^3 is a curl eigenfield for the flat metric and the
standard volume form: curl u = u exactly.  Consequently the flat-metric
1-form alpha = u^flat satisfies d(alpha) = contraction of u into the volume
form, alpha is a contact form wherever u is nonzero, and u / |u|^2 is its
Reeb field.  The reduced pressure of the corresponding steady Euler solution
is constant for such fields and carries no data, so it is not represented.

This module evaluates the field, its curl and divergence (closed form and
central differences), certifies or locates singular points, and checks the
Reeb conditions pointwise.  The round-sphere analogue (the standard tight
form on S^3 and its Reeb field, tangent to the Hopf fibres) supplies
reference values for the spherical side of the story.

All derivative-based quantities take a central-difference step ``h``; their
discretization error is O(h^2).  Everything here is a pure function of its
arguments and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

TWO_PI = 2.0 * math.pi

__all__ = [
    "AbcParams",
    "AbcSymmetry",
    "ContactFormValue",
    "NotNormalized",
    "NotOnSphere",
    "Point3",
    "Point4",
    "SingularPoint",
    "SingularityCertificate",
    "SingularityScan",
    "Vec3",
    "abc_contact_form",
    "abc_curl",
    "abc_divergence",
    "abc_singular_points",
    "abc_velocity",
    "contact_volume_density",
    "normalize_with_symmetry",
    "reeb_residual",
    "standard_sphere_reeb",
    "velocity_batch",
]


class NotNormalized(ValueError):
    """Parameters are not in the normalized form 1 = A >= B >= C >= 0."""


class SingularPoint(ValueError):
    """The field vanishes (to tolerance) where a nonzero value is required."""


class NotOnSphere(ValueError):
    """A 4-point is too far from the unit 3-sphere."""


def _wrap(value: float) -> float:
    value = value % TWO_PI
    if value >= TWO_PI or value < 0.0:
        value = 0.0
    return value


@dataclass(frozen=True)
class Point3:
    """A point of the 3-torus; coordinates are reduced to [0, 2*pi)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", _wrap(float(self.x)))
        object.__setattr__(self, "y", _wrap(float(self.y)))
        object.__setattr__(self, "z", _wrap(float(self.z)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_array(cls, arr) -> "Point3":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Vec3:
    """A velocity vector; the flat metric identifies it with a covector."""

    vx: float
    vy: float
    vz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])

    def norm(self) -> float:
        return math.sqrt(self.vx**2 + self.vy**2 + self.vz**2)

    @classmethod
    def from_array(cls, arr) -> "Vec3":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class ContactFormValue:
    """Coefficients of dx, dy, dz of the flat-metric contact form at a point.

    For the fields of this module the coefficients equal the velocity
    components, since alpha = u^flat.
    """

    ax: float
    ay: float
    az: float

    def __call__(self, v: Vec3) -> float:
        return self.ax * v.vx + self.ay * v.vy + self.az * v.vz

    def as_array(self) -> np.ndarray:
        return np.array([self.ax, self.ay, self.az])


@dataclass(frozen=True)
class Point4:
    """A point of R^4, expected on (or near) the unit 3-sphere."""

    x1: float
    x2: float
    x3: float
    x4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class AbcParams:
    """Coefficients of the field; construct via :meth:`normalized` to get
    the canonical ordering 1 = A >= B >= C >= 0."""

    A: float
    B: float
    C: float

    @property
    def is_nonsingular(self) -> bool:
        """True iff the normalized field vanishes nowhere (B^2 + C^2 < A^2)."""
        return self.B**2 + self.C**2 < self.A**2

    @property
    def is_normalized(self) -> bool:
        return (
            abs(self.A - 1.0) <= 1e-12
            and self.A >= self.B - 1e-12
            and self.B >= self.C - 1e-12
            and self.C >= -1e-12
        )

    @classmethod
    def normalized(cls, A: float, B: float, C: float) -> "AbcParams":
        params, _ = normalize_with_symmetry(A, B, C)
        return params

    def as_tuple(self):
        return (self.A, self.B, self.C)


# Generators of the coordinate/parameter symmetry.  Each realizes a
# parameter permutation through an affine map of the torus: the velocity
# field of the permuted parameters, evaluated at the mapped point, equals
# the permuted velocity components of the original field.
_CYCLE_M = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
_CYCLE_SHIFT = np.zeros(3)
_CYCLE_V = _CYCLE_M.copy()

_SWAP_AB_M = np.array([[0, 0, -1], [0, -1, 0], [-1, 0, 0]], dtype=float)
_SWAP_AB_SHIFT = np.array([math.pi / 2, math.pi / 2, math.pi / 2])
_SWAP_AB_V = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)


@dataclass(frozen=True)
class AbcSymmetry:
    """Witness relating a field to its normalized form.

    If (params_n, sym) = normalize_with_symmetry(A, B, C) then for every q

        velocity(params_n, sym.map_point(q)) == sym.map_vector(velocity(params, q)) / sym.scale
    """

    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    shift: np.ndarray = field(default_factory=lambda: np.zeros(3))
    vector_matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    scale: float = 1.0

    def map_point(self, q: Point3) -> Point3:
        return Point3.from_array(self.matrix @ q.as_array() + self.shift)

    def map_vector(self, v: Vec3) -> Vec3:
        return Vec3.from_array(self.vector_matrix @ v.as_array())

    def _compose(self, matrix, shift, vector_matrix) -> "AbcSymmetry":
        return AbcSymmetry(
            matrix=matrix @ self.matrix,
            shift=matrix @ self.shift + shift,
            vector_matrix=vector_matrix @ self.vector_matrix,
            scale=self.scale,
        )


def normalize_with_symmetry(A: float, B: float, C: float):
    """Reorder to A >= B >= C and rescale to A = 1; return the witness map.

    Inputs must be nonnegative (sign flips are half-period shifts and are
    not performed here) and not all zero.
    """
    if A < 0 or B < 0 or C < 0:
        raise ValueError("coefficients must be nonnegative")
    if A == B == C == 0:
        raise ValueError("zero field cannot be normalized")

    p = [float(A), float(B), float(C)]
    sym = AbcSymmetry()

    def swap_ab(s):
        return s._compose(_SWAP_AB_M, _SWAP_AB_SHIFT, _SWAP_AB_V)

    def swap_bc(s):
        # conjugate of the A<->B swap by the cyclic permutation
        s = s._compose(_SWAP_AB_M, _SWAP_AB_SHIFT, _SWAP_AB_V)
        return s._compose(_CYCLE_M, _CYCLE_SHIFT, _CYCLE_V)

    # three-element bubble sort, descending
    for _ in range(3):
        if p[0] < p[1]:
            p[0], p[1] = p[1], p[0]
            sym = swap_ab(sym)
        if p[1] < p[2]:
            p[1], p[2] = p[2], p[1]
            sym = swap_bc(sym)

    scale = p[0]
    params = AbcParams(1.0, p[1] / scale, p[2] / scale)
    sym = AbcSymmetry(sym.matrix, sym.shift, sym.vector_matrix, scale)
    return params, sym


def velocity_batch(p: AbcParams, points: np.ndarray) -> np.ndarray:
    """Velocity at an (..., 3) array of points; returns the same shape."""
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    return np.stack(
        [
            p.A * np.sin(z) + p.C * np.cos(y),
            p.B * np.sin(x) + p.A * np.cos(z),
            p.C * np.sin(y) + p.B * np.cos(x),
        ],
        axis=-1,
    )


def velocity_jacobian(p: AbcParams, points: np.ndarray) -> np.ndarray:
    """Exact Jacobian of the velocity at an (..., 3) array; shape (..., 3, 3)."""
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    zero = np.zeros_like(x)
    return np.stack(
        [
            np.stack([zero, -p.C * np.sin(y), p.A * np.cos(z)], axis=-1),
            np.stack([p.B * np.cos(x), zero, -p.A * np.sin(z)], axis=-1),
            np.stack([-p.B * np.sin(x), p.C * np.cos(y), zero], axis=-1),
        ],
        axis=-2,
    )


def abc_velocity(p: AbcParams, q: Point3) -> Vec3:
    """Velocity (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)."""
    return Vec3.from_array(velocity_batch(p, q.as_array()))


def _curl_fd_batch(p: AbcParams, points: np.ndarray, h: float) -> np.ndarray:
    """Central-difference curl at an (..., 3) array of points."""

    def shifted(axis, sign):
        shifted_pts = points.copy()
        shifted_pts[..., axis] = shifted_pts[..., axis] + sign * h
        return velocity_batch(p, shifted_pts)

    d_dx = (shifted(0, +1) - shifted(0, -1)) / (2 * h)
    d_dy = (shifted(1, +1) - shifted(1, -1)) / (2 * h)
    d_dz = (shifted(2, +1) - shifted(2, -1)) / (2 * h)
    return np.stack(
        [
            d_dy[..., 2] - d_dz[..., 1],
            d_dz[..., 0] - d_dx[..., 2],
            d_dx[..., 1] - d_dy[..., 0],
        ],
        axis=-1,
    )


def abc_curl(p: AbcParams, q: Point3, mode: str = "closed_form", h: float = 1e-4) -> Vec3:
    """Curl of the field at q.

    ``closed_form`` uses the eigenfield identity curl u = u and simply
    returns the velocity; ``finite_difference`` assembles the curl from
    central differences with step ``h`` and serves as the independent check
    of that identity.
    """
    if mode == "closed_form":
        return abc_velocity(p, q)
    if mode == "finite_difference":
        if h <= 0:
            raise ValueError("h must be positive")
        return Vec3.from_array(_curl_fd_batch(p, q.as_array(), h))
    raise ValueError(f"unknown mode {mode!r}")


def divergence_batch(p: AbcParams, points: np.ndarray, h: float) -> np.ndarray:
    """Central-difference divergence; analytically zero for every ABC field."""
    if h <= 0:
        raise ValueError("h must be positive")
    total = 0.0
    for axis in range(3):
        plus = points.copy()
        plus[..., axis] += h
        minus = points.copy()
        minus[..., axis] -= h
        diff = velocity_batch(p, plus) - velocity_batch(p, minus)
        total = total + diff[..., axis] / (2 * h)
    return total


def abc_divergence(p: AbcParams, q: Point3, h: float = 1e-4) -> float:
    return float(divergence_batch(p, q.as_array(), h))


def abc_contact_form(p: AbcParams, q: Point3) -> ContactFormValue:
    """The flat-metric 1-form at q; coefficients equal the velocity."""
    v = abc_velocity(p, q)
    return ContactFormValue(v.vx, v.vy, v.vz)


def contact_volume_density(p: AbcParams, q: Point3, h: float = 1e-4) -> float:
    """(alpha ^ d alpha) / (dx ^ dy ^ dz) at q, with d alpha by differences.

    Equals u . curl u, hence |u|^2 up to O(h^2) for these fields; it
    vanishes exactly at singular points, where the form degenerates.
    """
    point = q.as_array()
    u = velocity_batch(p, point)
    curl_fd = _curl_fd_batch(p, point, h)
    return float(np.dot(u, curl_fd))


def reeb_residual(p: AbcParams, q: Point3, h: float = 1e-4, tol: float = 1e-8):
    """Residuals of the Reeb conditions for X = u / |u|^2.

    Returns (r1, r2) where r1 = |alpha(X) - 1| (algebraically zero) and r2
    is the sup over coordinate directions of |d alpha (X, e_i)| with
    d alpha assembled from the finite-difference curl.  Raises
    :class:`SingularPoint` when |u| < tol.
    """
    point = q.as_array()
    u = velocity_batch(p, point)
    speed2 = float(np.dot(u, u))
    if math.sqrt(speed2) < tol:
        raise SingularPoint(f"|u| = {math.sqrt(speed2):.3e} at {q}")
    reeb = u / speed2
    r1 = abs(float(np.dot(u, reeb)) - 1.0)
    # d alpha (v, w) = det[curl u, v, w]; contracting with X leaves the
    # cross product of the finite-difference curl with X.
    curl_fd = _curl_fd_batch(p, point, h)
    r2 = float(np.max(np.abs(np.cross(curl_fd, reeb))))
    return r1, r2


@dataclass(frozen=True)
class SingularityCertificate:
    """Outcome of the singular-point scan.

    For nonsingular parameters ``min_speed`` is the refined grid minimum of
    |u| (strictly positive); for singular parameters it is the smallest |u|
    among the refined zeros (zero to tolerance).
    """

    nonsingular: bool
    min_speed: float
    argmin: Point3
    grid_n: int


@dataclass(frozen=True)
class SingularityScan:
    points: tuple
    certificate: SingularityCertificate


def _grid(grid_n: int) -> np.ndarray:
    axis = np.linspace(0.0, TWO_PI, grid_n, endpoint=False)
    gx, gy, gz = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.stack([gx, gy, gz], axis=-1).reshape(-1, 3)


def _speed2_and_grad(p: AbcParams, pt: np.ndarray):
    u = velocity_batch(p, pt)
    jac = velocity_jacobian(p, pt)
    return float(np.dot(u, u)), 2.0 * jac.T @ u


def _refine_zero(p: AbcParams, seed: np.ndarray, tol: float):
    """Damped Gauss-Newton on u(q) = 0; least squares handles the rank drop
    along nonisolated zero sets."""
    q = seed.astype(float).copy()
    value = float(np.dot(velocity_batch(p, q), velocity_batch(p, q)))
    for _ in range(60):
        u = velocity_batch(p, q)
        if np.linalg.norm(u) < tol:
            return q, True
        jac = velocity_jacobian(p, q)
        step, *_ = np.linalg.lstsq(jac, -u, rcond=None)
        lam = 1.0
        for _ in range(12):
            trial = q + lam * step
            u_t = velocity_batch(p, trial)
            trial_value = float(np.dot(u_t, u_t))
            if trial_value < value:
                q, value = trial, trial_value
                break
            lam *= 0.5
        else:
            break
    return q, np.linalg.norm(velocity_batch(p, q)) < tol


def abc_singular_points(
    p: AbcParams, grid_n: int = 64, tol: float = 1e-10
) -> SingularityScan:
    """Certify nonsingularity or locate the zeros of the field.

    Requires normalized parameters.  Nonsingular parameters (B^2 + C^2 < 1)
    yield an empty point list together with a certified positive grid
    minimum of |u|; otherwise the zeros found by grid seeding plus damped
    Newton are returned (a nonisolated zero set comes back as a sample of
    points along it).
    """
    if not p.is_normalized:
        raise NotNormalized(f"{p} is not in the form 1 = A >= B >= C >= 0")
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")

    pts = _grid(grid_n)
    u = velocity_batch(p, pts)
    speed2 = np.einsum("ij,ij->i", u, u)

    if p.is_nonsingular:
        best = pts[int(np.argmin(speed2))]
        res = minimize(
            lambda q: _speed2_and_grad(p, q),
            best,
            jac=True,
            method="L-BFGS-B",
        )
        min_speed = math.sqrt(max(res.fun, 0.0))
        cert = SingularityCertificate(
            nonsingular=True,
            min_speed=min_speed,
            argmin=Point3.from_array(res.x),
            grid_n=grid_n,
        )
        return SingularityScan(points=(), certificate=cert)

    spacing = TWO_PI / grid_n
    # any zero lies within half a grid diagonal of a node, and the field is
    # Lipschitz with constant |J|_F = sqrt(A^2 + B^2 + C^2) exactly
    lip = math.sqrt(p.A**2 + p.B**2 + p.C**2)
    threshold = (1.5 * lip * spacing * math.sqrt(3.0) / 2.0) ** 2
    seeds = pts[speed2 < threshold]

    found = []
    for seed in seeds:
        q, ok = _refine_zero(p, seed, tol)
        if not ok:
            continue
        q = np.array([_wrap(v) for v in q])
        if all(_torus_distance(q, other) > 1e-6 for other in found):
            found.append(q)
    found.sort(key=tuple)
    speeds = [float(np.linalg.norm(velocity_batch(p, q))) for q in found]
    min_idx = int(np.argmin(speeds)) if speeds else 0
    cert = SingularityCertificate(
        nonsingular=False,
        min_speed=min(speeds) if speeds else 0.0,
        argmin=Point3.from_array(found[min_idx]) if found else Point3(0, 0, 0),
        grid_n=grid_n,
    )
    return SingularityScan(
        points=tuple(Point3.from_array(q) for q in found), certificate=cert
    )


def _torus_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(a - b) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return float(np.linalg.norm(d))


def standard_sphere_reeb(q: Point4, tol: float = 1e-9):
    """Reeb field of the round contact form on the unit S^3 in R^4.

    The form is (x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3) / 2 and its Reeb field
    X0 = 2(-x2, x1, -x4, x3) spans the Hopf fibre direction.  Returns
    (X0 as a 4-tuple, value of the form on X0); the value is exactly 1 on
    the unit sphere.  Raises :class:`NotOnSphere` if | |q| - 1 | > tol.
    """
    arr = q.as_array()
    if abs(np.linalg.norm(arr) - 1.0) > tol:
        raise NotOnSphere(f"|q| = {np.linalg.norm(arr):.12f}")
    x1, x2, x3, x4 = arr
    reeb = np.array([-2 * x2, 2 * x1, -2 * x4, 2 * x3])
    alpha_on_reeb = 0.5 * (
        x1 * reeb[1] - x2 * reeb[0] + x3 * reeb[3] - x4 * reeb[2]
    )
    return tuple(float(v) for v in reeb), float(alpha_on_reeb)
