"""Characteristic foliations of annuli in the model structure dz + r^2 dtheta.

A surface of revolution-free graph r = sqrt(g(theta, z)) over the annulus
S^1 x [-1, 1] meets the kernel planes of lambda = dz + r^2 dtheta in a line
field of slope dz/dtheta = -g: strictly negative whenever g > 0, so the
leaves run monotonically and sliding along them from z = -1 to z = +1
defines a circle map, the monodromy of the surface.

The builder inverts this: given an orientation-preserving circle map f it
produces a foliated annulus whose monodromy is f, with boundary slope
pinned to -eps^2 so that the boundary circles sit at radius eps.  Leaves
are clamped Hermite cubics from (theta, -1) to (f(theta) - 2*pi*k, +1); the
winding k is the smallest making every leaf slope safely negative.  The
monodromy reader integrates the leaf equation d theta / dz = -1/g from the
stored grid alone, so builder and reader check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator, RectBivariateSpline
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi

__all__ = [
    "AnnulusSurface",
    "CircleMap",
    "NotMonotone",
    "SlopeSignViolation",
    "SurfacePatch",
    "TangencyReport",
    "annulus_from_monodromy",
    "annulus_monodromy",
    "characteristic_slope",
    "circle_map_distance",
    "transversality_check",
]


class NotMonotone(ValueError):
    """The circle map is not orientation-preserving."""


class SlopeSignViolation(RuntimeError):
    """A leaf slope fails to be negative; refine the grid or add winding."""


def characteristic_slope(r: float) -> float:
    """Slope dz/dtheta of the characteristic line on the cylinder r = const.

    At r = 0 the kernel plane contains the axis direction and the line
    field degenerates; the returned 0 is the limit slope.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return -(r * r)


@dataclass(frozen=True)
class CircleMap:
    """Orientation data for a circle map, stored as uniform lift samples.

    ``lift_samples[k]`` is the lift value at theta = 2*pi*k/N; a valid lift
    satisfies F(theta + 2*pi) = F(theta) + 2*pi.  Interpolation is monotone
    cubic (PCHIP), so strictly increasing samples give a strictly
    increasing interpolant.
    """

    lift_samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.lift_samples, dtype=float)
        if samples.ndim != 1 or len(samples) < 8:
            raise ValueError("need a 1-d array of at least 8 lift samples")
        object.__setattr__(self, "lift_samples", samples)

    @classmethod
    def rotation(cls, delta: float, n: int = 256) -> "CircleMap":
        theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return cls(theta + delta)

    @classmethod
    def from_function(cls, lift, n: int = 256) -> "CircleMap":
        """Sample a lift callable; it must satisfy F(t + 2*pi) = F(t) + 2*pi."""
        theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return cls(np.array([float(lift(t)) for t in theta]))

    @property
    def n(self) -> int:
        return len(self.lift_samples)

    @cached_property
    def _interpolator(self):
        theta = np.linspace(0.0, TWO_PI, self.n + 1)
        values = np.append(self.lift_samples, self.lift_samples[0] + TWO_PI)
        return PchipInterpolator(theta, values)

    def is_orientation_preserving(self) -> bool:
        extended = np.append(self.lift_samples, self.lift_samples[0] + TWO_PI)
        if np.any(np.diff(extended) <= 0):
            return False
        derivative = self._interpolator.derivative()
        grid = np.linspace(0.0, TWO_PI, 4 * self.n)
        return bool(np.all(derivative(grid) > 0))

    def lift(self, theta):
        theta = np.asarray(theta, dtype=float)
        reduced = np.mod(theta, TWO_PI)
        return self._interpolator(reduced) + (theta - reduced)

    def __call__(self, theta):
        return np.mod(self.lift(theta), TWO_PI)

    def compose(self, inner: "CircleMap") -> "CircleMap":
        """The map self o inner, sampled on this map's grid size."""
        theta = np.linspace(0.0, TWO_PI, self.n, endpoint=False)
        return CircleMap(self.lift(inner.lift(theta)))

    def max_drop(self) -> tuple[float, float]:
        """(min, max) of F(theta) - theta over a dense grid."""
        grid = np.linspace(0.0, TWO_PI, 8 * self.n)
        displacement = self.lift(grid) - grid
        return float(displacement.min()), float(displacement.max())


def circle_map_distance(f: CircleMap, g: CircleMap, n: int = 1024) -> float:
    """Sup distance of the lifts up to the global 2*pi*k ambiguity."""
    grid = np.linspace(0.0, TWO_PI, n, endpoint=False)
    diff = f.lift(grid) - g.lift(grid)
    offset = TWO_PI * round(float(np.mean(diff)) / TWO_PI)
    return float(np.max(np.abs(diff - offset)))


@dataclass(frozen=True)
class AnnulusSurface:
    """The graph r = sqrt(g) over a uniform (theta, z) grid on S^1 x [-1, 1].

    g must be positive with boundary rows equal to eps^2 (the boundary
    circles then sit at radius eps with leaf slope exactly -eps^2).
    ``winding`` records how many extra negative wraps the construction
    inserted (0 when the raw drop of the monodromy sufficed).
    """

    theta: np.ndarray
    z: np.ndarray
    g: np.ndarray
    eps: float
    winding: int = 0

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        z = np.asarray(self.z, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if g.shape != (len(theta), len(z)):
            raise ValueError("g must be sampled on the (theta, z) grid")
        if not np.allclose(np.diff(theta), TWO_PI / len(theta), rtol=0, atol=1e-9):
            raise ValueError("theta grid must be uniform over [0, 2*pi)")
        if abs(z[0] + 1.0) > 1e-12 or abs(z[-1] - 1.0) > 1e-12:
            raise ValueError("z grid must span [-1, 1]")
        if np.any(g <= 0):
            raise ValueError("g must be positive")
        boundary = self.eps**2
        if not (
            np.allclose(g[:, 0], boundary, rtol=1e-9, atol=1e-12)
            and np.allclose(g[:, -1], boundary, rtol=1e-9, atol=1e-12)
        ):
            raise ValueError("boundary rows of g must equal eps^2")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "g", g)

    @classmethod
    def constant(cls, value: float, n_theta: int = 256, n_z: int = 33) -> "AnnulusSurface":
        theta = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        z = np.linspace(-1.0, 1.0, n_z)
        g = np.full((n_theta, n_z), float(value))
        return cls(theta, z, g, eps=math.sqrt(value))

    @cached_property
    def _interpolator(self):
        pad = 4
        idx = np.arange(-pad, len(self.theta) + pad)
        theta_ext = idx * (TWO_PI / len(self.theta))
        g_ext = self.g[np.mod(idx, len(self.theta)), :]
        return RectBivariateSpline(theta_ext, self.z, g_ext, kx=3, ky=3, s=0)

    def g_at(self, theta, z):
        return self._interpolator.ev(np.mod(theta, TWO_PI), z)


# Hermite basis on the unit parameter; a leaf from (theta0, -1) to
# (theta0 + drop, +1) with clamped end derivative d (in unit parameter)
# has theta(tau) = theta0 + drop*h01(tau) + d*(h10 + h11)(tau).


def _leaf_position(theta0, drop, d, tau):
    h01 = tau * tau * (3.0 - 2.0 * tau)
    h10_11 = tau * (2.0 * tau * tau - 3.0 * tau + 1.0)
    return theta0 + drop * h01 + d * h10_11


def _leaf_derivative(drop, d, tau):
    # derivative in unit parameter: strictly negative iff drop < d/3
    return 6.0 * (tau - tau * tau) * (drop - d) + d


def annulus_from_monodromy(
    f: CircleMap,
    eps: float = 1.0,
    grid: tuple[int, int] = (256, 65),
    winding: int | None = None,
) -> AnnulusSurface:
    """Foliated annulus whose boundary-to-boundary monodromy is f.

    The end slope is clamped to -eps^2 at z = +-1, so in unit parameter the
    leaf derivative is d = -2/eps^2 at both ends.  The Hermite leaf stays
    strictly decreasing iff its total drop is below d/3; the winding k
    (leaves end at lift value F(theta) - 2*pi*k) is chosen minimal with a
    20% safety margin, or taken from ``winding`` (= -k) when given.
    Raises NotMonotone for a non-orientation-preserving map and
    SlopeSignViolation if the requested winding leaves a nonnegative slope.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not f.is_orientation_preserving():
        raise NotMonotone("monodromy must be an orientation-preserving circle map")
    n_theta, n_z = grid
    if n_theta < 16 or n_z < 5:
        raise ValueError("grid too coarse")

    d = -2.0 / (eps * eps)
    drop_min, drop_max = f.max_drop()
    if winding is None:
        # smallest k with drop_max - 2*pi*k <= 0.4*d  (margin inside d/3)
        k = max(0, math.ceil((drop_max - 0.4 * d) / TWO_PI))
    else:
        k = -int(winding)
    if drop_max - TWO_PI * k >= d / 3.0:
        raise SlopeSignViolation(
            f"winding {-k} leaves a nonnegative leaf slope; decrease winding "
            f"(drops in [{drop_min:.3f}, {drop_max:.3f}], need < {d / 3.0:.3f})"
        )

    theta_grid = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    z_grid = np.linspace(-1.0, 1.0, n_z)
    tau_grid = (z_grid + 1.0) / 2.0
    g = np.empty((n_theta, n_z))
    g[:, 0] = eps * eps
    g[:, -1] = eps * eps

    def drop_of(theta0):
        return f.lift(theta0) - theta0 - TWO_PI * k

    span_lo = drop_min - TWO_PI * k
    span_hi = drop_max - TWO_PI * k
    c_max = abs(d) * (math.sqrt(3.0) / 18.0)  # max |(h10+h11)| contribution
    for j in range(1, n_z - 1):
        tau = tau_grid[j]
        h01 = tau * tau * (3.0 - 2.0 * tau)
        shift_lo = span_lo * h01 - c_max - 0.1
        shift_hi = span_hi * h01 + c_max + 0.1
        for i, target in enumerate(theta_grid):
            def node_eq(theta0):
                return _leaf_position(theta0, drop_of(theta0), d, tau) - target

            root = brentq(node_eq, target - shift_hi, target - shift_lo, xtol=1e-12)
            slope = _leaf_derivative(drop_of(root), d, tau)
            if slope >= 0:
                raise SlopeSignViolation("leaf slope became nonnegative on the grid")
            g[i, j] = -2.0 / slope

    return AnnulusSurface(theta_grid, z_grid, g, eps=float(eps), winding=-k)


def annulus_monodromy(a: AnnulusSurface, tol: float = 1e-8) -> CircleMap:
    """Monodromy of a foliated annulus read off its stored grid.

    Integrates the leaf equation d theta / dz = -1/g(theta, z) from z = -1
    to z = +1 for every theta sample, with g interpolated bicubically from
    the grid; independent of how the surface was produced.
    """
    interpolator = a._interpolator

    def rhs(z, theta):
        return [-1.0 / float(interpolator.ev(theta[0] % TWO_PI, z))]

    ends = []
    for theta0 in a.theta:
        sol = solve_ivp(
            rhs,
            (-1.0, 1.0),
            [theta0],
            method="RK45",
            rtol=tol,
            atol=tol,
        )
        if not sol.success:
            raise RuntimeError(f"leaf integration failed: {sol.message}")
        ends.append(sol.y[0, -1])
    samples = np.asarray(ends)
    if np.any(np.diff(np.append(samples, samples[0] + TWO_PI)) <= 0):
        raise RuntimeError("computed monodromy is not orientation-preserving")
    return CircleMap(samples)


@dataclass(frozen=True)
class SurfacePatch:
    """Parametric surface sampled in cylindrical coordinates on a 2-d grid.

    ``periodic_axis`` marks a grid axis that wraps (the angular direction
    of a closed surface); finite differences wrap along it.
    """

    r: np.ndarray
    theta: np.ndarray
    z: np.ndarray
    periodic_axis: int | None = None

    def cartesian(self) -> np.ndarray:
        return np.stack(
            [self.r * np.cos(self.theta), self.r * np.sin(self.theta), self.z],
            axis=-1,
        )


@dataclass(frozen=True)
class TangencyReport:
    transverse: bool
    tangencies: tuple


def _grid_tangents(points: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(points, -1, axis=axis) - np.roll(points, 1, axis=axis)) / 2.0
    forward = np.diff(points, axis=axis)
    first = np.take(forward, [0], axis=axis)
    last = np.take(forward, [-1], axis=axis)
    inner = (
        np.take(points, range(2, points.shape[axis]), axis=axis)
        - np.take(points, range(points.shape[axis] - 2), axis=axis)
    ) / 2.0
    return np.concatenate([first, inner, last], axis=axis)


def transversality_check(surface, tol: float = 1e-9) -> TangencyReport:
    """Locate grid points where the surface is tangent to ker(dz + r^2 dtheta).

    Works on an :class:`AnnulusSurface` (its graph is transverse whenever
    g > 0) or a general :class:`SurfacePatch`.  The form is evaluated in
    its smooth Cartesian incarnation dz + x dy - y dx; a grid point is
    flagged when the form annihilates both grid tangent directions.
    """
    if isinstance(surface, AnnulusSurface):
        r = np.sqrt(surface.g)
        patch = SurfacePatch(
            r=r,
            theta=np.broadcast_to(surface.theta[:, None], r.shape).copy(),
            z=np.broadcast_to(surface.z[None, :], r.shape).copy(),
            periodic_axis=0,
        )
    else:
        patch = surface

    points = patch.cartesian()
    x, y = points[..., 0], points[..., 1]
    scale = max(float(np.max(np.linalg.norm(points, axis=-1))), 1.0)
    flagged_everywhere = None
    for axis in (0, 1):
        tangent = _grid_tangents(points, axis, periodic=(patch.periodic_axis == axis))
        lam = tangent[..., 2] + x * tangent[..., 1] - y * tangent[..., 0]
        magnitude = np.linalg.norm(tangent, axis=-1)
        annihilated = np.abs(lam) <= tol * np.maximum(magnitude, 1e-6 * scale)
        flagged_everywhere = (
            annihilated if flagged_everywhere is None else flagged_everywhere & annihilated
        )

    indices = np.argwhere(flagged_everywhere)
    tangencies = tuple(
        (int(i), int(j), float(patch.r[i, j]), float(patch.theta[i, j]), float(patch.z[i, j]))
        for i, j in indices
    )
    return TangencyReport(transverse=len(tangencies) == 0, tangencies=tangencies)
