"""Numerical flow machinery for the torus fields.

Trajectories are integrated in the universal cover (angles are never
reduced mid-flight, so winding information survives) by an adaptive
embedded Runge-Kutta pair; reduction to [0, 2*pi) happens only at the
reporting boundary.  On top of the integrator sit Poincare return maps
with directed crossing detection, Newton shooting for periodic orbits with
the variational equations supplying the return-map Jacobian, Floquet
multipliers of the transverse monodromy, and the separatrix-splitting
measurement for the near-integrable parameter regime.

The integrable reference case is (A, B, C) = (1, B, 0): the (x, z)
subsystem is Hamiltonian with first integral H = -B sin x - cos z, the
y-velocity equals -H, and the subsystem saddle at (pi/2, pi) suspends to a
hyperbolic periodic orbit whose homoclinic surfaces split once C > 0; the
splitting profile measures that splitting on a fixed transversal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from knotflow.beltrami import AbcParams, Point3, velocity_batch, velocity_jacobian

TWO_PI = 2.0 * math.pi
_COORDS = "xyz"
_CHUNK = 25.0

__all__ = [
    "NoConvergence",
    "NoReturn",
    "PeriodicOrbit",
    "SectionSpec",
    "SplittingProfile",
    "StepUnderflow",
    "Trajectory",
    "WrongParams",
    "find_periodic_orbit",
    "first_integral_drift",
    "floquet",
    "flow_map",
    "integrate",
    "poincare_map",
    "separatrix_splitting",
]


class StepUnderflow(RuntimeError):
    """The adaptive step size collapsed."""


class WrongParams(ValueError):
    """Operation requires a different parameter regime."""


class NoReturn(RuntimeError):
    """No directed section crossing within the time budget."""


class NoConvergence(RuntimeError):
    """Newton shooting failed to converge."""


def _rhs(p: AbcParams):
    def rhs(t, y):
        return velocity_batch(p, y)

    return rhs


def _augmented_rhs(p: AbcParams):
    def rhs(t, y):
        q = y[:3]
        m = y[3:].reshape(3, 3)
        u = velocity_batch(p, q)
        dm = velocity_jacobian(p, q) @ m
        return np.concatenate([u, dm.ravel()])

    return rhs


def _internal_tols(tol: float) -> float:
    # per-step control tighter than the advertised trajectory tolerance
    return max(tol * 1e-3, 1e-13)


def _solve(p, y0, t_span, tol, augmented=False, dense=False, events=None):
    fun = _augmented_rhs(p) if augmented else _rhs(p)
    inner = _internal_tols(tol)
    sol = solve_ivp(
        fun,
        t_span,
        np.asarray(y0, dtype=float),
        method="DOP853",
        rtol=inner,
        atol=inner,
        dense_output=dense,
        events=events,
    )
    if sol.status == -1:
        if "step size" in sol.message.lower():
            raise StepUnderflow(sol.message)
        raise RuntimeError(sol.message)
    return sol


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution curve; ``lifted`` keeps the unreduced angles."""

    params: AbcParams
    times: np.ndarray
    lifted: np.ndarray
    tol: float

    @property
    def points(self) -> np.ndarray:
        return np.mod(self.lifted, TWO_PI)

    @property
    def samples(self) -> list:
        return [
            (float(t), Point3.from_array(q))
            for t, q in zip(self.times, self.lifted)
        ]


def integrate(p: AbcParams, q0: Point3, t_end: float, tol: float = 1e-10) -> Trajectory:
    """Flow from q0 for time t_end at trajectory accuracy ~tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    y0 = q0.as_array()
    if t_end == 0:
        return Trajectory(p, np.array([0.0]), y0[None, :], tol)
    sol = _solve(p, y0, (0.0, t_end), tol)
    return Trajectory(p, sol.t.copy(), sol.y.T.copy(), tol)


def flow_map(p: AbcParams, q: Point3, t: float, tol: float = 1e-10) -> Point3:
    """Time-t flow image of a point (t may be negative)."""
    if t == 0:
        return q
    sol = _solve(p, q.as_array(), (0.0, t), tol)
    return Point3.from_array(sol.y[:, -1])


def first_integral_drift(traj: Trajectory) -> float:
    """Max drift of H = -B sin x - A cos z along a C = 0 trajectory."""
    p = traj.params
    if p.C != 0:
        raise WrongParams("the first integral exists only for C = 0")
    x = traj.lifted[:, 0]
    z = traj.lifted[:, 2]
    h = -p.B * np.sin(x) - p.A * np.cos(z)
    return float(np.max(np.abs(h - h[0])))


@dataclass(frozen=True)
class SectionSpec:
    """Coordinate section {coordinate = value}; direction picks the sign of
    the coordinate velocity at counted crossings (+1, -1, or 0 for both)."""

    coordinate: str
    value: float
    direction: int = -1

    def __post_init__(self):
        if self.coordinate not in _COORDS:
            raise ValueError("coordinate must be one of x, y, z")
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0, or +1")
        object.__setattr__(self, "value", float(self.value) % TWO_PI)

    @property
    def index(self) -> int:
        return _COORDS.index(self.coordinate)


def _first_crossing(p, y0, section, max_time, tol, augmented):
    """First directed crossing time and full state; scans dense output of
    successive chunks and polishes each candidate with brentq."""
    idx = section.index
    t_start = 0.0
    state = np.asarray(y0, dtype=float)
    t_min = 1e-9
    while t_start < max_time - 1e-12:
        t_stop = min(t_start + _CHUNK, max_time)
        sol = _solve(p, state, (t_start, t_stop), tol, augmented=augmented, dense=True)
        mesh = sol.t
        # quarter-step refinement guards against double crossings per step
        fine = np.unique(
            np.concatenate(
                [mesh, (mesh[:-1] + mesh[1:]) / 2,
                 mesh[:-1] * 0.75 + mesh[1:] * 0.25,
                 mesh[:-1] * 0.25 + mesh[1:] * 0.75]
            )
        )
        cvals = sol.sol(fine)[idx]
        candidate = None
        for a, b, ca, cb in zip(fine[:-1], fine[1:], cvals[:-1], cvals[1:]):
            lo, hi = (ca, cb) if ca <= cb else (cb, ca)
            k_lo = math.ceil((lo - section.value) / TWO_PI - 1e-13)
            k_hi = math.floor((hi - section.value) / TWO_PI + 1e-13)
            for k in range(k_lo, k_hi + 1):
                level = section.value + TWO_PI * k
                fa, fb = ca - level, cb - level
                if fa == 0.0:
                    t_hit = a
                elif fa * fb < 0:
                    t_hit = brentq(
                        lambda t: sol.sol(t)[idx] - level, a, b, xtol=1e-12
                    )
                else:
                    continue
                if t_hit <= t_min:
                    continue
                full = sol.sol(t_hit)
                speed = float(velocity_batch(p, full[:3])[idx])
                if section.direction != 0 and speed * section.direction <= 0:
                    continue
                if abs(speed) < 1e-12:
                    continue
                if candidate is None or t_hit < candidate[0]:
                    candidate = (t_hit, full)
            if candidate is not None:
                break
        if candidate is not None:
            return candidate
        t_start = t_stop
        state = sol.y[:, -1]
    raise NoReturn(f"no directed crossing of {section.coordinate} = {section.value:.6f}")


def poincare_map(
    p: AbcParams,
    s: SectionSpec,
    q0: Point3,
    max_time: float = 200.0,
    tol: float = 1e-10,
):
    """First directed return to the section; (return point, flight time)."""
    t_hit, state = _first_crossing(p, q0.as_array(), s, max_time, tol, augmented=False)
    return Point3.from_array(state[:3]), float(t_hit)


def _centered(delta):
    return (np.asarray(delta) + math.pi) % TWO_PI - math.pi


def _transverse_indices(idx):
    return [i for i in range(3) if i != idx]


def _project_return_jacobian(m, u_return, idx):
    """Derivative of the section return map from the flow monodromy:
    rows/columns restricted to the transverse coordinates, corrected by the
    flight-time variation along the flow direction."""
    trans = _transverse_indices(idx)
    uc = u_return[idx]
    dr = np.empty((2, 2))
    for a, ia in enumerate(trans):
        for b, ib in enumerate(trans):
            dr[a, b] = m[ia, ib] - (u_return[ia] / uc) * m[idx, ib]
    return dr


@dataclass(frozen=True)
class PeriodicOrbit:
    """Closed orbit located by shooting; multipliers are the eigenvalues of
    the transverse return-map linearization."""

    base: Point3
    period: float
    multipliers: tuple
    residual: float

    @property
    def classification(self) -> str:
        lam = max(self.multipliers, key=abs)
        if abs(lam.imag) > 1e-9:
            return "elliptic" if abs(abs(lam) - 1.0) < 1e-6 else "complex"
        return "hyperbolic" if abs(lam.real) > 1.0 + 1e-9 else "parabolic"

    @property
    def is_hyperbolic(self) -> bool:
        return self.classification == "hyperbolic"


def _sorted_multipliers(dr):
    lams = np.linalg.eigvals(dr)
    order = np.argsort(-np.abs(lams))
    return tuple(complex(lams[i]) for i in order)


class _MultipleShooting:
    """Free-period multiple shooting anchored to a directed section.

    Unknowns: the two transverse coordinates of the section point, the
    interior segment endpoints, and the period.  Residuals: segment
    continuity plus closure, with the section coordinate required to
    advance by one full turn in the section direction over the period.
    Splitting the period into segments keeps each piece inside Newton's
    linear regime even when the orbit multiplier is of order 10^4, where
    single shooting's basin collapses.
    """

    def __init__(self, p, s: SectionSpec, segments: int, tol: float):
        self.p = p
        self.idx = s.index
        self.trans = _transverse_indices(s.index)
        self.value = s.value
        self.winding = s.direction
        self.segments = segments
        self.tol = tol

    def assemble(self, points, period):
        """points: (segments, 3) segment starts; returns residual vector,
        Jacobian, and the segment monodromies."""
        m_count = self.segments
        dt = period / m_count
        ends = np.empty((m_count, 3))
        monos = np.empty((m_count, 3, 3))
        for j in range(m_count):
            y0 = np.concatenate([points[j], np.eye(3).ravel()])
            sol = _solve(self.p, y0, (0.0, dt), self.tol, augmented=True)
            state = sol.y[:, -1]
            ends[j] = state[:3]
            monos[j] = state[3:].reshape(3, 3)

        residual = np.empty(3 * m_count)
        for j in range(m_count - 1):
            residual[3 * j : 3 * j + 3] = ends[j] - points[j + 1]
        closure_target = points[0].copy()
        closure_target[self.idx] += TWO_PI * self.winding
        gap = ends[-1] - closure_target
        gap[self.trans] = _centered(gap[self.trans])
        residual[-3:] = gap

        # column layout: [xi_a, xi_b, q_1 .. q_{m-1}, T]
        n = 3 * m_count
        jac = np.zeros((n, n))
        u_ends = velocity_batch(self.p, ends)
        for j in range(m_count):
            rows = slice(3 * j, 3 * j + 3)
            if j == 0:
                jac[rows, 0] = monos[0][:, self.trans[0]]
                jac[rows, 1] = monos[0][:, self.trans[1]]
            else:
                jac[rows, 3 * j - 1 : 3 * j + 2] = monos[j]
            jac[rows, n - 1] = u_ends[j] / m_count
            if j < m_count - 1:
                jac[rows, 3 * (j + 1) - 1 : 3 * (j + 1) + 2] -= np.eye(3)
            else:
                jac[rows, 0] -= np.eye(3)[:, self.trans[0]]
                jac[rows, 1] -= np.eye(3)[:, self.trans[1]]
        return residual, jac, monos, ends


def _seed_points_circle(q0, segments, idx, winding):
    """Seeds on the circle ansatz: section coordinate advancing uniformly,
    transverse coordinates frozen at the guess.  Orbits crossing the
    section once per period are graphs over the section angle, and near
    the integrable limit they are near-circles, so this ansatz starts all
    segments equally close to such orbits."""
    points = np.tile(q0, (segments, 1))
    points[:, idx] += winding * TWO_PI * np.arange(segments) / segments
    return points


def _seed_points_trajectory(p, q0, period, segments, tol):
    """Seeds sampled from the forward guess trajectory."""
    sol = _solve(p, q0, (0.0, period), tol, dense=True)
    times = np.arange(segments) * (period / segments)
    return sol.sol(times).T.copy()


def _newton_multiple_shooting(p, s, points, period, tol, max_iter):
    """Core damped Newton loop; returns (points, period, monodromies)."""
    segments = len(points)
    trans = _transverse_indices(s.index)
    system = _MultipleShooting(p, s, segments, tol)
    points = points.copy()
    points[0, s.index] = s.value
    residual, jac, monos, _ = system.assemble(points, period)
    period_floor = 0.05 * period

    def unpack(vec):
        new_points = points.copy()
        new_points[0, trans[0]] += vec[0]
        new_points[0, trans[1]] += vec[1]
        for j in range(1, segments):
            new_points[j] += vec[3 * j - 1 : 3 * j + 2]
        return new_points, period + vec[-1]

    for _ in range(max_iter):
        norm = float(np.linalg.norm(residual))
        if np.max(np.abs(residual)) < tol:
            return points, period, monos
        try:
            step = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as err:
            raise NoConvergence(f"singular shooting system: {err}") from err
        accepted = False
        lam = 1.0
        for _ in range(12):
            trial_points, trial_period = unpack(lam * step)
            if trial_period > period_floor:
                trial = system.assemble(trial_points, trial_period)
                if np.linalg.norm(trial[0]) < (1 - 0.25 * lam) * norm:
                    points, period = trial_points, trial_period
                    residual, jac, monos, _ = trial
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            points, period = unpack(step)
            if period <= period_floor:
                raise NoConvergence("shooting period collapsed")
            residual, jac, monos, _ = system.assemble(points, period)
    raise NoConvergence(f"no periodic orbit within {max_iter} Newton iterations")


def _orbit_from_solution(p, s, points, period, monos):
    base = points[0]
    m_total = np.eye(3)
    for mono in monos:
        m_total = mono @ m_total
    u_base = velocity_batch(p, base)
    dr = _project_return_jacobian(m_total, u_base, s.index)
    # honest full-period return gap from a single unsegmented flight
    sol = _solve(p, base, (0.0, period), 1e-12)
    gap = sol.y[:, -1] - base
    gap[s.index] -= TWO_PI * s.direction
    residual = float(np.linalg.norm(_centered(gap)))
    return PeriodicOrbit(
        base=Point3.from_array(base),
        period=float(period),
        multipliers=_sorted_multipliers(dr),
        residual=residual,
    )


def _is_degenerate_family_member(orbit: PeriodicOrbit) -> bool:
    # a resonant-torus orbit has a unit transverse multiplier: the fixed
    # points of the return map form a curve through it
    return min(abs(lam - 1.0) for lam in orbit.multipliers) < 1e-3


def find_periodic_orbit(
    p: AbcParams,
    s: SectionSpec,
    guess: Point3,
    tol: float = 1e-10,
    max_iter: int = 50,
    segments: int = 10,
    deflate_degenerate: bool = True,
) -> PeriodicOrbit:
    """Newton shooting for a periodic orbit crossing the section once.

    Free-period multiple shooting with an Armijo line search.  Segment
    seeds first follow the circle ansatz (section coordinate advancing
    uniformly, transverse coordinates frozen at the guess), falling back
    to samples of the guess trajectory; the initial period comes from the
    section-normal velocity at the guess.

    Near the integrable limit the section's fixed points include whole
    curves of resonant-torus orbits; they are recognized by a unit
    transverse multiplier.  With ``deflate_degenerate`` the solver treats
    such a hit as spurious and restarts across the family (stepping along
    the normal to its tangent direction) until an isolated orbit is found;
    the degenerate orbit is returned only if every restart falls back onto
    a family.
    """
    if s.direction == 0:
        raise ValueError("shooting needs a directed section")
    if segments < 2:
        raise ValueError("need at least 2 shooting segments")
    idx = s.index
    trans = _transverse_indices(idx)

    def attempt(transverse_guess):
        start = np.empty(3)
        start[idx] = s.value
        start[trans[0]], start[trans[1]] = transverse_guess
        speed = float(velocity_batch(p, start)[idx])
        period = TWO_PI / abs(speed) if abs(speed) > 1e-3 else TWO_PI
        seed_sets = [_seed_points_circle(start, segments, idx, s.direction)]
        try:
            seed_sets.append(_seed_points_trajectory(p, start, period, segments, tol))
        except (RuntimeError, ValueError):
            pass
        last_err = None
        for points in seed_sets:
            try:
                solution = _newton_multiple_shooting(p, s, points, period, tol, max_iter)
                return _orbit_from_solution(p, s, *solution)
            except NoConvergence as err:
                last_err = err
        raise last_err

    guess_arr = guess.as_array()
    orbit = attempt((guess_arr[trans[0]], guess_arr[trans[1]]))
    if not deflate_degenerate or not _is_degenerate_family_member(orbit):
        return orbit

    # restart across the resonant family: its tangent is the near-unit
    # eigendirection of the return map; step along the normal
    base = orbit.base.as_array()
    xi_star = np.array([base[trans[0]], base[trans[1]]])
    m_total_dr = _recompute_dr(p, s, orbit)
    eigvals, eigvecs = np.linalg.eig(m_total_dr)
    tangent = eigvecs[:, int(np.argmin(np.abs(eigvals - 1.0)))].real
    tangent /= np.linalg.norm(tangent)
    normal = np.array([-tangent[1], tangent[0]])
    for delta in (0.05, 0.1, 0.2, 0.4):
        for sign in (1.0, -1.0):
            try:
                candidate = attempt(xi_star + sign * delta * normal)
            except NoConvergence:
                continue
            if not _is_degenerate_family_member(candidate):
                return candidate
    return orbit


def _recompute_dr(p, s, orbit: PeriodicOrbit):
    q0 = orbit.base.as_array()
    _, m = _fixed_time_monodromy(p, q0, orbit.period, 1e-12)
    u0 = velocity_batch(p, q0)
    return _project_return_jacobian(m, u0, s.index)


def _fixed_time_monodromy(p, q0, period, tol):
    y0 = np.concatenate([q0, np.eye(3).ravel()])
    sol = _solve(p, y0, (0.0, period), tol, augmented=True)
    state = sol.y[:, -1]
    return state[:3], state[3:].reshape(3, 3)


def floquet(
    p: AbcParams,
    orbit: PeriodicOrbit,
    tol: float = 1e-10,
    mode: str = "variational",
) -> tuple:
    """Transverse Floquet multipliers recomputed from the orbit data.

    ``variational`` integrates the exact linearization along the orbit;
    ``finite_difference`` builds the flow-map Jacobian from central
    differences of whole trajectories and serves as the cross-check.  The
    section for the projection is chosen transverse to the flow at the
    base point (largest velocity component).
    """
    q0 = orbit.base.as_array()
    u0 = velocity_batch(p, q0)
    idx = int(np.argmax(np.abs(u0)))
    if mode == "variational":
        q_ret, m = _fixed_time_monodromy(p, q0, orbit.period, tol)
    elif mode == "finite_difference":
        h = 1e-6
        m = np.empty((3, 3))
        for col in range(3):
            plus = q0.copy()
            plus[col] += h
            minus = q0.copy()
            minus[col] -= h
            sol_p = _solve(p, plus, (0.0, orbit.period), tol)
            sol_m = _solve(p, minus, (0.0, orbit.period), tol)
            m[:, col] = (sol_p.y[:, -1] - sol_m.y[:, -1]) / (2 * h)
        q_ret = q0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    u_ret = velocity_batch(p, q_ret)
    dr = _project_return_jacobian(m, u_ret, idx)
    return _sorted_multipliers(dr)


def _march_saddle(B, c_target, segments: int = 10, tol: float = 1e-12) -> PeriodicOrbit:
    """Continue the integrable-limit saddle orbit to the requested C.

    At C = 0 the orbit is the circle x = pi/2, z = pi with the y angle
    advancing at rate -(1 - B); continuation reuses the full converged
    segment-point set as the seed for the next parameter value, with an
    adaptive step that halves on failure.
    """
    section = SectionSpec("y", 0.0, direction=-1)
    period = TWO_PI / (1.0 - B)
    dt_angle = TWO_PI / segments
    points = np.array(
        [[math.pi / 2, -j * dt_angle, math.pi] for j in range(segments)]
    )
    c_current = 0.0
    points, period, monos = _newton_multiple_shooting(
        AbcParams(1.0, B, 0.0), section, points, period, tol, 50
    )
    step = max(c_target, 1e-3)
    while c_current < c_target - 1e-15:
        step = min(step, c_target - c_current)
        try:
            trial = _newton_multiple_shooting(
                AbcParams(1.0, B, c_current + step), section, points, period, tol, 30
            )
        except NoConvergence:
            step *= 0.5
            if step < 1e-6:
                raise
            continue
        points, period, monos = trial
        c_current += step
        step *= 2.0
    return _orbit_from_solution(
        AbcParams(1.0, B, c_current), section, points, period, monos
    )


@dataclass(frozen=True)
class SplittingProfile:
    """Signed gap between the unstable and stable traces on the transversal,
    sampled over one angular period of the section phase."""

    C: float
    section_param: np.ndarray
    signed_distance: np.ndarray

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.signed_distance)))

    def sign_changes(self, threshold: float = 0.0) -> int:
        d = self.signed_distance
        signs = np.sign(np.where(np.abs(d) <= threshold, 0.0, d))
        signs = signs[signs != 0]
        if len(signs) < 2:
            return 0
        cyc = np.append(signs, signs[0])
        return int(np.sum(cyc[:-1] != cyc[1:]))


def _manifold_trace(p, seeds, level, forward, tol, t_max):
    """Intersection points of manifold-seeded trajectories with the
    transversal {x = level}; returns (y mod 2pi, z) per seed."""

    def event(t, y):
        return y[0] - level

    event.terminal = True
    event.direction = 1 if forward else -1

    ys, zs = [], []
    span = (0.0, t_max) if forward else (0.0, -t_max)
    for seed in seeds:
        sol = _solve(p, seed, span, tol, events=[event])
        if not sol.t_events[0].size:
            raise NoConvergence("manifold trajectory missed the transversal")
        state = sol.y_events[0][0]
        ys.append(float(state[1] % TWO_PI))
        zs.append(float(state[2] % TWO_PI))
    return np.array(ys), np.array(zs)


def _periodic_interpolant(y, z):
    order = np.argsort(y)
    y_sorted = y[order]
    z_sorted = z[order]
    if np.min(np.diff(y_sorted)) <= 0:
        raise NoConvergence("manifold trace does not parametrize the phase circle")
    y_ext = np.append(y_sorted, y_sorted[0] + TWO_PI)
    z_ext = np.append(z_sorted, z_sorted[0])
    spline = CubicSpline(y_ext, z_ext, bc_type="periodic")
    base = y_sorted[0]

    def evaluate(angles):
        shifted = base + np.mod(np.asarray(angles) - base, TWO_PI)
        return spline(shifted)

    return evaluate


def separatrix_splitting(
    p_base: AbcParams,
    C: float,
    n_samples: int = 24,
    offset: float = 1e-7,
    tol: float = 1e-8,
) -> SplittingProfile:
    """Signed splitting of the saddle connection for the perturbed field.

    The saddle orbit continued from (pi/2, *, pi) is located by shooting at
    (1, B, C); seeds displaced by ``offset`` along the variationally
    transported unstable/stable eigendirections at n equally spaced orbit
    phases are flown to the fixed transversal {x = x* + pi}, where the
    z-gap between the unstable and stable traces is recorded as a function
    of the y phase.  At C = 0 the traces coincide to integration accuracy.
    """
    if p_base.C != 0 or p_base.A != 1 or not (0 < p_base.B < 1):
        raise WrongParams("base parameters must be (1, B, 0) with 0 < B < 1")
    if C < 0:
        raise ValueError("C must be nonnegative")
    if n_samples < 8:
        raise ValueError("need at least 8 samples")

    p = AbcParams(1.0, p_base.B, float(C))
    section = SectionSpec("y", 0.0, direction=-1)
    try:
        orbit = _march_saddle(p_base.B, float(C))
    except NoConvergence as err:
        raise NoConvergence(f"saddle orbit lost at C = {C}: {err}") from err

    base = orbit.base.as_array()
    period = orbit.period
    x_star = base[0]

    # transported frames along one period
    y0 = np.concatenate([base, np.eye(3).ravel()])
    dense = _solve(p, y0, (0.0, period), 1e-12, augmented=True, dense=True)
    q_end = dense.sol(period)
    m_full = q_end[3:].reshape(3, 3)
    u_ret = velocity_batch(p, q_end[:3])
    dr = _project_return_jacobian(m_full, u_ret, section.index)
    lams, vecs = np.linalg.eig(dr)
    if np.any(np.abs(lams.imag) > 1e-8):
        raise NoConvergence("continued orbit is no longer a saddle")
    order = np.argsort(-np.abs(lams.real))
    e_unstable = vecs[:, order[0]].real
    e_stable = vecs[:, order[1]].real
    if abs(lams.real[order[0]]) <= 1.0:
        raise NoConvergence("continued orbit is no longer a saddle")
    # lower-branch sides: unstable leaves toward +x, stable arrives from -e_s
    if e_unstable[0] < 0:
        e_unstable = -e_unstable
    if e_stable[0] < 0:
        e_stable = -e_stable
    embed = np.zeros((3, 2))
    embed[0, 0] = 1.0  # section transverse coords are (x, z)
    embed[2, 1] = 1.0
    v_unstable = embed @ e_unstable
    v_stable = embed @ e_stable

    phases = np.arange(n_samples) * (period / n_samples)
    seeds_u, seeds_s = [], []
    for s_val in phases:
        state = dense.sol(s_val)
        gamma = state[:3]
        transport = state[3:].reshape(3, 3)
        eu = transport @ v_unstable
        es = transport @ v_stable
        seeds_u.append(gamma + offset * eu / np.linalg.norm(eu))
        seeds_s.append(gamma - offset * es / np.linalg.norm(es))

    t_max = 14.0 * period
    y_u, z_u = _manifold_trace(p, seeds_u, x_star + math.pi, True, tol, t_max)
    y_s, z_s = _manifold_trace(p, seeds_s, x_star - math.pi, False, tol, t_max)

    unstable = _periodic_interpolant(y_u, z_u)
    stable = _periodic_interpolant(y_s, z_s)
    angles = np.arange(n_samples) * (TWO_PI / n_samples)
    gap = unstable(angles) - stable(angles)
    return SplittingProfile(C=float(C), section_param=angles, signed_distance=gap)
