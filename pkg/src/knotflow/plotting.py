"""Figure rendering for the CLI report paths.

All functions take computed objects and return a matplotlib Figure; the
CLI saves them next to the delimited output.  The Agg backend is forced so
rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_annulus",
    "plot_splitting",
    "plot_trajectory",
    "save_figure",
]


def plot_trajectory(traj, title=None):
    """3-d line plot of a trajectory (reduced coordinates)."""
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(111, projection="3d")
    pts = traj.points
    ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(0, 2 * np.pi)
    ax.set_zlim(0, 2 * np.pi)
    p = traj.params
    ax.set_title(title or f"A={p.A:g} B={p.B:g} C={p.C:g}")
    return fig


def plot_splitting(profile, title=None):
    """Signed manifold gap over one angular period."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot(profile.section_param, profile.signed_distance, "o-", ms=3)
    ax.set_xlabel("section phase")
    ax.set_ylabel("signed distance")
    ax.set_title(title or f"separatrix splitting, C = {profile.C:g}")
    fig.tight_layout()
    return fig


def plot_annulus(surface, leaves=12, title=None):
    """Radius heatmap of the foliated annulus with a few leaves overlaid."""
    fig, ax = plt.subplots(figsize=(7, 4))
    r = np.sqrt(surface.g)
    mesh = ax.pcolormesh(
        np.append(surface.theta, 2 * np.pi),
        surface.z,
        np.vstack([r, r[:1]]).T,
        shading="auto",
    )
    fig.colorbar(mesh, ax=ax, label="r")
    # integrate a handful of leaves for orientation
    from scipy.integrate import solve_ivp

    interp = surface._interpolator
    z_span = (surface.z[0], surface.z[-1])
    z_eval = np.linspace(*z_span, 80)
    for theta0 in np.linspace(0, 2 * np.pi, leaves, endpoint=False):
        sol = solve_ivp(
            lambda z, th: [-1.0 / float(interp.ev(th[0] % (2 * np.pi), z))],
            z_span,
            [theta0],
            t_eval=z_eval,
            rtol=1e-8,
            atol=1e-8,
        )
        ax.plot(np.mod(sol.y[0], 2 * np.pi), sol.t, ".", color="w", ms=0.8)
    ax.set_xlabel("theta")
    ax.set_ylabel("z")
    ax.set_title(title or f"annulus r = sqrt(g), eps = {surface.eps:g}")
    fig.tight_layout()
    return fig


def save_figure(fig, path):
    fig.savefig(path, dpi=150)
    plt.close(fig)
