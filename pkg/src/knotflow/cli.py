"""Command-line front end.

Subcommands mirror the library layers: ``beltrami check`` (pointwise field
identities and singularity certification), ``flow integrate|orbit|splitting``,
``contact annulus``, ``template words|knots|link``, and ``tight reeb``.
Outputs are deterministic for a fixed argv and seed: JSON with sorted keys,
CSV with fixed float formatting, figures rendered with a pinned style.

Exit codes: 0 success, 1 property violation or failed computation,
2 invalid input.  File outputs are written atomically (never left partial
on failure).  A config file of ``key=value`` lines can pre-set any option
of the chosen subcommand; explicit flags win.  The environment variable
``KNOTFLOW_OUTDIR`` supplies a default directory for bare output names.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from knotflow import annulus as annulus_mod
from knotflow import beltrami as bel
from knotflow import flow as flow_mod
from knotflow import templates as tpl
from knotflow.expressions import parse_expression, parse_tuple
from knotflow.invariants import knot_report

__all__ = ["RunConfig", "build_parser", "main"]

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: command path, option values, output routing.

    Unknown keys never reach this point (argparse rejects them), and the
    seed recorded here fully determines any randomized sampling downstream.
    """

    command: tuple
    options: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        options = {
            key: value
            for key, value in vars(args).items()
            if key not in ("handler", "group", "command", "config")
        }
        path = getattr(args, "out", None)
        if path is not None:
            outdir = getattr(args, "outdir", None) or os.environ.get("KNOTFLOW_OUTDIR")
            if outdir and not os.path.dirname(path):
                path = os.path.join(outdir, path)
        return cls(
            command=(args.group, args.command),
            options=options,
            out=path,
            seed=int(getattr(args, "seed", 0) or 0),
        )


class PropertyViolation(RuntimeError):
    """Computed output failed a required property; exit code 1."""


@contextmanager
def _open_output(path):
    """Atomic file writer: the target appears only on success."""
    if path is None:
        yield sys.stdout
        return
    tmp = path + ".partial"
    try:
        with open(tmp, "w") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _emit_json(obj, path):
    with _open_output(path) as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _float_list(values):
    return [float(v) for v in values]


# ---------------------------------------------------------------------------
# beltrami check


def _cmd_beltrami_check(args, config):
    a = parse_expression(args.A)
    b = parse_expression(args.B)
    c = parse_expression(args.C)
    params = bel.AbcParams(a, b, c)
    normalized = bel.AbcParams.normalized(a, b, c)

    gen = np.random.default_rng(config.seed)
    pts = gen.uniform(0.0, 2 * math.pi, size=(args.samples, 3))
    h = args.h

    from knotflow.beltrami import _curl_fd_batch, divergence_batch, velocity_batch

    curl_sup = float(
        np.max(np.abs(_curl_fd_batch(params, pts, h) - velocity_batch(params, pts)))
    )
    div_sup = float(np.max(np.abs(divergence_batch(params, pts, h))))

    pairing_sup = 0.0
    contraction_sup = 0.0
    speeds = np.linalg.norm(velocity_batch(params, pts), axis=-1)
    for pt, speed in zip(pts, speeds):
        if speed < 1e-3:
            continue
        r1, r2 = bel.reeb_residual(params, bel.Point3.from_array(pt), h=h)
        pairing_sup = max(pairing_sup, r1)
        contraction_sup = max(contraction_sup, r2)

    scan = bel.abc_singular_points(normalized, grid_n=args.grid_n)
    tolerances = {
        "curl_sup": args.tol_curl,
        "divergence_sup": args.tol_div,
        "reeb_pairing_sup": args.tol_reeb_pairing,
        "reeb_contraction_sup": args.tol_reeb_contraction,
    }
    residuals = {
        "curl_sup": curl_sup,
        "divergence_sup": div_sup,
        "reeb_pairing_sup": pairing_sup,
        "reeb_contraction_sup": contraction_sup,
    }
    ok = scan.certificate.nonsingular and all(
        residuals[key] <= tolerances[key] for key in residuals
    )
    report = {
        "params": {"A": a, "B": b, "C": c},
        "normalized": {"A": normalized.A, "B": normalized.B, "C": normalized.C},
        "samples": args.samples,
        "seed": args.seed,
        "h": h,
        "residuals": residuals,
        "tolerances": tolerances,
        "singularity": {
            "nonsingular": scan.certificate.nonsingular,
            "min_speed": scan.certificate.min_speed,
            "points": [[q.x, q.y, q.z] for q in scan.points],
        },
        "pass": ok,
    }
    _emit_json(report, config.out)
    if not ok:
        raise PropertyViolation(
            "singular parameters" if not scan.certificate.nonsingular else "residuals above tolerance"
        )


# ---------------------------------------------------------------------------
# flow


def _cmd_flow_integrate(args, config):
    params = bel.AbcParams(
        parse_expression(args.A), parse_expression(args.B), parse_expression(args.C)
    )
    x0 = parse_tuple(args.x0, 3)
    traj = flow_mod.integrate(
        params, bel.Point3(*x0), parse_expression(args.t_end), tol=args.tol
    )
    with _open_output(config.out) as fh:
        fh.write("t,x,y,z\n")
        for t, q in zip(traj.times, traj.points):
            fh.write(
                ",".join(_FLOAT_FMT % v for v in (t, q[0], q[1], q[2])) + "\n"
            )
    if args.plot:
        from knotflow import plotting

        plotting.save_figure(plotting.plot_trajectory(traj), args.plot)


def _parse_section(text, direction):
    if "=" not in text:
        raise ValueError(f"section must look like y=0, got {text!r}")
    coord, value = text.split("=", 1)
    return flow_mod.SectionSpec(coord.strip(), parse_expression(value), direction)


def _orbit_json(orbit):
    return {
        "base": [orbit.base.x, orbit.base.y, orbit.base.z],
        "period": orbit.period,
        "multipliers": [[lam.real, lam.imag] for lam in orbit.multipliers],
        "residual": orbit.residual,
        "classification": orbit.classification,
    }


def _cmd_flow_orbit(args, config):
    params = bel.AbcParams(
        parse_expression(args.A), parse_expression(args.B), parse_expression(args.C)
    )
    section = _parse_section(args.section, args.direction)
    gx, gz = parse_tuple(args.guess, 2)
    guess = np.zeros(3)
    guess[section.index] = section.value
    trans = [i for i in range(3) if i != section.index]
    guess[trans[0]], guess[trans[1]] = gx, gz
    orbit = flow_mod.find_periodic_orbit(
        params, section, bel.Point3.from_array(guess), tol=args.tol
    )
    _emit_json(_orbit_json(orbit), config.out)


def _cmd_flow_splitting(args, config):
    base = bel.AbcParams(1.0, parse_expression(args.B), 0.0)
    profile = flow_mod.separatrix_splitting(
        base, parse_expression(args.C), n_samples=args.samples
    )
    with _open_output(config.out) as fh:
        fh.write(f"# C={_FLOAT_FMT % profile.C}\n")
        fh.write("section_param,signed_distance\n")
        for angle, dist in zip(profile.section_param, profile.signed_distance):
            fh.write(f"{_FLOAT_FMT % angle},{_FLOAT_FMT % dist}\n")
    if args.plot:
        from knotflow import plotting

        plotting.save_figure(plotting.plot_splitting(profile), args.plot)


# ---------------------------------------------------------------------------
# contact


def _parse_monodromy(text):
    kind, _, rest = text.partition(":")
    if kind == "rot":
        return annulus_mod.CircleMap.rotation(parse_expression(rest))
    if kind == "sin":
        drift, amplitude = parse_tuple(rest, 2)
        return annulus_mod.CircleMap.from_function(
            lambda t: t + drift + amplitude * math.sin(t)
        )
    raise ValueError(f"monodromy must be rot:DELTA or sin:DRIFT,AMPLITUDE, got {text!r}")


def _cmd_contact_annulus(args, config):
    circle_map = _parse_monodromy(args.monodromy)
    n_theta, n_z = (int(v) for v in args.grid.split(","))
    surface = annulus_mod.annulus_from_monodromy(
        circle_map, eps=parse_expression(args.eps), grid=(n_theta, n_z)
    )
    recovered = annulus_mod.annulus_monodromy(surface)
    error = annulus_mod.circle_map_distance(recovered, circle_map)
    report = annulus_mod.transversality_check(surface)

    with _open_output(config.out) as fh:
        fh.write("theta,z,r\n")
        r = np.sqrt(surface.g)
        for i, theta in enumerate(surface.theta):
            for j, z in enumerate(surface.z):
                fh.write(
                    f"{_FLOAT_FMT % theta},{_FLOAT_FMT % z},{_FLOAT_FMT % r[i, j]}\n"
                )
    _emit_json(
        {
            "eps": surface.eps,
            "winding": surface.winding,
            "grid": [len(surface.theta), len(surface.z)],
            "roundtrip_error": error,
            "transverse": report.transverse,
        },
        None,
    )
    if args.plot:
        from knotflow import plotting

        plotting.save_figure(plotting.plot_annulus(surface), args.plot)
    if error > args.tol or not report.transverse:
        raise PropertyViolation(
            f"roundtrip error {error:.3e} above {args.tol:g}"
            if error > args.tol
            else "surface not transverse"
        )


# ---------------------------------------------------------------------------
# template


def _template_spec(args):
    return tpl.lorenz_like(args.m, args.n, args.star)


def _cmd_template_words(args, config):
    with _open_output(config.out) as fh:
        for word in tpl.enumerate_words(args.max_len):
            fh.write(str(word) + "\n")


def _cmd_template_knots(args, config):
    spec = _template_spec(args)
    with _open_output(config.out) as fh:
        for word in tpl.enumerate_words(args.max_len):
            braid = tpl.word_to_braid(spec, word)
            report = knot_report(str(word), braid)
            fh.write(json.dumps(report.to_json_dict(), sort_keys=True) + "\n")


def _cmd_template_link(args, config):
    spec = _template_spec(args)
    linking = tpl.pair_linking(spec, tpl.CyclicWord.of(args.w1), tpl.CyclicWord.of(args.w2))
    print(linking)


def _cmd_template_curves(args, config):
    spec = _template_spec(args)
    words = [tpl.CyclicWord.of(w) for w in args.words.split(",") if w]
    curves = tpl.words_to_curves(spec, words)
    with _open_output(config.out) as fh:
        fh.write("word,vertex,x,y,z\n")
        for word, curve in zip(words, curves):
            for k, vertex in enumerate(curve.vertices):
                coords = ",".join(_FLOAT_FMT % v for v in vertex)
                fh.write(f"{word},{k},{coords}\n")


# ---------------------------------------------------------------------------
# tight


def _cmd_tight_reeb(args, config):
    point = bel.Point4(*parse_tuple(args.point, 4))
    reeb, pairing = bel.standard_sphere_reeb(point)
    _emit_json(
        {
            "point": _float_list(point.as_array()),
            "reeb": _float_list(reeb),
            "pairing": pairing,
        },
        config.out,
    )


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(parser, out=True, plot=False):
    if out:
        parser.add_argument("--out", help="output file (default stdout)")
        parser.add_argument("--outdir", help="directory for bare output names")
    if plot:
        parser.add_argument("--plot", help="also render a figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knotflow",
        description="Beltrami flows on the 3-torus, contact annuli, and template knots.",
    )
    parser.add_argument("--config", help="file of key=value lines pre-setting options")
    groups = parser.add_subparsers(dest="group", required=True)

    beltrami = groups.add_parser("beltrami").add_subparsers(dest="command", required=True)
    check = beltrami.add_parser("check", help="field identities and singularity scan")
    check.add_argument("--A", required=True)
    check.add_argument("--B", required=True)
    check.add_argument("--C", required=True)
    check.add_argument("--samples", type=int, default=200)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--h", type=float, default=1e-4)
    check.add_argument("--grid-n", type=int, default=64)
    check.add_argument("--tol-curl", type=float, default=1e-6)
    check.add_argument("--tol-div", type=float, default=1e-7)
    check.add_argument("--tol-reeb-pairing", type=float, default=1e-12)
    check.add_argument("--tol-reeb-contraction", type=float, default=1e-5)
    _add_common(check)
    check.set_defaults(handler=_cmd_beltrami_check)

    flow = groups.add_parser("flow").add_subparsers(dest="command", required=True)
    integrate = flow.add_parser("integrate", help="trajectory to CSV (t,x,y,z)")
    integrate.add_argument("--A", required=True)
    integrate.add_argument("--B", required=True)
    integrate.add_argument("--C", required=True)
    integrate.add_argument("--x0", required=True, help="start point, e.g. pi/2,0,0")
    integrate.add_argument("--t-end", required=True)
    integrate.add_argument("--tol", type=float, default=1e-10)
    _add_common(integrate, plot=True)
    integrate.set_defaults(handler=_cmd_flow_integrate)

    orbit = flow.add_parser("orbit", help="periodic orbit by Newton shooting (JSON)")
    orbit.add_argument("--A", required=True)
    orbit.add_argument("--B", required=True)
    orbit.add_argument("--C", required=True)
    orbit.add_argument("--section", required=True, help="coordinate=value, e.g. y=0")
    orbit.add_argument("--direction", type=int, choices=(-1, 1), default=-1)
    orbit.add_argument("--guess", required=True, help="transverse coordinates, e.g. 1.5,3.0")
    orbit.add_argument("--tol", type=float, default=1e-10)
    _add_common(orbit)
    orbit.set_defaults(handler=_cmd_flow_orbit)

    splitting = flow.add_parser(
        "splitting", help="separatrix splitting profile (CSV: section_param,signed_distance)"
    )
    splitting.add_argument("--B", required=True)
    splitting.add_argument("--C", required=True)
    splitting.add_argument("--samples", type=int, default=24)
    _add_common(splitting, plot=True)
    splitting.set_defaults(handler=_cmd_flow_splitting)

    contact = groups.add_parser("contact").add_subparsers(dest="command", required=True)
    annulus = contact.add_parser(
        "annulus", help="foliated annulus from a prescribed monodromy (CSV: theta,z,r; JSON report on stdout)"
    )
    annulus.add_argument(
        "--monodromy", required=True, help="rot:DELTA or sin:DRIFT,AMPLITUDE"
    )
    annulus.add_argument("--eps", default="1")
    annulus.add_argument("--grid", default="256,65")
    annulus.add_argument("--tol", type=float, default=1e-4)
    _add_common(annulus, plot=True)
    annulus.set_defaults(handler=_cmd_contact_annulus)

    template = groups.add_parser("template").add_subparsers(dest="command", required=True)
    words = template.add_parser("words", help="aperiodic orbit words up to a length")
    words.add_argument("--max-len", type=int, required=True)
    _add_common(words)
    words.set_defaults(handler=_cmd_template_words)

    knots = template.add_parser("knots", help="knot reports of enumerated orbits (JSONL)")
    knots.add_argument("--m", type=int, required=True)
    knots.add_argument("--n", type=int, required=True)
    knots.add_argument("--star", action="store_true")
    knots.add_argument("--max-len", type=int, required=True)
    _add_common(knots)
    knots.set_defaults(handler=_cmd_template_knots)

    link = template.add_parser("link", help="linking number of two orbit words")
    link.add_argument("--m", type=int, required=True)
    link.add_argument("--n", type=int, required=True)
    link.add_argument("--star", action="store_true")
    link.add_argument("--w1", required=True)
    link.add_argument("--w2", required=True)
    link.set_defaults(handler=_cmd_template_link)

    curves = template.add_parser(
        "curves", help="embedded orbit polylines (CSV: word,vertex,x,y,z)"
    )
    curves.add_argument("--m", type=int, required=True)
    curves.add_argument("--n", type=int, required=True)
    curves.add_argument("--star", action="store_true")
    curves.add_argument("--words", required=True, help="comma-separated orbit words")
    _add_common(curves)
    curves.set_defaults(handler=_cmd_template_curves)

    tight = groups.add_parser("tight").add_subparsers(dest="command", required=True)
    reeb = tight.add_parser("reeb", help="round-sphere Reeb field at a point (JSON)")
    reeb.add_argument("--point", required=True, help="x1,x2,x3,x4 on the unit sphere")
    _add_common(reeb)
    reeb.set_defaults(handler=_cmd_tight_reeb)

    return parser


def _apply_config(argv):
    """Splice config-file options in after the subcommand tokens."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a file argument")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2 :]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line must be key=value: {line!r}")
            key, value = line.split("=", 1)
            extra.append(f"--{key.strip()}")
            value = value.strip()
            if value:
                extra.append(value)
    positionals = [i for i, tok in enumerate(rest) if not tok.startswith("-")]
    if len(positionals) < 2:
        raise ValueError("config file requires a group and command on the command line")
    insert_at = positionals[1] + 1
    # config options first, explicit flags afterwards, so explicit flags win
    return rest[:insert_at] + extra + rest[insert_at:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_err:
        return int(exit_err.code or 0)
    config = RunConfig.from_args(args)
    try:
        args.handler(args, config)
    except PropertyViolation as err:
        print(f"property violation: {err}", file=sys.stderr)
        return 1
    except (
        flow_mod.NoConvergence,
        flow_mod.NoReturn,
        flow_mod.StepUnderflow,
        annulus_mod.SlopeSignViolation,
    ) as err:
        print(f"computation failed: {err}", file=sys.stderr)
        return 1
    except (
        ValueError,
        OSError,
        bel.NotOnSphere,
        bel.NotNormalized,
        annulus_mod.NotMonotone,
        tpl.PeriodicWord,
        tpl.SameOrbit,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
