"""Command-line entry point.

Subcommands: curvature-check, evolve, static, asymptotics, legendre.
Configuration is a flat key=value text file (one pair per line, '#' starts a
comment); command-line flags override file values, which override built-in
defaults.  Unknown keys and malformed values are rejected with exit code 2.
Numeric failures exit 1, clean runs exit 0.

Every run writes one manifest echoing the fully resolved configuration (no
timestamps, so repeated runs are byte-identical) plus CSV reports with
'.'-decimal scientific notation at 17 significant digits, which round-trips
64-bit floats exactly.  The KKNLED_OUT environment variable overrides the
default output root; --out overrides both.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import _kernels
from .constitutive import CouplingParams
from .curvature import (assemble_curvature, gauss_bonnet,
                        gauss_bonnet_closed_form, random_field_tensor)
from .evolution import (DEFAULT_CFL, DiagnosticsRecord, NonFiniteError,
                        init_scenario, run_simulation)
from .grid import GridSpec, write_snapshot
from .legendre import legendre_half, quadrature_oracle
from .toroidal import (RadialProfile, SeedMode, StaticAnsatz,
                       annihilating_profile, charge_profile, default_mu_grid,
                       successive_approximation)
from . import asymptotics as asym


class ConfigError(Exception):
    """Invalid configuration: unknown key, bad type, or missing value."""


_COMMON_SCHEMA = {
    "seed": (int, 1),
    "threads": (int, 1),
    "out": (str, ""),
}

_SCHEMAS = {
    "curvature-check": {
        **_COMMON_SCHEMA,
        "draws": (int, 100),
        "scale": (float, 1.0),
        "tol": (float, 1e-10),
    },
    "evolve": {
        **_COMMON_SCHEMA,
        "nx": (int, 64), "ny": (int, 64), "nz": (int, 64),
        "lx": (float, 1.0), "ly": (float, 1.0), "lz": (float, 1.0),
        "cfl": (float, DEFAULT_CFL),
        "dt": (float, 0.0),          # 0 -> derived from cfl
        "steps": (int, 160),
        "scenario": (str, "plane_wave"),
        "amplitude": (float, 0.01),
        "mode": (int, 1),
        "b_over_e": (float, 1.0),
        "epsilon": (float, 1.0),
        "e2": (float, 1.0),
        "cadence": (int, 20),
        "snapshots": (int, 0),
        "origin": (str, "center"),
    },
    "static": {
        **_COMMON_SCHEMA,
        "seed_modes": (str, "Q:1:1.0"),
        "profile_kind": (str, "exp_decay"),
        "profile_rate": (float, 1.0),
        "iterations": (int, 5),
        "n_max": (int, 8),
        "mu_min": (float, 1e-3),
        "mu_max": (float, 8.0),
        "mu_points": (int, 240),
        "matching_mu": (float, 1.5),
        "mu0": (float, 1.0),
        "eta_points": (int, 256),
        "epsilon": (float, 1.0),
        "e2": (float, 1.0),
        "scale": (float, 1.0),
    },
    "asymptotics": {
        **_COMMON_SCHEMA,
        "qtotal": (float, 1.0),
        "mu": (float, 1.0),
        "rmin": (float, 10.0),
        "rmax": (float, 100.0),
        "samples": (int, 20),
        "angle_deg": (float, 45.0),
        "e2": (float, 1.0),
    },
    "legendre": {
        **_COMMON_SCHEMA,
        "n_max": (int, 4),
        "mu_min": (float, 0.3),
        "mu_max": (float, 2.5),
        "samples": (int, 5),
        "tol": (float, 1e-10),
    },
}


@dataclass
class RunConfig:
    subcommand: str
    options: dict
    out_dir: str
    seed: int
    threads: int


def _coerce(subcommand: str, key: str, raw: str):
    schema = _SCHEMAS[subcommand]
    if key not in schema:
        raise ConfigError(f"unknown key {key!r} for {subcommand}")
    typ, _ = schema[key]
    try:
        return typ(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({typ.__name__})") from exc


def _read_config_file(path: str) -> dict[str, str]:
    pairs = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, line in enumerate(fh, 1):
                stripped = line.split("#", 1)[0].strip()
                if not stripped:
                    continue
                if "=" not in stripped:
                    raise ConfigError(f"{path}:{ln}: expected key=value")
                key, val = stripped.split("=", 1)
                pairs[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return pairs


def parse_config(subcommand: str, config_path: str | None = None,
                 overrides: dict[str, str] | None = None) -> RunConfig:
    """Resolve defaults < config file < flag overrides into a RunConfig."""
    if subcommand not in _SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    schema = _SCHEMAS[subcommand]
    options = {key: default for key, (_, default) in schema.items()}
    if config_path:
        for key, raw in _read_config_file(config_path).items():
            options[key] = _coerce(subcommand, key, raw)
    for key, raw in (overrides or {}).items():
        options[key] = _coerce(subcommand, key, str(raw))

    out = options["out"]
    if not out:
        base = os.environ.get("KKNLED_OUT", "kknled-out")
        out = os.path.join(base, subcommand)
    return RunConfig(subcommand=subcommand, options=options, out_dir=out,
                     seed=options["seed"], threads=options["threads"])


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(cfg: RunConfig) -> None:
    path = os.path.join(cfg.out_dir, "manifest.txt")
    lines = [f"toolkit_version={__version__}", f"subcommand={cfg.subcommand}"]
    for key in sorted(cfg.options):
        lines.append(f"{key}={cfg.options[key]}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _run_curvature(cfg: RunConfig) -> int:
    o = cfg.options
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = 0.0
    for i in range(o["draws"]):
        F = random_field_tensor(rng, scale=o["scale"])
        gb = gauss_bonnet(assemble_curvature(F))
        closed = gauss_bonnet_closed_form(F)
        rel = abs(gb - closed) / max(1.0, abs(closed))
        worst = max(worst, rel)
        rows.append([i, gb, closed, rel])
    _write_csv(os.path.join(cfg.out_dir, "curvature_check.csv"),
               ("draw", "gauss_bonnet", "closed_form", "rel_error"), rows)
    print(f"curvature-check: {o['draws']} draws, worst rel error {worst:.3e}")
    return 0 if worst <= o["tol"] else 1


def _parse_origin(spec: str, grid: GridSpec):
    if spec == "center":
        return None
    try:
        vals = [float(v) for v in spec.split(",")]
        if len(vals) != 3:
            raise ValueError
    except ValueError as exc:
        raise ConfigError(f"origin must be 'center' or 'x,y,z', got {spec!r}") from exc
    return np.array(vals)


def _run_evolve(cfg: RunConfig) -> int:
    o = cfg.options
    grid = GridSpec(o["nx"], o["ny"], o["nz"], o["lx"], o["ly"], o["lz"])
    params = CouplingParams(epsilon=o["epsilon"], e2=o["e2"])
    dt = o["dt"] if o["dt"] > 0.0 else o["cfl"] * min(grid.spacings)
    origin = _parse_origin(o["origin"], grid)
    state = init_scenario(o["scenario"], grid, params,
                          {"amplitude": o["amplitude"], "mode": o["mode"],
                           "b_over_e": o["b_over_e"]})

    snap_dir = cfg.out_dir

    def snapshot(st):
        if o["snapshots"]:
            path = os.path.join(snap_dir, f"state_{st.step:08d}.kkf")
            write_snapshot(path, grid, [*st.D.components, *st.B.components])

    state, records = run_simulation(state, dt, o["steps"], cadence=o["cadence"],
                                    origin=origin,
                                    snapshot_callback=snapshot if o["snapshots"] else None)
    _write_csv(os.path.join(cfg.out_dir, "diagnostics.csv"),
               DiagnosticsRecord.COLUMNS, (r.row() for r in records))
    if records:
        last = records[-1]
        print(f"evolve: {o['steps']} steps, energy {last.total_energy:.9e}, "
              f"max divB {last.max_div_b:.3e}")
    return 0


def _static_profile(kind: str, rate: float) -> RadialProfile:
    if kind == "exp_decay":
        return RadialProfile(lambda m: np.exp(-rate * m),
                             lambda m: -rate * np.exp(-rate * m))
    if kind == "annihilating":
        return annihilating_profile()
    raise ConfigError(f"unknown profile_kind {kind!r}")


def _parse_seed_modes(spec: str) -> list[SeedMode]:
    modes = []
    spec = spec.strip()
    if not spec or spec == "none":
        return modes
    for item in spec.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ConfigError(f"seed mode must be kind:n:coefficient, got {item!r}")
        kind, n, coef = parts
        if kind not in ("P", "Q", "matched"):
            raise ConfigError(f"seed mode kind must be P, Q or matched, got {kind!r}")
        try:
            modes.append(SeedMode(n=int(n), kind=kind, coefficient=float(coef)))
        except ValueError as exc:
            raise ConfigError(f"bad seed mode {item!r}") from exc
    return modes


def _run_static(cfg: RunConfig) -> int:
    o = cfg.options
    params = CouplingParams(epsilon=o["epsilon"], e2=o["e2"], scale=o["scale"])
    profile = _static_profile(o["profile_kind"], o["profile_rate"])
    seeds = _parse_seed_modes(o["seed_modes"])
    mu = default_mu_grid(o["mu_min"], o["mu_max"], o["mu_points"])
    ansatz = StaticAnsatz(profile=profile, v_modes=seeds)
    report = successive_approximation(ansatz, params, iterations=o["iterations"],
                                      mu=mu, n_max=o["n_max"],
                                      n_eta=o["eta_points"],
                                      matching_mu=o["matching_mu"])
    from .toroidal import IterationReport
    _write_csv(os.path.join(cfg.out_dir, "iterations.csv"),
               IterationReport.ROWS, report.rows())

    # charge profile along mu = mu0 for the final mode content
    final_modes = [m for m in seeds if m.kind in ("P", "Q")]
    if final_modes:
        eta, q = charge_profile(final_modes, profile, o["mu0"], params)
    else:
        eta = np.linspace(0.0, 2.0 * math.pi, 512, endpoint=False)
        q = np.zeros_like(eta)
    _write_csv(os.path.join(cfg.out_dir, "charge_profile.csv"),
               ("eta", "q"), zip(eta, q))
    n_flagged = sum(1 for e in report.entries if e.flagged)
    print(f"static: {o['iterations']} iterations, {len(report.entries)} mode entries, "
          f"{n_flagged} flagged, smooth candidate: {report.smooth_candidate_found()}")
    return 0


def _run_asymptotics(cfg: RunConfig) -> int:
    o = cfg.options
    p = asym.ZerothOrderParams(q_total=o["qtotal"], mu_dip=o["mu"],
                               r_min=o["rmin"], r_max=o["rmax"])
    angle = math.radians(o["angle_deg"])
    rho, z, r = asym.shell_samples(p, angle, o["samples"])
    div_e1, rot_b1 = asym.induced_far_field_sources(p, rho, z)
    ratio_q = div_e1 / asym.charge_shape(rho, z)
    ratio_j = rot_b1 / asym.current_shape(rho, z)
    inv_e2 = 1.0 / o["e2"]
    rows = [[rho[i], z[i], r[i], div_e1[i], rot_b1[i],
             div_e1[i] * inv_e2, rot_b1[i] * inv_e2, ratio_q[i], ratio_j[i]]
            for i in range(r.size)]
    _write_csv(os.path.join(cfg.out_dir, "far_field_samples.csv"),
               ("rho", "z", "r", "div_e1", "rot_b1_phi",
                "div_e1_over_e2", "rot_b1_phi_over_e2",
                "charge_shape_ratio", "current_shape_ratio"), rows)

    slope_q = asym.falloff_fit(r, div_e1)
    slope_j = asym.falloff_fit(r, rot_b1)
    e0, _ = asym.monopole_dipole_fields(rho, z, p)
    slope_e = asym.falloff_fit(r, np.sqrt(e0[0] ** 2 + e0[2] ** 2))
    summary = [
        ["charge_falloff_slope", slope_q],
        ["current_falloff_slope", slope_j],
        ["monopole_falloff_slope", slope_e],
        ["charge_prefactor_measured", float(np.mean(ratio_q))],
        ["charge_prefactor_reference", 3.0 * p.mu_dip ** 2 * p.q_total / 8.0],
        ["current_prefactor_measured", float(np.mean(ratio_j))],
        ["current_prefactor_reference", 3.0 * p.mu_dip * p.q_total ** 2 / 2.0],
    ]
    _write_csv(os.path.join(cfg.out_dir, "far_field_summary.csv"),
               ("quantity", "value"), summary)
    print(f"asymptotics: slopes charge {slope_q:.3f}, current {slope_j:.3f}")
    return 0


def _run_legendre(cfg: RunConfig) -> int:
    o = cfg.options
    mus = np.linspace(o["mu_min"], o["mu_max"], o["samples"])
    rows = []
    worst = 0.0
    for kind in ("P", "Q"):
        for n in range(o["n_max"] + 1):
            degree = n - 0.5
            for mu in mus:
                x = math.cosh(mu)
                val = legendre_half(kind, degree, x)
                ora = quadrature_oracle(kind, degree, x)
                rel = abs(val - ora) / max(1.0, abs(ora))
                worst = max(worst, rel)
                rows.append([0 if kind == "P" else 1, n, degree, mu, x, val, ora, rel])
    _write_csv(os.path.join(cfg.out_dir, "legendre_values.csv"),
               ("kind_is_q", "n", "degree", "mu", "x", "value", "oracle", "rel_error"),
               rows)
    print(f"legendre: {len(rows)} values, worst oracle deviation {worst:.3e}")
    return 0 if worst <= o["tol"] else 1


_BODIES = {
    "curvature-check": _run_curvature,
    "evolve": _run_evolve,
    "static": _run_static,
    "asymptotics": _run_asymptotics,
    "legendre": _run_legendre,
}


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration; 0 ok, 1 numeric failure, 2 config error."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    _kernels.set_thread_count(cfg.threads)
    _write_manifest(cfg)
    try:
        return _BODIES[cfg.subcommand](cfg)
    except NonFiniteError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="random seed")
    sub.add_argument("--threads", type=int, help="worker threads")
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kknled",
        description="nonlinear electrodynamics toolkit runner")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("curvature-check", help="curvature-route vs closed-form invariant")
    _add_common(p)
    p.add_argument("--draws", type=int, help="number of random tensors")

    p = subs.add_parser("evolve", help="time-domain evolution run")
    _add_common(p)

    p = subs.add_parser("static", help="toroidal successive-approximation report")
    _add_common(p)

    p = subs.add_parser("asymptotics", help="far-field induced source scan")
    _add_common(p)
    p.add_argument("--qtotal", type=float, help="total charge")
    p.add_argument("--mu", type=float, help="magnetic dipole moment")
    p.add_argument("--rmin", type=float, help="inner shell radius")
    p.add_argument("--rmax", type=float, help="outer shell radius")
    p.add_argument("--samples", type=int, help="samples along the ray")

    p = subs.add_parser("legendre", help="half-integer Legendre value table")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    overrides: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            print(f"config error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    for flag in ("seed", "threads", "out", "draws", "qtotal", "mu", "rmin",
                 "rmax", "samples"):
        val = getattr(args, flag, None)
        if val is not None:
            overrides[flag] = str(val)

    try:
        cfg = parse_config(args.subcommand, config_path=args.config,
                           overrides=overrides)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
