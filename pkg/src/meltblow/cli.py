"""Command-line front end: batch runs emitting CSV/JSON plus SVG figures.

Configuration is a line-oriented INI file (sections and key=value pairs);
every key has a default and can be overridden on the command line with
``--set section.key=value`` (plus dedicated flags for the common ones).
Every output embeds the fully resolved configuration in its header, so any
artifact can be regenerated from itself.  Exit codes: 0 success, 1 config
error, 2 numerical failure, 3 validation-threshold failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import fieldsampler as fsamp
from . import flowfield as ff
from . import jetdynamics as jd
from . import plots
from . import spectrum as spec
from . import stats as mstats
from .errors import (
    ConfigError,
    DomainError,
    DomainExitError,
    MeltblowError,
    NumericalError,
    ThresholdError,
)

THREADS_ENV = "MELTBLOW_THREADS"

_DEFAULTS = {
    "run": {
        "seed": "0",
        "out": ".",
        "threads": "",          # empty: MELTBLOW_THREADS or 1
        "plots": "true",
        "fluctuations": "true",
        "n_modes": "50",
    },
    "spectrum": {
        "zetas": "0,1e-4,1e-2,1",
        "curve_points": "300",
        "curve_min_kappa": "1e-3",
        "curve_max_kappa": "100",
    },
    "flow": {
        "source": "synthetic",
        "csv": "",
        "inlet_speed": "400.0",
        "inlet_k": "1e3",
        "inlet_eps": "1e8",
        "half_width": "3e-4",
        "virtual_origin": "1e-3",
        "spreading": "0.11",
        "speed_exponent": "0.5",
        "k_exponent": "0.0",
        "eps_exponent": "0.1",
        "nu": "1.5e-5",
        "rho": "1.0",
    },
    "fiber": {
        "v0": "1e-2",
        "d0": "4e-4",
        "rho_fiber": "7e2",
        "r0": "0,0,0",
        "tau0": "0,0,-1",
        "horizon": "1e-3",
    },
    "drag": {"c_normal": "1.0", "c_tangent": "0.1"},
    "integrator": {
        "rtol": "1e-3",
        "atol": "1e-9",
        "h0": "1e-8",
        "h_min": "1e-12",
        "max_steps": "20000000",
    },
    "sample": {
        "extent": "12.0",
        "points": "41",
        "times": "0.0,0.3",
        "component": "0",
        "mean_velocity": "0,0,0",
    },
    "montecarlo": {
        "samples": "5000",
        "heights": "-0.033,-0.066,-0.1",
        "density_points": "200",
    },
    "validate": {
        "reps": "300",
        "sample_size": "50",
        "n_values": "10,50",
        "d_values": "3",
        "spacing_x": "2.0",
        "spacing_t": "0.5",
        "variates": "vector",
        "covariance_sets": "4000",
        "band_n50_lo": "0.06",
        "band_n50_hi": "0.18",
        "min_n10": "0.3",
        "threshold_min_reps": "100",
    },
}


class RunConfig:
    """Resolved configuration: defaults < config file < command-line overrides."""

    def __init__(self, path=None, overrides=()):
        self.values = {s: dict(kv) for s, kv in _DEFAULTS.items()}
        if path:
            parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
            read = parser.read(path)
            if not read:
                raise ConfigError(f"config file not found: {path}")
            for section in parser.sections():
                if section not in self.values:
                    raise ConfigError(f"unknown config section [{section}]")
                for key, value in parser.items(section):
                    if key not in self.values[section]:
                        raise ConfigError(f"unknown config key {section}.{key}")
                    self.values[section][key] = value.strip()
        for item in overrides:
            try:
                dotted, value = item.split("=", 1)
                section, key = dotted.split(".", 1)
            except ValueError:
                raise ConfigError(f"override must look like section.key=value: {item!r}") from None
            if section not in self.values or key not in self.values[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            self.values[section][key] = value

    def get(self, section, key) -> str:
        return self.values[section][key]

    def set(self, section, key, value) -> None:
        if section not in self.values or key not in self.values[section]:
            raise ConfigError(f"unknown config key {section}.{key}")
        self.values[section][key] = str(value)

    def get_float(self, section, key) -> float:
        try:
            return float(self.get(section, key))
        except ValueError:
            raise ConfigError(f"{section}.{key} must be a number, got {self.get(section, key)!r}") from None

    def get_int(self, section, key) -> int:
        try:
            return int(self.get(section, key))
        except ValueError:
            raise ConfigError(f"{section}.{key} must be an integer") from None

    def get_bool(self, section, key) -> bool:
        raw = self.get(section, key).lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{section}.{key} must be a boolean, got {raw!r}")

    def get_floats(self, section, key) -> list:
        raw = self.get(section, key)
        if not raw.strip():
            return []
        try:
            return [float(v) for v in raw.split(",")]
        except ValueError:
            raise ConfigError(f"{section}.{key} must be a comma list of numbers") from None

    def get_ints(self, section, key) -> list:
        return [int(v) for v in self.get_floats(section, key)]

    # runtime-only keys: excluded from provenance so identical (config, seed)
    # runs are byte-identical regardless of worker count or output location
    _EPHEMERAL = {("run", "threads"), ("run", "out")}

    def header_lines(self, command) -> list:
        lines = [f"# meltblow {__version__} {command}"]
        for section in sorted(self.values):
            for key in sorted(self.values[section]):
                if (section, key) not in self._EPHEMERAL:
                    lines.append(f"# config {section}.{key} = {self.values[section][key]}")
        return lines

    def as_dict(self) -> dict:
        return {
            s: {k: v for k, v in kv.items() if (s, k) not in self._EPHEMERAL}
            for s, kv in self.values.items()
        }

    @property
    def seed(self) -> int:
        return self.get_int("run", "seed")

    @property
    def threads(self) -> int:
        raw = self.get("run", "threads").strip()
        if raw:
            return max(1, int(raw))
        env = os.environ.get(THREADS_ENV, "").strip()
        return max(1, int(env)) if env else 1


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _write_csv(path, cfg, command, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in cfg.header_lines(command):
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path, cfg, command, payload):
    doc = {"tool": f"meltblow {__version__}", "command": command, "config": cfg.as_dict()}
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")


def build_jet_params(cfg) -> ff.SyntheticJetParams:
    return ff.SyntheticJetParams(
        inlet_speed=cfg.get_float("flow", "inlet_speed"),
        inlet_k=cfg.get_float("flow", "inlet_k"),
        inlet_eps=cfg.get_float("flow", "inlet_eps"),
        half_width=cfg.get_float("flow", "half_width"),
        virtual_origin=cfg.get_float("flow", "virtual_origin"),
        spreading=cfg.get_float("flow", "spreading"),
        speed_exponent=cfg.get_float("flow", "speed_exponent"),
        k_exponent=cfg.get_float("flow", "k_exponent"),
        eps_exponent=cfg.get_float("flow", "eps_exponent"),
        nu=cfg.get_float("flow", "nu"),
        rho=cfg.get_float("flow", "rho"),
    )


def build_flow(cfg):
    source = cfg.get("flow", "source")
    if source == "synthetic":
        return ff.SyntheticPlanarJet(build_jet_params(cfg))
    if source == "csv":
        path = cfg.get("flow", "csv")
        if not path:
            raise ConfigError("flow.source = csv requires flow.csv = <path>")
        return ff.load_flow_csv(path)
    raise ConfigError(f"unknown flow.source {source!r} (use synthetic or csv)")


def build_fiber(cfg) -> jd.FiberParams:
    r0 = cfg.get_floats("fiber", "r0")
    tau0 = cfg.get_floats("fiber", "tau0")
    if len(r0) != 3 or len(tau0) != 3:
        raise ConfigError("fiber.r0 and fiber.tau0 must be 3-vectors")
    return jd.FiberParams(
        v0=cfg.get_float("fiber", "v0"),
        d0=cfg.get_float("fiber", "d0"),
        rho_fiber=cfg.get_float("fiber", "rho_fiber"),
        r0=tuple(r0),
        tau0=tuple(tau0),
        horizon=cfg.get_float("fiber", "horizon"),
    )


def build_drag(cfg) -> jd.QuadraticDrag:
    return jd.QuadraticDrag(
        c_normal=cfg.get_float("drag", "c_normal"),
        c_tangent=cfg.get_float("drag", "c_tangent"),
    )


def build_tolerances(cfg) -> jd.Tolerances:
    return jd.Tolerances(
        rtol=cfg.get_float("integrator", "rtol"),
        atol=cfg.get_float("integrator", "atol"),
        h0=cfg.get_float("integrator", "h0"),
        h_min=cfg.get_float("integrator", "h_min"),
        max_steps=cfg.get_int("integrator", "max_steps"),
    )


def cmd_spectrum(cfg, out_dir: Path) -> int:
    zeta_list = cfg.get_floats("spectrum", "zetas")
    if not zeta_list:
        raise ConfigError("spectrum.zetas is empty")
    zc = spec.critical_zeta()
    rows = []
    curves = {}
    kmin = cfg.get_float("spectrum", "curve_min_kappa")
    kmax = cfg.get_float("spectrum", "curve_max_kappa")
    npts = cfg.get_int("spectrum", "curve_points")
    kappa_grid = np.geomspace(kmin, kmax, npts)
    curve_rows = []
    for zeta in zeta_list:
        if not 0.0 <= zeta < zc:
            rows.append((zeta, math.nan, math.nan, math.nan, math.nan,
                         f"error: zeta outside [0 {zc:.6g})"))
            continue
        model = spec.build_model(zeta)
        res1, res2 = spec.constraint_residuals(model)
        rows.append((zeta, model.kappa1, model.kappa2, res1, res2, "ok"))
        vals = spec.energy_spectrum(kappa_grid, model)
        curves[f"zeta={zeta:g}"] = (kappa_grid, vals)
        for kap, ev in zip(kappa_grid, vals):
            curve_rows.append((zeta, kap, ev))
    _write_csv(out_dir / "spectrum.csv", cfg, "spectrum",
               ["zeta", "kappa1", "kappa2", "residual1", "residual2", "status"], rows)
    _write_csv(out_dir / "spectrum_curve.csv", cfg, "spectrum",
               ["zeta", "kappa", "energy"], curve_rows)
    if cfg.get_bool("run", "plots") and curves:
        plots.spectrum_figure(curves, out_dir / "spectrum.svg")
    print(f"spectrum: {sum(1 for r in rows if r[-1] == 'ok')}/{len(rows)} zeta values solved")
    return 0


def cmd_sample(cfg, out_dir: Path) -> int:
    model = spec.build_model(0.0)
    n_modes = cfg.get_int("run", "n_modes")
    ps = fsamp.draw_parameter_set(n_modes, model, cfg.seed)
    mean_v = np.array(cfg.get_floats("sample", "mean_velocity"))
    if mean_v.size != 3:
        raise ConfigError("sample.mean_velocity must be a 3-vector")
    frame = fsamp.LocalFrame(0.0, mean_v)
    extent = cfg.get_float("sample", "extent")
    n = cfg.get_int("sample", "points")
    comp = cfg.get_int("sample", "component")
    if comp not in (0, 1, 2):
        raise ConfigError("sample.component must be 0, 1 or 2")
    times = cfg.get_floats("sample", "times")
    axis = np.linspace(-extent / 2, extent / 2, n)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([x1.ravel(), x2.ravel(), np.zeros(x1.size)])
    rows = []
    panels = {}
    for t in times:
        vals = fsamp.eval_local_fluctuation(pts, t, ps, frame)[:, comp]
        panels[f"t = {t:g}"] = vals.reshape(n, n).T
        for p, v in zip(pts, vals):
            rows.append((t, p[0], p[1], p[2], v))
    _write_csv(out_dir / "field_realization.csv", cfg, "sample",
               ["t", "x1", "x2", "x3", "value"], rows)
    if cfg.get_bool("run", "plots"):
        plots.field_slice_figure(axis, axis, panels, out_dir / "field_realization.svg")
    var = float(np.var([r[4] for r in rows]))
    print(f"sample: {len(times)} time slices on {n}x{n} grid, value variance {var:.4f}")
    return 0


def _validate_protocol(cfg):
    model = spec.build_model(0.0)
    frame = fsamp.LocalFrame(0.0, np.zeros(3))
    seed = cfg.seed
    dx = cfg.get_float("validate", "spacing_x")
    dt = cfg.get_float("validate", "spacing_t")
    variates = cfg.get("validate", "variates")
    if variates not in ("vector", "component"):
        raise ConfigError("validate.variates must be 'vector' or 'component'")

    def ps_factory(n_modes, stream):
        return fsamp.draw_parameter_set(n_modes, model, seed, stream)

    def point_chooser(d):
        pts = np.zeros((d, 3))
        pts[:, 0] = dx * np.arange(d)
        return pts, dt * np.arange(d)

    if variates == "vector":
        def evaluator(ps, pts, times):
            return fsamp.eval_local_fluctuation(pts, times, ps, frame).ravel()
    else:
        def evaluator(ps, pts, times):
            return fsamp.eval_local_fluctuation(pts, times, ps, frame)[:, 0]

    return model, frame, ps_factory, point_chooser, evaluator


def cmd_validate(cfg, out_dir: Path) -> int:
    model, frame, ps_factory, point_chooser, evaluator = _validate_protocol(cfg)
    n_values = cfg.get_ints("validate", "n_values")
    d_values = cfg.get_ints("validate", "d_values")
    reps = cfg.get_int("validate", "reps")
    n_samples = cfg.get_int("validate", "sample_size")

    table = mstats.rejection_frequency_experiment(
        n_values, d_values, reps, n_samples, ps_factory, point_chooser, evaluator,
    )
    freq = table["frequencies"]
    rows = [
        [n] + [freq[i, j] for j in range(len(d_values))]
        for i, n in enumerate(n_values)
    ]
    _write_csv(out_dir / "royston_frequencies.csv", cfg, "validate",
               ["N"] + [f"d={d}" for d in d_values], rows)

    # lag-0 covariance check: component variance must be 2/3
    n_cov = cfg.get_int("validate", "covariance_sets")
    probe = np.array([0.4, -0.2, 0.9])
    t_probe = 0.3
    vals = np.empty((n_cov, 3))
    for i in range(n_cov):
        ps = ps_factory(cfg.get_int("run", "n_modes"), (9, i))
        vals[i] = fsamp.eval_local_fluctuation(probe, t_probe, ps, frame)
    cov, se = mstats.empirical_covariance(vals)
    lag0 = {
        "target": 2.0 / 3.0,
        "variances": [float(cov[i, i]) for i in range(3)],
        "standard_errors": [float(se[i, i]) for i in range(3)],
    }
    cov_ok = all(
        abs(cov[i, i] - 2.0 / 3.0) <= 3.0 * se[i, i] for i in range(3)
    )

    failures = []
    threshold_min = cfg.get_int("validate", "threshold_min_reps")
    checked = reps >= threshold_min
    if checked:
        if 50 in n_values and 3 in d_values:
            f = freq[n_values.index(50), d_values.index(3)]
            lo, hi = cfg.get_float("validate", "band_n50_lo"), cfg.get_float("validate", "band_n50_hi")
            if not lo <= f <= hi:
                failures.append(f"N=50 d=3 rejection {f:.3f} outside [{lo}, {hi}]")
        if 10 in n_values and 3 in d_values:
            f = freq[n_values.index(10), d_values.index(3)]
            floor = cfg.get_float("validate", "min_n10")
            if not f > floor:
                failures.append(f"N=10 d=3 rejection {f:.3f} not above {floor}")
    if not cov_ok:
        failures.append("lag-0 component variance outside 3 standard errors of 2/3")

    _write_json(out_dir / "covariance_report.json", cfg, "validate", {
        "lag0": lag0,
        "rejection_frequencies": {
            str(n): {str(d): float(freq[i, j]) for j, d in enumerate(d_values)}
            for i, n in enumerate(n_values)
        },
        "thresholds_checked": checked,
        "failures": failures,
    })
    for n, row in zip(n_values, freq):
        print(f"validate: N={n}: " + " ".join(f"d={d}:{v:.3f}" for d, v in zip(d_values, row)))
    print(f"validate: lag-0 variances {['%.4f' % v for v in lag0['variances']]} (target 0.6667)")
    if failures:
        raise ThresholdError("; ".join(failures))
    if not checked:
        print(f"validate: thresholds skipped (reps {reps} < {threshold_min})")
    print("validate: all thresholds passed" if checked else "validate: smoke run complete")
    return 0


_TRAJ_COLUMNS = ["t", "r1", "r2", "r3", "v1", "v2", "v3", "e",
                 "dt", "tT", "lT_over_vrel", "u1", "u2", "u3"]


def _trajectory_rows(rec):
    rows = []
    for i in range(rec.t.size):
        rows.append((
            rec.t[i], rec.r[i, 0], rec.r[i, 1], rec.r[i, 2],
            rec.v[i, 0], rec.v[i, 1], rec.v[i, 2], rec.e[i],
            rec.dt[i], rec.t_turb[i], rec.l_over_vrel[i],
            rec.u[i, 0], rec.u[i, 1], rec.u[i, 2],
        ))
    return rows


def cmd_simulate(cfg, out_dir: Path) -> int:
    flow = build_flow(cfg)
    fp = build_fiber(cfg)
    drag = build_drag(cfg)
    tol = build_tolerances(cfg)
    ps = None
    if cfg.get_bool("run", "fluctuations"):
        model = spec.build_model(0.0)
        ps = fsamp.draw_parameter_set(cfg.get_int("run", "n_modes"), model, cfg.seed, (0,))
    rec = jd.integrate_trajectory(fp, flow, ps=ps, closure=drag, tol=tol)
    _write_csv(out_dir / "trajectory.csv", cfg, "simulate", _TRAJ_COLUMNS, _trajectory_rows(rec))
    if cfg.get_bool("run", "plots"):
        plots.trajectory_figure(rec, out_dir / "trajectory.svg")
        plots.stepsize_figure(rec, out_dir / "stepsize.svg")
        plots.elongation_figure(rec, out_dir / "elongation.svg")
    print(
        f"simulate: {rec.t.size} accepted steps, termination {rec.termination}, "
        f"terminal e {rec.e[-1]:.6g}, final z {rec.r[-1, 2]:.4g} m"
    )
    return 0


def cmd_montecarlo(cfg, out_dir: Path) -> int:
    source = cfg.get("flow", "source")
    if source != "synthetic":
        raise ConfigError("montecarlo currently requires flow.source = synthetic")
    jet_params = build_jet_params(cfg)
    fp = build_fiber(cfg)
    drag = build_drag(cfg)
    tol = build_tolerances(cfg)
    heights = tuple(cfg.get_floats("montecarlo", "heights"))
    n = cfg.get_int("montecarlo", "samples")
    mc = jd.monte_carlo_elongation(
        fp, jet_params, closure=drag, n_samples=n, heights=heights,
        seed=cfg.seed, n_modes=cfg.get_int("run", "n_modes"), tol=tol,
        fluctuations=cfg.get_bool("run", "fluctuations"), workers=cfg.threads,
    )
    rows = []
    for h in heights:
        for rep in range(n):
            rows.append((h, rep, mc.crossing_times[h][rep], mc.samples[h][rep]))
    _write_csv(out_dir / "elongation_samples.csv", cfg, "montecarlo",
               ["height", "replication", "t_cross", "e"], rows)
    _write_csv(out_dir / "terminal_samples.csv", cfg, "montecarlo",
               ["replication", "e"],
               [(rep, mc.terminal[rep]) for rep in range(n)])

    density_rows = []
    density_panels = {}
    n_dens = cfg.get_int("montecarlo", "density_points")
    from scipy.stats import gaussian_kde

    for label, values in [(repr(float(h)), mc.samples[h]) for h in heights] + [
        ("terminal", mc.terminal)
    ]:
        ok = values[np.isfinite(values)]
        if ok.size < 3 or np.ptp(ok) == 0.0:
            continue
        grid = np.linspace(ok.min(), ok.max(), n_dens)
        dens = gaussian_kde(ok)(grid)
        density_panels[label] = (grid, dens)
        for g, dv in zip(grid, dens):
            density_rows.append((label, g, dv))
    _write_csv(out_dir / "elongation_density.csv", cfg, "montecarlo",
               ["height", "e", "density"], density_rows)
    _write_json(out_dir / "montecarlo_summary.json", cfg, "montecarlo", {
        "summary": mc.summary(),
        "failures": [{"replication": r, "error": msg} for r, msg in mc.failures],
    })
    if cfg.get_bool("run", "plots") and density_panels:
        plots.density_figure(density_panels, out_dir / "elongation_density.svg")
    med = np.nanmedian(mc.terminal) if np.isfinite(mc.terminal).any() else math.nan
    print(
        f"montecarlo: {n} replications, failure fraction {mc.failure_fraction:.3f}, "
        f"median terminal e {med:.6g}"
    )
    return 0


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meltblow",
        description="Turbulence-driven melt-blowing fiber jet simulator",
    )
    parser.add_argument("--version", action="version", version=f"meltblow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "solve transition wavenumbers and tabulate the energy spectrum"),
        ("sample", "evaluate one frozen field realization on a grid"),
        ("validate", "multivariate-normality and covariance validation"),
        ("simulate", "integrate a single fiber trajectory"),
        ("montecarlo", "Monte Carlo elongation statistics over replications"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, help="base RNG seed")
        p.add_argument("--config", help="INI config file")
        p.add_argument("--out", help="output directory (default: .)")
        p.add_argument("--threads", type=int,
                       help=f"worker count (default ${THREADS_ENV} or 1)")
        p.add_argument("--no-fluctuations", action="store_true",
                       help="deterministic baseline (mean flow only)")
        p.add_argument("--no-plots", action="store_true", help="skip SVG figures")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override any config value")
        if name == "montecarlo":
            p.add_argument("--samples", type=int, help="replication count")
        if name == "validate":
            p.add_argument("--reps", type=int, help="Monte Carlo replications per cell")
        if name == "spectrum":
            p.add_argument("--zetas", help="comma list of viscosity ratios")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = RunConfig(args.config, args.set)
    if args.seed is not None:
        cfg.set("run", "seed", args.seed)
    if args.out is not None:
        cfg.set("run", "out", args.out)
    if args.threads is not None:
        cfg.set("run", "threads", args.threads)
    if args.no_fluctuations:
        cfg.set("run", "fluctuations", "false")
    if args.no_plots:
        cfg.set("run", "plots", "false")
    if getattr(args, "samples", None) is not None:
        cfg.set("montecarlo", "samples", args.samples)
    if getattr(args, "reps", None) is not None:
        cfg.set("validate", "reps", args.reps)
    if getattr(args, "zetas", None):
        cfg.set("spectrum", "zetas", args.zetas)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out_dir = Path(cfg.get("run", "out"))
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir)
    except ThresholdError as exc:
        print(f"meltblow: threshold failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, DomainError) as exc:
        print(f"meltblow: config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, DomainExitError) as exc:
        print(f"meltblow: numerical failure: {exc}", file=sys.stderr)
        return 2
    except MeltblowError as exc:
        print(f"meltblow: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
