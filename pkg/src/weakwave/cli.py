"""Command line: figure data, estimation and tomography runs.

Every subcommand reads a :class:`RunConfig` (flat JSON file and/or flags,
flags win), writes its tables into the ``--out`` directory and exits with
0 on success, 2 on a configuration error and 3 when the physics is
undefined for the request (dark port, profile node, ...).

    weakwave fig3 --epsilons 0.1,0.5 --out data/
    weakwave estimate --epsilon 1e-3 --photons 1000000 --trials 16 --seed 7
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .condavg import interpolation_sweep
from .crystal import CrystalSetup, GridSpec, Plane, perturbed_density, ratio_profile, required_half_width, unperturbed_density
from .directstate import reconstruct_via_crystal
from .errors import ConfigError, PhysicsDomainError
from .metrology import estimate_epsilon, sample_photons, sweep_theta
from .pointer import bohm_momentum, gaussian, psi_x, two_slit
from .qcore import STOKES, PolarizationConfig, make_postselection, make_preselection
from .rng import worker_count
from .weakval import weak_value

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3


@dataclasses.dataclass
class RunConfig:
    phi: float = 0.1
    theta: float = math.pi / 2 - 0.2
    sigma: float = 1.0
    epsilon: float = 1e-3
    plane: str = "position"
    grid_points: int = 4097
    grid_half_width: float | None = None
    seed: int = 0
    output_path: str = "."
    format: str = "csv"

    def validate(self) -> "RunConfig":
        for name in ("phi", "theta", "sigma", "epsilon"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        try:
            PolarizationConfig(self.phi, self.theta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be >= 0")
        if self.plane not in ("position", "fourier"):
            raise ConfigError(f"plane must be 'position' or 'fourier', got {self.plane!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if isinstance(self.grid_points, bool) or not isinstance(self.grid_points, int):
            raise ConfigError("grid_points must be an integer")
        if self.grid_points < 64 or self.grid_points % 2 == 0:
            raise ConfigError("grid_points must be odd and >= 64")
        if self.grid_half_width is not None:
            hw = self.grid_half_width
            if isinstance(hw, bool) or not isinstance(hw, (int, float)) or not math.isfinite(hw) or hw <= 0:
                raise ConfigError("grid_half_width must be a positive number")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an integer in [0, 2**64)")
        if not isinstance(self.output_path, str):
            raise ConfigError("output_path must be a string")
        return self


FLAG_FIELDS = {
    "phi": "phi", "theta": "theta", "sigma": "sigma", "epsilon": "epsilon", "plane": "plane",
    "grid_points": "grid_points", "half_width": "grid_half_width", "seed": "seed",
    "out": "output_path", "format": "format",
}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    values = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values.update(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    if isinstance(values.get("grid_points"), float) and values["grid_points"].is_integer():
        values["grid_points"] = int(values["grid_points"])
    return RunConfig(**values).validate()


# -- output -----------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    value = float(value)
    return "" if math.isnan(value) else format(value, ".17g")


def _jsonable(value):
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


def write_table(path: Path, header, rows, fmt: str) -> Path:
    """Write ``rows`` as CSV (17 significant digits, LF endings) or JSON records."""
    if fmt == "csv":
        path = path.with_suffix(".csv")
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    else:
        path = path.with_suffix(".json")
        records = [dict(zip(header, (_jsonable(v) for v in row))) for row in rows]
        path.write_text(json.dumps({"columns": list(header), "rows": records}, indent=1) + "\n")
    return path


def write_report(path: Path, report: dict) -> Path:
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _eps_label(eps: float) -> str:
    return format(eps, "g")


def _parse_floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"invalid number list {text!r}")
    return vals


def _grid(cfg: RunConfig, profile, epsilon: float, plane: Plane) -> GridSpec:
    hw = cfg.grid_half_width
    if hw is None:
        hw = required_half_width(profile, epsilon, plane)
    try:
        return GridSpec(hw, cfg.grid_points)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _setup(cfg: RunConfig, epsilon: float, grid: GridSpec | None = None) -> CrystalSetup:
    pol = PolarizationConfig(cfg.phi, cfg.theta)
    profile = gaussian(cfg.sigma)
    plane = Plane(cfg.plane)
    grid = grid or _grid(cfg, profile, epsilon, plane)
    try:
        return CrystalSetup(epsilon=epsilon, preselect=make_preselection(pol), postselect=make_postselection(pol),
                            profile=profile, plane=plane, grid=grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- commands ---------------------------------------------------------------

def cmd_fig3(cfg: RunConfig, epsilons) -> list[Path]:
    """Perturbed vs unperturbed postselected profiles and their ratio."""
    if any(e < 0 for e in epsilons):
        raise ConfigError("epsilons must be >= 0")
    plane = Plane(cfg.plane)
    grid = _grid(cfg, gaussian(cfg.sigma), max(epsilons), plane)
    setups = [_setup(cfg, e, grid) for e in epsilons]
    axis_name = "x" if plane is Plane.POSITION else "p"
    base = unperturbed_density(setups[0])
    dens = [perturbed_density(s).values for s in setups]
    ratios = [ratio_profile(s) for s in setups]
    labels = [_eps_label(e) for e in epsilons]

    out = _out_dir(cfg)
    header_a = [axis_name, "unperturbed_density"] + [f"perturbed_density_eps={l}" for l in labels]
    rows_a = zip(base.axis, base.values, *dens)
    header_b = [axis_name] + [f"exact_ratio_eps={l}" for l in labels] + [f"first_order_ratio_eps={l}" for l in labels]
    rows_b = zip(base.axis, *[r.exact for r in ratios], *[r.first_order for r in ratios])
    return [write_table(out / "fig3a", header_a, rows_a, cfg.format),
            write_table(out / "fig3b", header_b, rows_b, cfg.format)]


def cmd_fig4(cfg: RunConfig, steps: int = 2001) -> list[Path]:
    """Stokes weak value and postselection probability over theta in [0, 2 pi)."""
    if steps < 2:
        raise ConfigError("steps must be >= 2")
    sweep = sweep_theta(cfg.phi, (0.0, 2 * math.pi, steps), STOKES, endpoint=False)
    out = _out_dir(cfg)
    return [write_table(out / "fig4", ["theta", "re_sw", "im_sw", "postselect_prob"], sweep.rows, cfg.format)]


def cmd_fig5(cfg: RunConfig, epsilons, steps: int = 2001) -> list[Path]:
    """Conditioned average of x/eps over theta for several displacements."""
    if steps < 2:
        raise ConfigError("steps must be >= 2")
    if any(e <= 0 for e in epsilons):
        raise ConfigError("epsilons must be positive for x/eps")
    table = interpolation_sweep(phi=cfg.phi, theta_range=(0.0, 2 * math.pi, steps), epsilons=epsilons,
                                profile=gaussian(cfg.sigma), endpoint=False)
    out = _out_dir(cfg)
    return [write_table(out / "fig5", ["theta", "eps", "cond_avg", "re_sw", "classical"], table.rows(), cfg.format)]


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def cmd_estimate(cfg: RunConfig, n_photons: int = 10**6, trials: int = 16) -> dict:
    """Monte Carlo amplification estimate of epsilon from centroid shifts."""
    if n_photons < 1 or trials < 1:
        raise ConfigError("photons and trials must be positive")
    setup = _setup(cfg, cfg.epsilon)
    s_w = weak_value(STOKES, setup.preselect, setup.postselect).value
    workers = worker_count()
    estimates, detected = [], []
    for t in range(trials):
        sample = sample_photons(setup, n_photons, trial_seed(cfg.seed, t), workers=workers)
        detected.append(sample.n_detected)
        if sample.n_detected:
            estimates.append(estimate_epsilon(sample.mean(), s_w, setup.plane, cfg.sigma, setup.hbar))
    est = np.array(estimates)
    report = {
        "epsilon_true": cfg.epsilon,
        "epsilon_hat_mean": float(est.mean()) if est.size else None,
        "epsilon_hat_stderr": float(est.std(ddof=1) / math.sqrt(est.size)) if est.size > 1 else None,
        "n_detected_mean": float(np.mean(detected)),
        "n_photons": n_photons,
        "trials": trials,
        "plane": setup.plane.value,
        "seed": cfg.seed,
        "weak_value": [s_w.real, s_w.imag],
    }
    write_report(_out_dir(cfg) / "estimate.json", report)
    return report


def _ket_json(ket) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in ket.amplitudes]


def cmd_tomo(cfg: RunConfig) -> dict:
    """Direct state determination of the configured preselection through the crystal."""
    if cfg.epsilon <= 0:
        raise ConfigError("tomography needs epsilon > 0")
    truth = make_preselection(PolarizationConfig(cfg.phi, cfg.theta))
    rep = reconstruct_via_crystal(truth, cfg.epsilon, gaussian(cfg.sigma))
    report = {
        "true_state": _ket_json(truth),
        "reconstructed": _ket_json(rep.reconstructed),
        "fidelity": rep.fidelity,
        "epsilon": cfg.epsilon,
        "measured_weak_value": [rep.s_w.real, rep.s_w.imag],
    }
    write_report(_out_dir(cfg) / "tomo.json", report)
    return report


def streamlines(profile, starts, z_max: float, dz: float = 0.01, p_z: float = 1.0):
    """Integrate ``dx/dz = p_B(x) / p_z`` by explicit midpoint steps."""
    n_steps = int(round(z_max / dz))
    zs = np.arange(n_steps + 1) * dz
    xs = np.empty((n_steps + 1, len(starts)))
    x = np.asarray(starts, dtype=float)
    xs[0] = x
    for k in range(n_steps):
        half = x + 0.5 * dz * bohm_momentum(profile, x) / p_z
        x = x + dz * bohm_momentum(profile, half) / p_z
        xs[k + 1] = x
    return zs, xs


def cmd_bohm(cfg: RunConfig, profile_spec: dict) -> list[Path]:
    """Bohmian momentum field of a static transverse profile."""
    kind = profile_spec.get("kind", "two-slit")
    if kind == "gaussian":
        profile = gaussian(cfg.sigma, phase_momentum=profile_spec.get("p0", 0.0))
    elif kind == "two-slit":
        profile = two_slit(profile_spec.get("separation", 10.0 * cfg.sigma), cfg.sigma,
                           profile_spec.get("tilt", 1.0 / cfg.sigma))
    else:
        raise ConfigError(f"unknown profile kind {kind!r}")
    grid = _grid(cfg, profile, 0.0, Plane.POSITION)
    axis = grid.axis()
    p_b = bohm_momentum(profile, axis)
    density = np.abs(psi_x(profile, axis)) ** 2
    out = _out_dir(cfg)
    written = [write_table(out / "bohm", ["x", "p_B", "density"], zip(axis, p_b, density), cfg.format)]
    n_lines = profile_spec.get("streamlines", 0)
    if n_lines:
        cdf = np.cumsum(density)
        cdf /= cdf[-1]
        starts = np.interp((np.arange(n_lines) + 0.5) / n_lines, cdf, axis)
        zs, xs = streamlines(profile, starts, profile_spec.get("z_max", 10.0), dz=0.01 * cfg.sigma)
        header = ["z"] + [f"x{k}" for k in range(n_lines)]
        written.append(write_table(out / "bohm_streamlines", header, (
            (z, *row) for z, row in zip(zs, xs)), cfg.format))
    return written


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat JSON file with RunConfig fields")
    common.add_argument("--phi", type=float, help="preselection ellipticity phase (rad)")
    common.add_argument("--theta", type=float, help="postselection polarizer angle (rad)")
    common.add_argument("--sigma", type=float, help="beam width")
    common.add_argument("--epsilon", type=float, help="crystal displacement in units of sigma")
    common.add_argument("--plane", choices=["position", "fourier"])
    common.add_argument("--grid-points", type=int, dest="grid_points")
    common.add_argument("--half-width", type=float, dest="half_width")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", metavar="PATH", help="output directory")
    common.add_argument("--format", choices=["csv", "json"])

    parser = argparse.ArgumentParser(prog="weakwave", description="Postselected weak-measurement simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig3", parents=[common], help="perturbed profiles and ratios")
    p.add_argument("--epsilons", default="0.1,0.5,1.0,2.0")
    p = sub.add_parser("fig4", parents=[common], help="weak value vs polarizer angle")
    p.add_argument("--steps", type=int, default=2001)
    p = sub.add_parser("fig5", parents=[common], help="conditioned-average interpolation")
    p.add_argument("--epsilons", default="0.1,0.5,1,2,5")
    p.add_argument("--steps", type=int, default=2001)
    p = sub.add_parser("estimate", parents=[common], help="Monte Carlo amplification estimate")
    p.add_argument("--photons", type=int, default=10**6)
    p.add_argument("--trials", type=int, default=16)
    sub.add_parser("tomo", parents=[common], help="direct state determination")
    p = sub.add_parser("bohm", parents=[common], help="Bohmian momentum of a profile")
    p.add_argument("--profile", choices=["gaussian", "two-slit"], default="two-slit")
    p.add_argument("--p0", type=float, default=0.0, help="plane-wave momentum of the gaussian profile")
    p.add_argument("--separation", type=float, help="two-slit centre separation (default 10 sigma)")
    p.add_argument("--tilt", type=float, help="two-slit phase momentum (default 1 hbar/sigma)")
    p.add_argument("--streamlines", type=int, default=0)
    p.add_argument("--z-max", type=float, default=10.0, dest="z_max")
    return parser


def run(args: argparse.Namespace):
    overrides = {field: getattr(args, flag) for flag, field in FLAG_FIELDS.items()}
    cfg = load_config(args.config, overrides)
    if args.command == "fig3":
        return cmd_fig3(cfg, _parse_floats(args.epsilons))
    if args.command == "fig4":
        return cmd_fig4(cfg, args.steps)
    if args.command == "fig5":
        return cmd_fig5(cfg, _parse_floats(args.epsilons), args.steps)
    if args.command == "estimate":
        return cmd_estimate(cfg, args.photons, args.trials)
    if args.command == "tomo":
        return cmd_tomo(cfg)
    spec = {"kind": args.profile, "p0": args.p0, "streamlines": args.streamlines, "z_max": args.z_max}
    if args.separation is not None:
        spec["separation"] = args.separation
    if args.tilt is not None:
        spec["tilt"] = args.tilt
    return cmd_bohm(cfg, spec)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = run(args)
    except PhysicsDomainError as exc:
        print(f"weakwave: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"weakwave: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"weakwave: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if isinstance(result, dict):
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        for path in result:
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
