"""Command-line scenario runner.

``spr3 run`` builds the optimal stroke for a target displacement, integrates
one or more loops and writes a trajectory CSV, a JSON summary and, with
``--plot``, an SVG figure.  ``spr3 coefficients`` tabulates numerically
extracted coefficients against their series over a sweep of ball sizes.

Exit codes: 0 success, 2 configuration error, 3 inadmissible stroke,
4 numerical failure.
"""
import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .control import (
    ControlExpansion, expand, extracted_coefficients, fit_Ak, fit_F0, series_coefficients,
)
from .dynamics import integrate_exact, integrate_leading_order, loop_energy, net_displacement
from .energetics import extract_G0
from .errors import AdmissibilityError, AsymptoticRegimeWarning, ConfigError, NumericalError
from .kinematics import TAU_UNIT, SwimmerGeometry
from .strokes import omega_vector, optimal_stroke, realized_displacement

SCENARIOS = ("pure-x", "pure-y", "pure-theta")
VARIANTS = ("leading-order", "exact")
SOURCES = ("series", "extracted")
CSV_HEADER = "t,xi1,xi2,xi3,cx,cy,theta,power"
COEFFICIENT_NAMES = ("phi", "alpha", "beta", "lam", "gamma", "kappa", "h", "g1", "g2")
REGIME_RATIO = 0.2
EXIT_OK, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_NUMERICAL = 0, 2, 3, 4


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a single run needs.

    ``dp`` overrides ``scenario`` when given.  Translations in a named
    scenario are ``magnitude * arm_length``, the rotation is ``magnitude``
    radians.
    """

    radius: float = 0.1
    arm_length: float = 1.0
    viscosity: float = 1.0
    scenario: str = "pure-theta"
    magnitude: float = 0.01
    dp: tuple = None
    variant: str = "leading-order"
    coeffs: str = "series"
    steps: int = 256
    loops: int = 1
    out: str = None
    name: str = None
    plot: bool = False

    @classmethod
    def from_mapping(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data).validated()
        except TypeError as exc:
            raise ConfigError(f"invalid config value: {exc}") from exc

    def validated(self) -> "ScenarioConfig":
        if self.dp is None and self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.coeffs not in SOURCES:
            raise ConfigError(f"coeffs must be one of {SOURCES}, got {self.coeffs!r}")
        if self.dp is not None:
            dp = tuple(float(x) for x in self.dp)
            if len(dp) != 3 or not np.all(np.isfinite(dp)):
                raise ConfigError(f"dp must be three finite numbers, got {self.dp!r}")
            if not any(dp):
                raise ConfigError("dp must be nonzero")
            self = replace(self, dp=dp)
        elif not (np.isfinite(self.magnitude) and self.magnitude != 0):
            raise ConfigError(f"magnitude must be finite and nonzero, got {self.magnitude!r}")
        for key in ("steps", "loops"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{key} must be a positive integer, got {value!r}")
        if self.variant == "leading-order" and self.steps < 64:
            raise ConfigError("leading-order runs need at least 64 steps per loop")
        self.geometry()
        return self

    def geometry(self) -> SwimmerGeometry:
        try:
            return SwimmerGeometry(float(self.radius), float(self.arm_length), float(self.viscosity))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid geometry: {exc}") from exc

    def target(self) -> np.ndarray:
        if self.dp is not None:
            return np.array(self.dp, dtype=float)
        axis = SCENARIOS.index(self.scenario)
        dp = np.zeros(3)
        dp[axis] = self.magnitude * (self.arm_length if axis < 2 else 1.0)
        return dp

    def stem(self) -> str:
        return self.name or (self.scenario if self.dp is None else "custom")

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get("SPR3_OUT_DIR") or ".")


def _floats(x):
    return [float(v) for v in np.ravel(x)]


def _regime_check(geom: SwimmerGeometry):
    if geom.ratio >= REGIME_RATIO:
        warnings.warn(
            f"a/xi0 = {geom.ratio:.3g} is outside the small-ball regime |xi|/xi0 << a/xi0 << 1; "
            "the asymptotic coefficients may be inaccurate",
            AsymptoticRegimeWarning, stacklevel=3,
        )


def _template_residuals(geom: SwimmerGeometry) -> dict:
    exp = expand(geom)
    _, r0 = fit_F0(exp.F0)
    _, rk = fit_Ak(*exp.correctors)
    return {"F0": float(r0), "A1": float(rk[0]), "A2": float(rk[1]), "A3": float(rk[2]),
            "G0": float(extract_G0(geom).residual)}


def run_scenario(config: ScenarioConfig) -> dict:
    """Run one scenario and write its outputs; returns the output paths.

    Raises ``ConfigError``, ``AdmissibilityError`` or ``NumericalError``.
    """
    config = config.validated()
    geom = config.geometry()
    _regime_check(geom)
    target = config.target()

    series = series_coefficients(geom)
    numeric = extracted_coefficients(geom)
    coeffs = series if config.coeffs == "series" else numeric
    stroke = optimal_stroke(coeffs, target, geom)
    omega = omega_vector(coeffs, target)

    if config.variant == "leading-order":
        traj = integrate_leading_order(coeffs, ControlExpansion.from_coefficients(coeffs), stroke,
                                       config.steps, config.loops)
    else:
        traj = integrate_exact(geom, stroke, config.steps, config.loops)
    if not np.all(np.isfinite(traj.rows())):
        raise NumericalError("trajectory contains non-finite values")

    total = net_displacement(traj)
    k = config.steps
    simulated = np.r_[traj.c[k] - traj.c[0], traj.theta[k] - traj.theta[0]]
    closed = realized_displacement(coeffs, stroke)
    energy = loop_energy(traj)
    norm = float(np.linalg.norm(omega))
    plane = {f"tau{k + 1}": _floats([stroke.u @ TAU_UNIT[:, k], stroke.v @ TAU_UNIT[:, k]])
             for k in range(3)}
    summary = {
        "geometry": {"radius": geom.radius, "arm_length": geom.arm_length,
                     "viscosity": geom.viscosity, "ratio": geom.ratio},
        "target": _floats(target),
        "omega_norm": norm,
        "realized_displacement": {
            "first_loop": _floats(simulated),
            "total": _floats(total),
            "closed_form": _floats(closed),
            "error": _floats(simulated - target),
            "relative_error": float(np.linalg.norm(simulated - target) / np.linalg.norm(target)),
        },
        "loop_energy": {
            "normalized": energy,
            "physical": energy * geom.drag,
            "relative_error_vs_omega": abs(energy - norm) / norm,
        },
        "coefficients": {"numeric": numeric.as_dict(), "series": series.as_dict()},
        "diagnostics": {
            "scenario": config.scenario if config.dp is None else "custom",
            "variant": config.variant,
            "coefficient_source": config.coeffs,
            "steps_per_loop": config.steps,
            "loops": config.loops,
            "stroke_u": _floats(stroke.u),
            "stroke_v": _floats(stroke.v),
            "stroke_plane_inner_products": plane,
            "sigma": float(stroke.sigma),
            "two_pi_sigma": float(2 * np.pi * stroke.sigma),
            "max_excursion": float(stroke.excursion().max()),
            "admissible_excursion": float(geom.arm_length - geom.min_arm_length),
            "template_residuals": _template_residuals(geom),
        },
    }

    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    stem = config.stem()
    paths = {"csv": out / f"{stem}.csv", "json": out / f"{stem}.json"}
    rows = traj.rows()
    rows[:, 7] *= geom.drag
    np.savetxt(paths["csv"], rows, fmt="%.17g", delimiter=",", header=CSV_HEADER, comments="")
    paths["json"].write_text(json.dumps(summary, indent=2) + "\n")
    if config.plot:
        from .plotting import save_scenario_figure

        paths["svg"] = save_scenario_figure(geom, traj, out / f"{stem}.svg",
                                            title=f"{stem}: target {_floats(target)}")
    return paths


def _slope(ratios, dev):
    ratios, dev = np.asarray(ratios), np.asarray(dev)
    if len(ratios) < 2 or np.any(dev <= 0):
        return None
    return float(np.polyfit(np.log(ratios), np.log(dev), 1)[0])


def coefficients_report(geom: SwimmerGeometry, sweep) -> dict:
    """Numeric vs series coefficients at each ``a / xi0`` in ``sweep``.

    ``geom`` supplies the arm length and viscosity; its radius is replaced by
    ``ratio * arm_length``.  ``gamma`` is compared as ``gamma xi0^2`` and the
    slopes fit ``log|numeric - series|`` against ``log(a / xi0)``.  A
    coefficient whose deviation is at round-off level everywhere is listed
    under ``exact`` with a null slope.
    """
    ratios = sorted((float(r) for r in sweep), reverse=True)
    if not ratios:
        raise ConfigError("coefficient sweep is empty")
    rows = []
    for r in ratios:
        g = SwimmerGeometry(r * geom.arm_length, geom.arm_length, geom.viscosity)
        numeric = extracted_coefficients(g).as_dict()
        series = series_coefficients(g).as_dict()
        dev = {k: abs(numeric[k] - series[k]) for k in COEFFICIENT_NAMES}
        rows.append({"ratio": r, "numeric": numeric, "series": series, "deviation": dev})
    slopes, exact = {}, []
    for k in COEFFICIENT_NAMES:
        rel = [row["deviation"][k] / abs(row["series"][k]) for row in rows]
        if max(rel) <= 1e-12:
            exact.append(k)
            slopes[k] = None
        else:
            slopes[k] = _slope(ratios, [row["deviation"][k] for row in rows])
    return {"arm_length": geom.arm_length, "viscosity": geom.viscosity,
            "rows": rows, "slopes": slopes, "exact": exact}


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _overrides(args) -> dict:
    keys = ("radius", "arm_length", "viscosity", "scenario", "magnitude", "dp",
            "variant", "coeffs", "steps", "loops", "out", "name")
    data = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if args.plot:
        data["plot"] = True
    return data


def _sweep_configs(base: dict, path) -> list:
    try:
        entries = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read sweep {path}: {exc}") from exc
    if not isinstance(entries, list) or not entries or not all(isinstance(e, dict) for e in entries):
        raise ConfigError("sweep file must hold a non-empty JSON list of objects")
    configs = [ScenarioConfig.from_mapping({**base, **entry}) for entry in entries]
    targets = [c.out_dir() / c.stem() for c in configs]
    if len(set(targets)) != len(targets):
        raise ConfigError("sweep entries must write to distinct files; set 'name' per entry")
    return configs


def _run_guarded(config: ScenarioConfig) -> int:
    try:
        paths = run_scenario(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"inadmissible stroke: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in paths.values():
        print(path)
    return EXIT_OK


def _cmd_run(args) -> int:
    base = {**_load_config(args.config), **_overrides(args)}
    if args.sweep is None:
        return _run_guarded(ScenarioConfig.from_mapping(base))
    configs = _sweep_configs(base, args.sweep)
    workers = args.jobs or min(len(configs), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(_run_guarded, configs))
    return max(codes)


def _cmd_coefficients(args) -> int:
    try:
        geom = SwimmerGeometry(min(args.ratios, default=0.01) * args.arm_length, args.arm_length,
                               args.viscosity)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = coefficients_report(geom, args.ratios)
    out = Path(args.out or os.environ.get("SPR3_OUT_DIR") or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "coefficients.json"
    path.write_text(json.dumps(report, indent=2) + "\n")
    print(path)
    if args.plot:
        from .plotting import save_convergence_figure

        print(save_convergence_figure(report, out / "coefficients.svg"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spr3", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate an optimal stroke for a target displacement")
    run.add_argument("--config", help="JSON file with ScenarioConfig fields")
    run.add_argument("--radius", type=float)
    run.add_argument("--arm-length", type=float)
    run.add_argument("--viscosity", type=float)
    run.add_argument("--scenario", choices=SCENARIOS)
    run.add_argument("--magnitude", type=float, help="size d of a named scenario")
    run.add_argument("--dp", type=float, nargs=3, metavar=("X", "Y", "THETA"))
    run.add_argument("--variant", choices=VARIANTS)
    run.add_argument("--coeffs", choices=SOURCES)
    run.add_argument("--steps", type=int, help="integrator steps per loop")
    run.add_argument("--loops", type=int)
    run.add_argument("--out", help="output directory (default $SPR3_OUT_DIR or .)")
    run.add_argument("--name", help="file stem for the outputs")
    run.add_argument("--plot", action="store_true", help="also write an SVG figure")
    run.add_argument("--sweep", help="JSON list of config overrides to run concurrently")
    run.add_argument("--jobs", type=int, help="worker processes for --sweep")
    run.set_defaults(func=_cmd_run)

    coef = sub.add_parser("coefficients", help="numeric vs series coefficient table")
    coef.add_argument("--ratios", type=float, nargs="*", default=[0.04, 0.02, 0.01])
    coef.add_argument("--arm-length", type=float, default=1.0)
    coef.add_argument("--viscosity", type=float, default=1.0)
    coef.add_argument("--out")
    coef.add_argument("--plot", action="store_true")
    coef.set_defaults(func=_cmd_coefficients)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
