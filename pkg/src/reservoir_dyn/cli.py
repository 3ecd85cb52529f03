"""Scenario runner CLI.

    reservoir-dyn <subcommand> --scenario <path> [--out <dir>] [--n-steps K] [--plot]

Subcommands: population, force, cp-asymptotic, poles, markov-summary,
greens-dump, spectral-dump, sweep-z0, reproduce. Scenario files use the
plain `key = value` format (see config module); `reproduce figN` runs the
built-in presets behind the published figures. Every CSV embeds the scenario
digest in a `#` header comment and prints 12 significant digits; reruns of
the same scenario and step counts are bit-identical.

Exit codes: 2 config error, 3 quadrature failure, 4 step-budget violation,
5 no pole found. Failures print one machine-parseable line to stderr:
`error: <code>: <detail>`.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, Scenario, parse_scenario, render_scenario, scenario_digest
from .errors import (
    MaterialPoleError,
    NoPoleError,
    QuadratureError,
    ReservoirDynError,
    StepBudgetError,
)
from .force import (
    build_force_weights,
    exact_force,
    fm2_static_force,
    fm_force_excited,
    fm_force_ground,
    pm2_force,
)
from .greens import scattered_gzz
from .laplace import asymptotic_cp_force, find_pole
from .markov import fm_population, markov_summary, pm_population
from .presets import FIGURE_PRESETS, preset
from .spectral import build_spectral_density, make_kernel
from .volterra import solve_vie, step_budget


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_csv(path: Path, scenario: Scenario, columns: list[str], rows, notes=()) -> Path:
    lines = [f"# digest: {scenario_digest(scenario)}"]
    lines += [f"# {n}" for n in notes]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _load_scenario(args) -> Scenario:
    if args.scenario is None:
        raise ConfigError("--scenario <path> is required for this subcommand")
    p = Path(args.scenario)
    if not p.exists():
        raise ConfigError(f"scenario file not found: {p}")
    return parse_scenario(p.read_text())


class _Pipeline:
    """Shared per-run computation cache (J table, Markov summary, grids)."""

    def __init__(self, scenario: Scenario, n_steps_override: int = 0):
        self.scenario = scenario
        self.sd = build_spectral_density(scenario)
        self.summary = markov_summary(self.sd, scenario.atom.omega0)
        self.n_steps_override = n_steps_override

    def time_window(self) -> tuple[float, int]:
        tg = self.scenario.time_grid
        t_final = tg.t_final if tg.units == "omega_p" else tg.t_final / self.summary.gamma
        budget = step_budget(
            self.scenario.state,
            self.sd.omega_max,
            self.scenario.atom.omega0,
            self.summary.gamma,
        )
        n_auto = int(np.ceil(t_final / budget))
        n = self.n_steps_override or tg.n_steps or max(n_auto, 400)
        return t_final, n

    def amplitude(self):
        t_final, n = self.time_window()
        kernel = make_kernel(self.sd, self.scenario.state, t_final, n)
        return solve_vie(kernel, gamma=self.summary.gamma)


def _plot(path_csv: Path, xcol: int, ycols: list[int], labels: list[str]) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("plotting requested but matplotlib is unavailable", file=sys.stderr)
        return
    data = np.genfromtxt(path_csv, delimiter=",", comments="#", skip_header=0, names=True)
    names = data.dtype.names
    fig, ax = plt.subplots(figsize=(6, 4))
    for yc, lab in zip(ycols, labels):
        ax.plot(data[names[xcol]], data[names[yc]], label=lab)
    ax.set_xlabel(names[xcol])
    ax.legend()
    fig.tight_layout()
    fig.savefig(path_csv.with_suffix(".svg"))
    plt.close(fig)


def cmd_population(args, scenario: Scenario, outdir: Path) -> list[Path]:
    pipe = _Pipeline(scenario, args.n_steps)
    trace = pipe.amplitude()
    g = pipe.summary.gamma
    t = trace.times
    cols = ["t_gamma", "t_omega_p", "re_c", "im_c", "abs2_c"]
    arrays = [t * g, t, trace.values.real, trace.values.imag, trace.population]
    if args.with_markov:
        delta = pipe.summary.delta if scenario.state == "excited" else pipe.summary.delta_g
        fm = fm_population(scenario.state, t, g, delta)
        stride = max(1, len(t) // 600)
        pm_t = t[::stride]
        pm = pm_population(scenario.state, pm_t, pipe.sd, scenario.atom.omega0)
        pm_full = np.interp(t, pm_t, np.abs(pm) ** 2)
        cols += ["abs2_fm", "abs2_pm"]
        arrays += [np.abs(fm) ** 2, pm_full]
    rows = np.stack(arrays, axis=1)
    path = _write_csv(outdir / "population.csv", scenario, cols, rows,
                      notes=[f"gamma_over_omega_p: {_fmt(g)}", f"state: {scenario.state}"])
    if args.plot:
        _plot(path, 0, [4], ["|c|^2"])
    return [path]


def cmd_force(args, scenario: Scenario, outdir: Path) -> list[Path]:
    pipe = _Pipeline(scenario, args.n_steps)
    trace = pipe.amplitude()
    t_final, _ = pipe.time_window()
    weights = build_force_weights(scenario, t_final=t_final)
    g = pipe.summary.gamma
    exact = exact_force(trace, weights, scenario.state)
    stride = max(1, len(trace.times) // args.max_rows)
    tt = trace.times[::stride]
    if scenario.state == "excited":
        fm = fm_force_excited(g, pipe.summary.delta, weights, tt)
    else:
        fm = fm_force_ground(pipe.summary.delta_g, weights, tt)
    pm2 = pm2_force(trace, weights, scenario.state, times=tt)
    fm2 = fm2_static_force(weights, scenario.atom.omega0, scenario.state)
    rows = np.stack(
        [tt * g, exact.values[::stride], fm.values, pm2.values, np.full(tt.size, fm2)],
        axis=1,
    )
    cols = ["t_gamma", "f_exact_over_f0", "f_fm_over_f0", "f_pm2_over_f0", "f_fm2_over_f0"]
    path = _write_csv(outdir / "force.csv", scenario, cols, rows,
                      notes=[f"f0_newton: {_fmt(weights.f0_si)}", f"state: {scenario.state}"])
    if args.plot:
        _plot(path, 0, [1, 2, 3, 4], ["exact", "FM", "PM2", "FM2"])
    return [path]


def cmd_poles(args, scenario: Scenario, outdir: Path) -> list[Path]:
    pipe = _Pipeline(scenario, args.n_steps)
    pole = find_pole(pipe.sd, scenario.atom.omega0)
    weights = build_force_weights(scenario)
    cp = asymptotic_cp_force(pole, weights, scenario.atom.omega0)
    w0 = scenario.atom.omega0
    rows = [[pole.alpha_p / w0, pole.c_mag, pole.delta_g_ref / w0, cp["nonmarkov"], cp["fm"]]]
    cols = ["alpha_p_over_omega0", "c_mag", "delta_g_over_omega0", "cp_nm_over_f0", "cp_fm_over_f0"]
    return [_write_csv(outdir / "poles.csv", scenario, cols, rows)]


def cmd_markov_summary(args, scenario: Scenario, outdir: Path) -> list[Path]:
    pipe = _Pipeline(scenario, args.n_steps)
    w0 = scenario.atom.omega0
    s = pipe.summary
    rows = [[s.gamma / w0, s.delta / w0, s.delta_g / w0]]
    cols = ["gamma_over_omega0", "delta_over_omega0", "delta_g_over_omega0"]
    return [_write_csv(outdir / "markov_summary.csv", scenario, cols, rows)]


def cmd_greens_dump(args, scenario: Scenario, outdir: Path) -> list[Path]:
    from .spectral import _refinement_grid

    grid = _refinement_grid(scenario)[:: max(1, args.n_steps or 1)]
    rows = []
    for w in grid:
        smp = scattered_gzz(
            scenario.atom.z0, float(w), scenario.material, scenario.reservoir_backend
        )
        rows.append([w, smp.g_zz.real, smp.g_zz.imag, smp.d_dz_g_zz.imag])
    cols = ["omega_over_omega_p", "re_gzz", "im_gzz", "dz_weight"]
    return [_write_csv(outdir / "greens.csv", scenario, cols, rows)]


def cmd_spectral_dump(args, scenario: Scenario, outdir: Path) -> list[Path]:
    pipe = _Pipeline(scenario)
    rows = np.stack([pipe.sd.omega, pipe.sd.values], axis=1)
    cols = ["omega_over_omega_p", "J"]
    notes = [f"quad_error_max: {_fmt(pipe.sd.metadata['quad_error_max'])}"]
    path = _write_csv(outdir / "spectral.csv", scenario, cols, rows, notes=notes)
    if args.plot:
        _plot(path, 0, [1], ["J"])
    return [path]


def cmd_cp_asymptotic(args, scenario: Scenario, outdir: Path) -> list[Path]:
    from dataclasses import replace

    z0s = np.linspace(args.z0_min, args.z0_max, args.z0_count)
    rows = []
    for z0 in z0s:
        sc = replace(scenario, atom=replace(scenario.atom, z0=float(z0)))
        sd = build_spectral_density(sc)
        pole = find_pole(sd, sc.atom.omega0)
        weights = build_force_weights(sc)
        cp = asymptotic_cp_force(pole, weights, sc.atom.omega0)
        rows.append(
            [z0, cp["nonmarkov"], cp["fm"], pole.alpha_p / sc.atom.omega0, pole.c_mag,
             cp["nonmarkov"] * weights.f0_si]
        )
    cols = ["z0_in_c_over_omega_p", "cp_nm_over_f0", "cp_fm_over_f0",
            "alpha_p_over_omega0", "c_mag", "cp_nm_newton"]
    path = _write_csv(outdir / "cp_asymptotic.csv", scenario, cols, rows)
    if args.plot:
        _plot(path, 0, [1, 2], ["non-Markovian", "FM"])
    return [path]


def cmd_sweep_z0(args, scenario: Scenario, outdir: Path) -> list[Path]:
    from .config import compute_coupling_g
    from dataclasses import replace

    z0s = np.linspace(args.z0_min, args.z0_max, args.z0_count)
    rows = []
    for z0 in z0s:
        atom = replace(scenario.atom, z0=float(z0))
        rows.append([z0, compute_coupling_g(atom, scenario.units)])
    cols = ["z0_in_c_over_omega_p", "coupling_g"]
    return [_write_csv(outdir / "sweep_z0.csv", scenario, cols, rows)]


def cmd_reproduce(args, outdir: Path) -> list[Path]:
    key = args.figure
    if key not in FIGURE_PRESETS:
        raise ConfigError(f"unknown figure {key!r}; expected one of {sorted(FIGURE_PRESETS)}")
    regime, state, quantity = FIGURE_PRESETS[key]
    t_final = 6.0 if quantity != "population" or state == "excited" else 4.0
    scenario = preset(regime, state=state, t_final=t_final)
    sub = outdir / key
    sub.mkdir(parents=True, exist_ok=True)
    if quantity == "population":
        args.with_markov = True
        return cmd_population(args, scenario, sub)
    if quantity == "force":
        return cmd_force(args, scenario, sub)
    if quantity == "cp-asymptotic":
        args.z0_min, args.z0_max, args.z0_count = 0.4, 1.2, 9
        return cmd_cp_asymptotic(args, scenario, sub)
    raise ConfigError(f"unhandled quantity {quantity!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="reservoir-dyn",
        description="Non-Markovian population and Casimir-Polder force engine",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, scenario_required=True):
        sp.add_argument("--scenario", default=None, help="scenario file path")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--n-steps", type=int, default=0, dest="n_steps",
                        help="override solver step count")
        sp.add_argument("--plot", action="store_true", help="render SVG next to the CSV")

    sp = sub.add_parser("population", help="solve the population VIE")
    common(sp)
    sp.add_argument("--with-markov", action="store_true", dest="with_markov")
    sp = sub.add_parser("force", help="exact + Markov-ladder force traces")
    common(sp)
    sp.add_argument("--max-rows", type=int, default=2000, dest="max_rows")
    for name in ("poles", "markov-summary", "greens-dump", "spectral-dump"):
        common(sub.add_parser(name))
    sp = sub.add_parser("cp-asymptotic", help="asymptotic CP force vs z0")
    common(sp)
    sp.add_argument("--z0-min", type=float, default=0.4, dest="z0_min")
    sp.add_argument("--z0-max", type=float, default=1.2, dest="z0_max")
    sp.add_argument("--z0-count", type=int, default=9, dest="z0_count")
    sp = sub.add_parser("sweep-z0", help="coupling g vs atom height")
    common(sp)
    sp.add_argument("--z0-min", type=float, default=0.1, dest="z0_min")
    sp.add_argument("--z0-max", type=float, default=1.0, dest="z0_max")
    sp.add_argument("--z0-count", type=int, default=19, dest="z0_count")
    sp = sub.add_parser("reproduce", help="regenerate a published-figure dataset")
    common(sp)
    sp.add_argument("figure", help="fig2..fig9")
    sp.add_argument("--with-markov", action="store_true", dest="with_markov")
    sp.add_argument("--max-rows", type=int, default=2000, dest="max_rows")
    return p


_DISPATCH = {
    "population": cmd_population,
    "force": cmd_force,
    "poles": cmd_poles,
    "markov-summary": cmd_markov_summary,
    "greens-dump": cmd_greens_dump,
    "spectral-dump": cmd_spectral_dump,
    "cp-asymptotic": cmd_cp_asymptotic,
    "sweep-z0": cmd_sweep_z0,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outdir = Path(args.out)
    t0 = time.time()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "reproduce":
            scenario = None
            files = cmd_reproduce(args, outdir)
        else:
            scenario = _load_scenario(args)
            files = _DISPATCH[args.subcommand](args, scenario, outdir)
        manifest = {
            "version": __version__,
            "subcommand": args.subcommand,
            "digest": scenario_digest(scenario) if scenario else args.figure,
            "wall_clock_s": round(time.time() - t0, 3),
            "outputs": [str(f) for f in files],
        }
        (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except (ConfigError, MaterialPoleError) as exc:
        print(f"error: 2: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"error: 3: {exc}", file=sys.stderr)
        return 3
    except StepBudgetError as exc:
        print(f"error: 4: {exc}", file=sys.stderr)
        return 4
    except NoPoleError as exc:
        print(f"error: 5: {exc}", file=sys.stderr)
        return 5
    except ReservoirDynError as exc:
        print(f"error: 2: {exc}", file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
