"""Command-line driver: datasets out, manifests alongside.

Subcommands mirror the analysis pipeline: ``spectrum`` (converged
eigenvalues per parity sector), ``peres`` (expectation lattices, with
optional integrable-limit overlays), ``ratio`` and ``spacing`` (spectral
statistics), ``poincare`` (classical sections), and ``integrable-check``
(numeric vs analytic spectrum at zero splitting).

Options may come from flags or a flat ``key = value`` config file; flags
win.  Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 domain or shell error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import classical, eigensolve, integrable, peres, spectral_stats
from .errors import ConfigError, NumericalFailure, TpDickeError
from .model import ModelParams, ParitySector, hamiltonian, observable, perturbed_hamiltonian
from .output import RunManifest, params_dict, write_csv

SECTOR_CHOICES = ("plus1", "plusi", "minus1", "minusi", "all", "full")
OP_CHOICES = ("number", "jz", "jx", "jx2", "j2", "cdagc")

# name -> (parse, default, help); None default means "required if listed"
OPTION_SPEC = {
    "omega": (float, 1.0, "field frequency"),
    "omega0": (float, None, "atomic level splitting"),
    "gamma": (float, None, "coupling strength"),
    "j": (float, None, "collective spin (half-integers allowed)"),
    "nmax": (int, None, "photon-number truncation"),
    "delta": (float, eigensolve.DEFAULT_DELTA, "truncation-convergence tolerance"),
    "sector": (str, "all", "parity sector"),
    "epsilon-perturb": (float, 0.0, "parity-breaking Jx perturbation strength"),
    "op": (str, None, "observable (repeat or comma-separate)"),
    "window": (int, spectral_stats.DEFAULT_WINDOW, "levels per statistics window"),
    "stride": (int, spectral_stats.DEFAULT_STRIDE, "levels between window starts"),
    "nu": (int, spectral_stats.DEFAULT_NU, "unfolding half-window in spacings"),
    "energy": (float, None, "scaled energy (shell or window center)"),
    "tmax": (float, classical.DEFAULT_T_MAX, "integration time"),
    "tol": (float, classical.DEFAULT_TOL, "integrator relative tolerance"),
    "seed": (int, 0, "RNG seed"),
    "ntraj": (int, 25, "trajectories per section"),
    "bins": (int, 50, "histogram bins"),
    "smax": (float, 4.0, "histogram spacing cutoff"),
    "ncmax": (int, 12, "largest oscillator quantum in analytic overlays"),
    "overlay": (bool, False, "emit analytic overlay curves"),
    "out-dir": (str, "out", "output directory"),
}

COMMAND_OPTIONS = {
    "spectrum": ["omega", "omega0", "gamma", "j", "nmax", "delta", "sector", "out-dir"],
    "peres": ["omega", "omega0", "gamma", "j", "nmax", "delta", "sector",
              "epsilon-perturb", "op", "overlay", "ncmax", "out-dir"],
    "ratio": ["omega", "omega0", "gamma", "j", "nmax", "delta", "window", "stride",
              "out-dir"],
    "spacing": ["omega", "omega0", "gamma", "j", "nmax", "delta", "sector", "energy",
                "window", "nu", "bins", "smax", "out-dir"],
    "poincare": ["omega", "omega0", "gamma", "j", "nmax", "energy", "tmax", "tol",
                 "seed", "ntraj", "out-dir"],
    "integrable-check": ["omega", "omega0", "gamma", "j", "nmax", "delta", "out-dir"],
}

COMMAND_REQUIRED = {
    "spectrum": ["omega0", "gamma", "j", "nmax"],
    "peres": ["omega0", "gamma", "j", "nmax", "op"],
    "ratio": ["omega0", "gamma", "j", "nmax"],
    "spacing": ["omega0", "gamma", "j", "nmax", "energy"],
    "poincare": ["omega0", "gamma", "energy"],
    "integrable-check": ["omega0", "gamma", "j", "nmax"],
}

# the classical limit is intensive in j and needs no Fock truncation
COMMAND_FALLBACKS = {"poincare": {"j": 0.5, "nmax": 2}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpdicke",
        description="Two-photon Dicke model: spectra, lattices, statistics, sections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, names in COMMAND_OPTIONS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", type=str, default=None, help="key = value options file")
        for name in names:
            parse, _, help_text = OPTION_SPEC[name]
            flag = "--" + name
            if parse is bool:
                p.add_argument(flag, dest=name, action="store_const", const=True,
                               default=None, help=help_text)
            elif name == "op":
                p.add_argument(flag, dest=name, action="append", default=None,
                               help=help_text)
            else:
                p.add_argument(flag, dest=name, type=str, default=None, help=help_text)
    return parser


def _parse_value(name: str, raw, parse):
    if parse is bool:
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"option '{name}': cannot parse {raw!r} as a flag")
    try:
        return parse(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"option '{name}': cannot parse {raw!r}: {exc}") from exc


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment; keys mirror flag names."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flags (flags win); validate keys."""
    command = args.command
    names = COMMAND_OPTIONS[command]
    file_values = read_config_file(args.config) if args.config else {}
    unknown = set(file_values) - set(names)
    if unknown:
        raise ConfigError(
            f"unknown config key(s) for '{command}': {', '.join(sorted(unknown))}"
        )

    opts = {}
    for name in names:
        parse, default, _ = OPTION_SPEC[name]
        flag_value = getattr(args, name)
        if flag_value is not None:
            raw = flag_value
        elif name in file_values:
            raw = file_values[name]
        else:
            fallback = COMMAND_FALLBACKS.get(command, {}).get(name)
            if default is None and fallback is None:
                if name in COMMAND_REQUIRED[command]:
                    raise ConfigError(f"missing required option '{name}'")
                opts[name.replace("-", "_")] = None
                continue
            raw = default if fallback is None else fallback
        if name == "op":
            items = raw if isinstance(raw, list) else [raw]
            ops = [o.strip() for chunk in items for o in str(chunk).split(",") if o.strip()]
            if not ops:
                raise ConfigError("option 'op': at least one observable is required")
            bad = [o for o in ops if o not in OP_CHOICES]
            if bad:
                raise ConfigError(f"option 'op': unknown observable(s) {bad}; "
                                  f"choose from {OP_CHOICES}")
            opts["op"] = ops
        else:
            opts[name.replace("-", "_")] = _parse_value(name, raw, parse)
    if "sector" in opts and opts["sector"] is not None:
        if opts["sector"] not in SECTOR_CHOICES:
            raise ConfigError(f"option 'sector': choose from {SECTOR_CHOICES}")
    return opts


def make_params(opts: dict) -> ModelParams:
    j = opts["j"]
    two_j = int(round(2.0 * j))
    if abs(2.0 * j - two_j) > 1e-9:
        raise ConfigError(f"option 'j': {j} is not integer or half-integer")
    return ModelParams(
        omega=opts["omega"], omega0=opts["omega0"], gamma=opts["gamma"],
        two_j=two_j, n_max=opts["nmax"],
    )


def _knobs(opts: dict, skip=("omega", "omega0", "gamma", "j", "nmax", "out_dir")) -> dict:
    return {k: v for k, v in opts.items() if k not in skip}


def _sector_list(choice: str):
    if choice in ("all", None):
        return list(ParitySector)
    if choice == "full":
        return [None]
    return [ParitySector.from_name(choice)]


def _sector_label(sector) -> str:
    return "full" if sector is None else sector.label


def cmd_spectrum(opts: dict) -> Path:
    params = make_params(opts)
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("spectrum", params_dict(params), _knobs(opts))
    rows = []
    counts = {}
    for sector in _sector_list(opts["sector"]):
        result = eigensolve.solve_sector(params, sector, delta=opts["delta"])
        counts[_sector_label(sector)] = result.converged_count
        j = params.j
        for k, energy in enumerate(result.converged_energies()):
            rows.append((_sector_label(sector), k, energy, energy / j))
    path = out_dir / "spectrum.csv"
    manifest.add_output(path, write_csv(path, ["sector", "k", "energy", "epsilon"], rows))
    manifest.results["converged_counts"] = counts
    return manifest.write(out_dir / "manifest.json")


def cmd_peres(opts: dict) -> Path:
    params = make_params(opts)
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("peres", params_dict(params), _knobs(opts))
    eps_perturb = opts["epsilon_perturb"]
    if eps_perturb != 0.0:
        op_matrix = perturbed_hamiltonian(params, eps_perturb)
        result = eigensolve.diagonalize(op_matrix)
        result.converged_count = eigensolve.converged_count(result, opts["delta"])
        sector = None
    else:
        sector = None if opts["sector"] == "full" else ParitySector.from_name(
            opts["sector"] if opts["sector"] != "all" else "plus1"
        )
        result = eigensolve.solve_sector(params, sector, delta=opts["delta"])
    dominance = peres.dominance_classify(result)
    header = ["k", "epsilon", "value", "value_over_j", "value_over_j2", "dominance"]
    for op_name in opts["op"]:
        if op_name == "cdagc":
            points = peres.cdagc_lattice(result)
        else:
            points = peres.peres_lattice(result, observable(params, op_name, sector))
        rows = [
            (pt.k, pt.epsilon, pt.value, pt.value_over_j, pt.value_over_j2, dominance[pt.k])
            for pt in points
        ]
        path = out_dir / f"peres_{op_name}.csv"
        manifest.add_output(path, write_csv(path, header, rows))
        if opts["overlay"] and op_name in ("cdagc", "jx", "jx2"):
            variable = "mx2" if op_name == "jx2" else "mx"
            curves = integrable.overlay_curves(
                params, list(range(opts["ncmax"] + 1)), variable=variable
            )
            overlay_rows = [
                (cid, n_c, val, eps)
                for cid, n_c, values, epsilons in curves
                for val, eps in zip(values, epsilons)
            ]
            opath = out_dir / f"overlay_{op_name}.csv"
            manifest.add_output(
                opath,
                write_csv(opath, ["curve_id", "n_c", "m_x_or_mx2", "epsilon"], overlay_rows),
            )
    manifest.results["converged_count"] = result.converged_count
    return manifest.write(out_dir / "manifest.json")


def cmd_ratio(opts: dict) -> Path:
    params = make_params(opts)
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("ratio", params_dict(params), _knobs(opts))
    curves = []
    rows = []
    for sector in ParitySector:
        result = eigensolve.solve_sector(params, sector, delta=opts["delta"])
        curve = spectral_stats.windowed_mean_ratio(
            result.converged_energies(), params,
            window_levels=opts["window"], stride=opts["stride"],
        )
        curves.append(curve)
        rows.extend(
            (pt.epsilon_center, pt.r_mean, pt.n_levels, sector.label) for pt in curve
        )
    averaged = spectral_stats.average_ratio_curves(curves)
    rows.extend((pt.epsilon_center, pt.r_mean, pt.n_levels, "avg") for pt in averaged)
    path = out_dir / "ratio.csv"
    manifest.add_output(
        path, write_csv(path, ["epsilon_center", "r_mean", "n_levels", "sector_or_avg"], rows)
    )
    return manifest.write(out_dir / "manifest.json")


def cmd_spacing(opts: dict) -> Path:
    params = make_params(opts)
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("spacing", params_dict(params), _knobs(opts))
    sector = ParitySector.from_name(opts["sector"] if opts["sector"] != "all" else "plus1")
    result = eigensolve.solve_sector(params, sector, delta=opts["delta"])
    energies = spectral_stats.merge_degenerate(result.converged_energies())
    window = opts["window"]
    if energies.size < window:
        raise spectral_stats.TooFewLevels(
            f"sector has {energies.size} converged levels, window needs {window}"
        )
    center_idx = int(np.argmin(np.abs(energies / params.j - opts["energy"])))
    start = min(max(center_idx - window // 2, 0), energies.size - window)
    sample = spectral_stats.unfold(
        energies[start : start + window], nu=opts["nu"], scale=params.j
    )
    hist = spectral_stats.spacing_histogram(sample, bins=opts["bins"], s_max=opts["smax"])
    rows = zip(hist.bin_left, hist.bin_right, hist.density,
               hist.goe_pdf_mid, hist.poisson_pdf_mid)
    path = out_dir / "spacing_hist.csv"
    manifest.add_output(
        path,
        write_csv(path, ["bin_left", "bin_right", "density", "goe_pdf_mid",
                         "poisson_pdf_mid"], rows),
    )
    a2_goe = spectral_stats.anderson_darling(sample.s, "goe")
    a2_poisson = spectral_stats.anderson_darling(sample.s, "poisson")
    manifest.results.update(
        {
            "A2_goe": a2_goe,
            "A2_poisson": a2_poisson,
            "window_center_epsilon": sample.window_center,
            "window_width_epsilon": sample.window_width,
            "n_levels": int(window),
        }
    )
    print(f"window <eps>={sample.window_center:.4f} sigma={sample.window_width:.4f}  "
          f"A2(GOE)={a2_goe:.3f}  A2(Poisson)={a2_poisson:.3f}")
    return manifest.write(out_dir / "manifest.json")


def cmd_poincare(opts: dict) -> Path:
    params = make_params(opts)
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("poincare", params_dict(params), _knobs(opts))
    manifest.knobs["surface"] = "p=0, q>0"
    epsilon = opts["energy"]
    sampling = classical.ShellSampling("random", opts["ntraj"])
    sections = classical.section_for_shell(
        epsilon, params, sampling, t_max=opts["tmax"], tol=opts["tol"], seed=opts["seed"]
    )
    rows = [
        (traj_id, idx, t, Q, P)
        for traj_id, section in enumerate(sections)
        for idx, (t, Q, P) in enumerate(section)
    ]
    path = out_dir / "section.csv"
    manifest.add_output(
        path, write_csv(path, ["trajectory_id", "crossing_index", "t", "Q", "P"], rows)
    )
    boundary = classical.accessible_boundary(epsilon, params)
    bpath = out_dir / "boundary_energy.csv"
    manifest.add_output(
        bpath,
        write_csv(bpath, ["theta_index", "Q", "P"],
                  ((i, Q, P) for i, (Q, P) in enumerate(boundary))),
    )
    disk = classical.bloch_boundary()
    dpath = out_dir / "boundary_disk.csv"
    manifest.add_output(
        dpath,
        write_csv(dpath, ["theta_index", "Q", "P"],
                  ((i, Q, P) for i, (Q, P) in enumerate(disk))),
    )
    manifest.results["n_crossings"] = [len(s) for s in sections]
    return manifest.write(out_dir / "manifest.json")


def cmd_integrable_check(opts: dict) -> Path:
    params = make_params(opts)
    params.require_normal_phase()
    out_dir = Path(opts["out_dir"])
    manifest = RunManifest("integrable-check", params_dict(params), _knobs(opts))
    numeric = eigensolve.converged_union(
        [eigensolve.solve_sector(params, sector, delta=opts["delta"])
         for sector in ParitySector]
    )
    if numeric.size == 0:
        raise NumericalFailure("no converged eigenvalues; increase n_max or delta")
    analytic = integrable.analytic_energies_sorted(
        params, float(numeric[-1]) + 2.0 * params.omega
    )
    n = min(numeric.size, analytic.size)
    numeric, analytic = numeric[:n], analytic[:n]
    rel_dev = np.abs(numeric - analytic) / np.maximum(1.0, np.abs(analytic))
    rows = zip(range(n), numeric, analytic, rel_dev)
    path = out_dir / "deviations.csv"
    manifest.add_output(
        path, write_csv(path, ["k", "energy_num", "energy_analytic", "rel_dev"], rows)
    )
    manifest.results.update(
        {"max_rel_dev": float(np.max(rel_dev)), "n_compared": int(n)}
    )
    print(f"compared {n} levels; max relative deviation {np.max(rel_dev):.3e}")
    return manifest.write(out_dir / "manifest.json")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "peres": cmd_peres,
    "ratio": cmd_ratio,
    "spacing": cmd_spacing,
    "poincare": cmd_poincare,
    "integrable-check": cmd_integrable_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest_path = COMMANDS[args.command](resolve_options(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except TpDickeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
