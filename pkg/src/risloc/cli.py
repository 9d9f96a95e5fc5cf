"""Command-line front end: plain-text configs, overrides, and subcommands.

Config files are ``key = value`` lines (``#`` comments). Keys mirror the
library's configuration fields; list-valued keys take comma-separated
entries. Every subcommand accepts ``--set key=value`` overrides.

Exit codes: 0 success, 2 bad configuration, 3 I/O failure, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelModel, channel, exact_channel
from .dictionary import coarse_estimate, get_dictionary, save_dictionary
from .experiments import ExperimentConfig, export_csv, run_nmse, sample_ue
from .geometry import SystemConfig, UePosition
from .refinement import RefinementSettings, refine
from .ris_phase import optimal_phase, verify_optimality
from .signaling import equalize, make_reference_sequence, simulate_received

EXIT_BAD_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

# Recognized config keys. "lambda" is the canonical name for the
# wavelength; the Python field is named `wavelength`.
SYSTEM_KEYS = (
    "lambda", "n_y", "n_z", "d_y", "d_z", "k_ue", "d_u", "ris_origin",
    "p_t", "l_slots",
)
EXPERIMENT_KEYS = (
    "snr_db_list", "n_list", "k_list", "epsilon_list", "trials",
    "master_seed", "channel_model", "nmse_normalization",
)
REFINE_KEYS = ("gamma", "tau", "max_iter")
MISC_KEYS = ("workers", "snr_db", "epsilon", "ue_r", "ue_theta", "cache_dir")
ALL_KEYS = SYSTEM_KEYS + EXPERIMENT_KEYS + REFINE_KEYS + MISC_KEYS


class ConfigError(Exception):
    pass


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Raw key -> value strings from a config file body."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        out[key] = value
    return out


def load_config(path, overrides: list[str]) -> dict[str, str]:
    cfg_path = Path(path)
    if not cfg_path.is_file():
        raise ConfigError(f"config file not found: {cfg_path}")
    raw = parse_config_text(cfg_path.read_text(), str(cfg_path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in ALL_KEYS:
            raise ConfigError(f"unknown config key in override: {key!r}")
        raw[key] = value
    return raw


def _parse_float(raw: dict, key: str, default: float) -> float:
    try:
        return float(raw.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc


def _parse_int(raw: dict, key: str, default) -> int:
    try:
        return int(raw.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc


def _parse_list(value: str, cast):
    return tuple(cast(part.strip()) for part in value.split(",") if part.strip())


def system_config(raw: dict[str, str]) -> SystemConfig:
    try:
        origin = (0.0, 0.0, 0.0)
        if "ris_origin" in raw:
            origin = _parse_list(raw["ris_origin"], float)
        return SystemConfig(
            wavelength=_parse_float(raw, "lambda", 0.1),
            n_y=_parse_int(raw, "n_y", 8),
            n_z=_parse_int(raw, "n_z", 8),
            d_y=_parse_float(raw, "d_y", 0.05),
            d_z=_parse_float(raw, "d_z", 0.05),
            k_ue=_parse_int(raw, "k_ue", 8),
            d_u=_parse_float(raw, "d_u", 0.05),
            ris_origin=origin,
            p_t=_parse_float(raw, "p_t", 1.0),
            l_slots=_parse_int(raw, "l_slots", 0),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def refinement_settings(raw: dict[str, str]) -> RefinementSettings:
    try:
        return RefinementSettings(
            gamma=_parse_float(raw, "gamma", 0.5),
            tau=_parse_float(raw, "tau", 1e-4),
            max_iter=_parse_int(raw, "max_iter", 200),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def experiment_config(raw: dict[str, str], seed_override=None) -> ExperimentConfig:
    base = system_config(raw)
    try:
        model = ChannelModel(raw.get("channel_model", "fresnel"))
    except ValueError as exc:
        raise ConfigError(f"config key 'channel_model': {exc}") from exc
    seed = seed_override if seed_override is not None else _parse_int(raw, "master_seed", 0)
    try:
        return ExperimentConfig(
            base=base,
            snr_db_list=_parse_list(raw.get("snr_db_list", "10"), float),
            n_list=_parse_list(raw.get("n_list", ""), int),
            k_list=_parse_list(raw.get("k_list", ""), int),
            epsilon_list=_parse_list(raw.get("epsilon_list", "0.55"), float),
            trials=_parse_int(raw, "trials", 500),
            master_seed=seed,
            channel_model=model,
            settings=refinement_settings(raw),
            nmse_normalization=raw.get("nmse_normalization", "moment"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_verify_phase(args) -> int:
    raw = load_config(args.config, args.set)
    cfg = system_config(raw)
    seed = args.seed if args.seed is not None else _parse_int(raw, "master_seed", 0)
    trials = _parse_int(raw, "trials", 10_000)
    rng = np.random.default_rng(seed)
    pos = sample_ue(cfg, rng)
    a = exact_channel(cfg, pos)
    report = verify_optimality(a, trials, seed)
    rel_margin = report.margin / report.optimum if report.optimum else 0.0
    print(
        f"verify-phase: N={cfg.n} K={cfg.k_ue} trials={trials} seed={seed} "
        f"optimum={report.optimum:.6e} max_competitor={report.max_competitor:.6e} "
        f"margin={report.margin:.6e} (relative {rel_margin:.3e})"
    )
    if args.output:
        header = "n,k,trials,seed,optimum,max_competitor,margin\n"
        row = (
            f"{cfg.n},{cfg.k_ue},{trials},{seed},{report.optimum!r},"
            f"{report.max_competitor!r},{report.margin!r}\n"
        )
        Path(args.output).write_text(header + row)
    if report.margin < -1e-9 * report.optimum:
        print("verify-phase: FAILED, a random competitor beat the co-phased setting")
        return EXIT_NUMERIC
    return 0


def _cmd_build_dict(args) -> int:
    raw = load_config(args.config, args.set)
    cfg = system_config(raw)
    epsilon = _parse_float(raw, "epsilon", float(raw.get("epsilon_list", "0.55").split(",")[0]))
    model = ChannelModel(raw.get("channel_model", "fresnel"))
    dictionary = get_dictionary(cfg, epsilon, model, raw.get("cache_dir") or None)
    print(
        f"build-dict: N={cfg.n} K={cfg.k_ue} epsilon={epsilon} model={model.value} "
        f"M={dictionary.m} columns of length {cfg.k_ue ** 2}"
    )
    if args.output:
        save_dictionary(dictionary, args.output, cfg, model)
        print(f"build-dict: wrote cache to {args.output}")
    return 0


def _cmd_localize(args) -> int:
    raw = load_config(args.config, args.set)
    cfg = system_config(raw)
    settings = refinement_settings(raw)
    model = ChannelModel(raw.get("channel_model", "fresnel"))
    seed = args.seed if args.seed is not None else _parse_int(raw, "master_seed", 0)
    snr_db = _parse_float(raw, "snr_db", 10.0)
    epsilon = _parse_float(raw, "epsilon", float(raw.get("epsilon_list", "0.55").split(",")[0]))
    rng = np.random.default_rng(seed)
    if "ue_r" in raw or "ue_theta" in raw:
        pos = UePosition(_parse_float(raw, "ue_r", 2.0), _parse_float(raw, "ue_theta", 0.0))
    else:
        pos = sample_ue(cfg, rng)
    a = channel(cfg, pos, model)
    s = make_reference_sequence(cfg)
    sigma2 = cfg.p_t * 10.0 ** (-snr_db / 10.0)
    y = simulate_received(a, optimal_phase(cfg.n), s, sigma2, rng)
    obs = equalize(y, s, sigma2)
    dictionary = get_dictionary(cfg, epsilon, model, raw.get("cache_dir") or None)
    ce = coarse_estimate(obs, dictionary)
    res = refine(obs, cfg, (ce.r, ce.theta), settings)
    trace = res.objective_trace
    print(f"localize: true position      r={pos.r:.6f} m  theta={pos.theta:+.6f} rad")
    print(f"localize: coarse grid point  r={ce.r:.6f} m  theta={ce.theta:+.6f} rad (index {ce.index}, score {ce.score:.4e})")
    print(f"localize: refined estimate   r={res.r_hat:.6f} m  theta={res.theta_hat:+.6f} rad")
    print(
        f"localize: iterations={res.iterations} converged={res.converged} "
        f"objective initial={trace[0]:.6e} final={trace[-1]:.6e} min={trace.min():.6e}"
    )
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write("iteration,objective\n")
            for i, value in enumerate(trace):
                fh.write(f"{i},{value!r}\n")
        print(f"localize: wrote objective trace to {args.output}")
    return 0


def _cmd_sweep(args) -> int:
    raw = load_config(args.config, args.set)
    exp = experiment_config(raw, seed_override=args.seed)
    workers = _parse_int(raw, "workers", 1)
    cache_dir = raw.get("cache_dir") or None
    rows = run_nmse(exp, workers=workers, cache_dir=cache_dir)
    for row in rows:
        print(
            f"snr={row.snr_db:g} dB N={row.n} K={row.k} eps={row.epsilon:g}: "
            f"nmse_r={row.nmse_r:.4e} nmse_theta={row.nmse_theta:.4e} "
            f"iters={row.mean_iters:.2f} conv={row.conv_rate:.3f}"
        )
    if args.output:
        export_csv(rows, args.output)
        print(f"wrote {len(rows)} rows to {args.output}")
    return 0


_KEY_HELP = (
    "config keys: "
    + ", ".join(SYSTEM_KEYS)
    + " | "
    + ", ".join(EXPERIMENT_KEYS)
    + " | "
    + ", ".join(REFINE_KEYS)
    + " | "
    + ", ".join(MISC_KEYS)
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risloc",
        description="RIS-assisted anchor-free near-field localization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, epilog=_KEY_HELP)
        p.add_argument("config", help="path to a key = value config file")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )
        p.add_argument("--output", "-o", default=None, help="output file path")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.set_defaults(func=func)
        return p

    add("verify-phase", _cmd_verify_phase,
        "empirically verify the co-phased surface is SNR-optimal")
    add("build-dict", _cmd_build_dict, "build (and optionally cache) a dictionary")
    add("localize", _cmd_localize, "run the two-stage estimator on one synthetic UE")
    add("nmse-sweep", _cmd_sweep, "Monte Carlo NMSE sweep, writes the CSV schema")
    add("convergence-sweep", _cmd_sweep,
        "NMSE and iteration counts over grid resolutions (same CSV schema)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
