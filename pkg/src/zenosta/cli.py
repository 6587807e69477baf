"""Command-line interface.

Subcommands: pulses | evolve | sweep-tf | sweep-eps | sweep-delta |
sweep-decoherence | verify.  Command-line flags override config-file
values, which override built-in defaults.  The config file is flat
UTF-8 ``key = value`` text using the same keys as the flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    GridAxis,
    RunConfig,
    cmd_evolve,
    cmd_pulses,
    cmd_sweep_decoherence,
    cmd_sweep_delta,
    cmd_sweep_eps,
    cmd_sweep_tf,
)

_SCALAR_KEYS = {
    "tf": float,
    "eps": float,
    "v_over_g": float,
    "kappa": float,
    "gamma": float,
    "steps": int,
    "workers": int,
    "out": str,
}


def parse_grid(text: str, name: str = "grid") -> GridAxis:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:count, got {text!r}")
    return GridAxis(name, float(parts[0]), float(parts[1]), int(parts[2]))


def load_config_file(path: str | Path) -> dict:
    """Flat key = value text; '#' starts a comment, blank lines are skipped."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "grid":
            values["grid"] = [parse_grid(g.strip()) for g in value.split(",")]
        elif key in _SCALAR_KEYS:
            values[key] = _SCALAR_KEYS[key](value)
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return values


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tf", type=float, default=None, help="operation time in units of 1/g")
    p.add_argument("--eps", type=float, default=None, help="invariant angle parameter")
    p.add_argument("--v-over-g", dest="v_over_g", type=float, default=None,
                   help="cavity-fiber coupling over atom-cavity coupling")
    p.add_argument("--kappa", type=float, default=None, help="photon leakage rate in units of g")
    p.add_argument("--gamma", type=float, default=None, help="spontaneous emission rate in units of g")
    p.add_argument("--steps", type=int, default=None, help="RK4 steps per trajectory")
    p.add_argument("--grid", action="append", default=None, metavar="START:STOP:COUNT",
                   help="sweep grid; repeat for the second axis of 2-D sweeps")
    p.add_argument("--workers", type=int, default=None, help="parallel sweep workers")
    p.add_argument("--out", type=str, default=None, help="output CSV path")
    p.add_argument("--config", type=str, default=None, help="flat key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenosta",
        description="Shortcut-to-adiabaticity entanglement protocol simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("pulses", "export the designed drive pair"),
        ("evolve", "full-model populations and fidelity along the protocol"),
        ("sweep-tf", "fidelity versus operation time"),
        ("sweep-eps", "fidelity versus invariant angle"),
        ("sweep-delta", "fidelity versus relative timing/angle deviations (2-D)"),
        ("sweep-decoherence", "fidelity versus photon-loss and emission rates (2-D)"),
        ("verify", "run the built-in consistency checks"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
    return parser


def resolve_config(args: argparse.Namespace) -> tuple[RunConfig, list[GridAxis] | None, str | None]:
    file_values: dict = {}
    if args.config:
        file_values = load_config_file(args.config)

    merged: dict = {}
    for key in ("tf", "eps", "v_over_g", "kappa", "gamma", "steps", "workers"):
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in file_values:
            merged[key] = file_values[key]
    cfg = RunConfig(**merged)

    grids: list[GridAxis] | None = None
    if args.grid:
        grids = [parse_grid(g) for g in args.grid]
    elif "grid" in file_values:
        grids = file_values["grid"]

    out = args.out if args.out is not None else file_values.get("out")
    return cfg, grids, out


def _two_axes(grids: list[GridAxis] | None) -> tuple[GridAxis | None, GridAxis | None]:
    if not grids:
        return None, None
    if len(grids) == 1:
        return grids[0], grids[0]
    if len(grids) == 2:
        return grids[0], grids[1]
    raise ValueError("at most two --grid axes are supported")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, grids, out = resolve_config(args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    command = args.command
    default_out = command.replace("-", "_") + ".csv"

    try:
        if command == "pulses":
            path = cmd_pulses(cfg, out or default_out)
        elif command == "evolve":
            path = cmd_evolve(cfg, out or default_out)
        elif command == "sweep-tf":
            path = cmd_sweep_tf(cfg, out or default_out, grids[0] if grids else None)
        elif command == "sweep-eps":
            path = cmd_sweep_eps(cfg, out or default_out, grids[0] if grids else None)
        elif command == "sweep-delta":
            g1, g2 = _two_axes(grids)
            path = cmd_sweep_delta(cfg, out or default_out, g1, g2)
        elif command == "sweep-decoherence":
            g1, g2 = _two_axes(grids)
            path = cmd_sweep_decoherence(cfg, out or default_out, g1, g2)
        elif command == "verify":
            from .verify import report, run_all_checks

            rep = report(run_all_checks(cfg))
            print(json.dumps(rep, indent=2))
            return 0 if rep["passed"] else 1
        else:  # pragma: no cover - argparse enforces choices
            raise AssertionError(command)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
