"""Command line front end: build modes, run identity suites, dump fields.

Configuration is a JSON document loaded with --config and merged with
``--key=value`` overrides; dotted keys address nested entries, so
``--grid.n_phi=64`` replaces a single number inside the grid block.
Override values are parsed as JSON with a plain-string fallback.

Exit codes: 0 success, 1 failed verification rows, 2 configuration error
(the diagnostic names the offending key), 3 numerical failure (aliasing,
violated tolerance).

Two runs with the same merged config produce byte-identical reports: keys
are sorted, floats print through repr, and nothing records a timestamp.
Every output file gains a ``<path>.meta.json`` sidecar holding the sha256
of the canonical config and the library version.

Recognized tolerances (config block "tolerances"):

    mode_norm             built mode must satisfy | ||v|| - 1 | < tol
                          (default 1e-10)
    transversality        require transverse_residual(v) < tol (off by
                          default; paraxial modes carry real residual)
    j3_eigen_residual     require report.eigen_residuals["J3"] < tol
    com_convergence_shift synth only: relative shift of the real-space
                          constants of motion under box growth must stay
                          below tol
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .grid import GridSpec, build_grid
from .modes import ModeSpec, build_mode
from .operators import observable_report
from .synthesis import (
    SpaceTimeLattice,
    com_convergence_shift,
    export_fields,
    export_slice,
    synthesize_fields,
)
from .verify import run_suite
from .vsh import analyze
from .wavefunction import norm, transverse_residual

TOP_LEVEL_KEYS = {"grid", "mode", "lattice", "outputs", "tolerances", "seed", "suite"}
GRID_KEYS = {"n_k", "k_min", "k_max", "n_theta", "n_phi"}
LATTICE_KEYS = {"origin", "extents", "n_x", "n_y", "n_z", "times"}
OUTPUT_KEYS = {"kind", "path", "l_max"}
OUTPUT_KINDS = {"report", "wavefunction", "expansion", "fields"}
TOLERANCE_KEYS = {"mode_norm", "transversality", "j3_eigen_residual",
                  "com_convergence_shift"}
DEFAULT_TOLERANCES = {"mode_norm": 1e-10}
DEFAULT_EXPANSION_L_MAX = 16


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


class NumericalError(Exception):
    """Numerical failure (aliasing, violated tolerance); exit code 3."""


# ---------------------------------------------------------------------------
# config assembly
# ---------------------------------------------------------------------------


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path!r}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path!r} is not valid JSON: {err}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def apply_overrides(cfg: dict, pairs: list[str]) -> dict:
    """Merge ``--a.b.c=value`` tokens into the config dict."""
    for token in pairs:
        if not token.startswith("--") or "=" not in token:
            raise ConfigError(
                f"cannot parse argument {token!r}; overrides look like --key=value"
            )
        dotted, raw = token[2:].split("=", 1)
        if not dotted:
            raise ConfigError(f"empty key in override {token!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = dotted.split(".")
        for part in parts[:-1]:
            nxt = node.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigError(
                    f"override {dotted!r} descends through non-object key {part!r}"
                )
            node = nxt
        node[parts[-1]] = value
    return cfg


def canonical_json(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


def _check_keys(d: dict, allowed: set, where: str) -> None:
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown {where} key {key!r}")


def _require(cfg: dict, key: str) -> dict:
    if key not in cfg:
        raise ConfigError(f"config missing key {key!r}")
    section = cfg[key]
    if not isinstance(section, dict):
        raise ConfigError(f"config key {key!r} must be an object")
    return section


def parse_grid(cfg: dict) -> GridSpec:
    section = _require(cfg, "grid")
    _check_keys(section, GRID_KEYS, "grid")
    try:
        return GridSpec.from_dict(section)
    except (KeyError, ValueError) as err:
        raise ConfigError(f"grid: {_msg(err)}") from None


def parse_mode(cfg: dict) -> ModeSpec:
    section = _require(cfg, "mode")
    try:
        return ModeSpec.from_dict(section)
    except (KeyError, ValueError, TypeError) as err:
        raise ConfigError(f"mode: {_msg(err)}") from None


def parse_lattice(cfg: dict) -> SpaceTimeLattice:
    section = _require(cfg, "lattice")
    _check_keys(section, LATTICE_KEYS, "lattice")
    try:
        return SpaceTimeLattice.from_dict(section)
    except (KeyError, ValueError, TypeError) as err:
        raise ConfigError(f"lattice: {_msg(err)}") from None


def parse_outputs(cfg: dict, valid_kinds: set, command: str) -> list:
    entries = cfg.get("outputs", [])
    if not isinstance(entries, list):
        raise ConfigError("config key 'outputs' must be a list")
    outputs = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigError("outputs entries must be objects with 'kind' and 'path'")
        _check_keys(entry, OUTPUT_KEYS, "output")
        for needed in ("kind", "path"):
            if needed not in entry:
                raise ConfigError(f"output entry missing key {needed!r}")
        kind, path = entry["kind"], entry["path"]
        if kind not in OUTPUT_KINDS:
            raise ConfigError(f"unknown output kind {kind!r}")
        if kind not in valid_kinds:
            raise ConfigError(
                f"output kind {kind!r} is not supported by the {command} command"
            )
        if not isinstance(path, str) or not path:
            raise ConfigError(f"output path for kind {kind!r} must be a string")
        outputs.append(dict(entry))
    return outputs


def parse_tolerances(cfg: dict) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    section = cfg.get("tolerances", {})
    if not isinstance(section, dict):
        raise ConfigError("config key 'tolerances' must be an object")
    _check_keys(section, TOLERANCE_KEYS, "tolerance")
    for key, value in section.items():
        try:
            tol[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"tolerance {key!r} must be a number") from None
    return tol


def parse_seed(cfg: dict) -> int:
    seed = cfg.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("config key 'seed' must be an integer")
    return seed


def _msg(err: Exception) -> str:
    # KeyError repr-quotes its argument; unwrap to keep diagnostics readable
    if isinstance(err, KeyError) and err.args:
        return str(err.args[0])
    return str(err)


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as err:
        raise ConfigError(f"cannot write output {path!r}: {err}") from None


def _write_meta(path: str, digest: str) -> None:
    meta = {"config_sha256": digest, "version": __version__}
    _write_text(path + ".meta.json", json.dumps(meta, sort_keys=True, indent=2) + "\n")


def report_json(report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def write_wavefunction_csv(v, path: str) -> None:
    grid = v.grid
    lines = ["k,theta,phi,re_v1,im_v1,re_v2,im_v2,re_v3,im_v3"]
    for i in range(grid.n_nodes):
        cells = [grid.k[i], grid.theta[i], grid.phi[i]]
        for c in range(3):
            cells.append(v.values[i, c].real)
            cells.append(v.values[i, c].imag)
        lines.append(",".join("%.17g" % cell for cell in cells))
    _write_text(path, "\n".join(lines) + "\n")


def _expansion_l_max(grid_spec: GridSpec, entry: dict) -> int:
    """Band for an expansion dump; validated against the grid resolution."""
    raw = entry.get("l_max")
    if raw is None:
        # default: the largest band the grid resolves, capped
        fits = min(grid_spec.n_theta - 1, (grid_spec.n_phi - 1) // 2)
        return max(1, min(DEFAULT_EXPANSION_L_MAX, fits))
    l_max = int(raw)
    if (l_max < 1 or grid_spec.n_theta < l_max + 1
            or grid_spec.n_phi < 2 * l_max + 1):
        raise ConfigError(
            f"expansion l_max {l_max} needs n_theta >= {l_max + 1} "
            f"and n_phi >= {2 * l_max + 1}"
        )
    return l_max


def write_expansion_json(v, path: str, l_max: int) -> None:
    e = analyze(v, l_max)
    payload = {
        "l_max": e.l_max,
        "m_min": e.m_min,
        "m_max": e.m_max,
        "rows": e.to_rows(),
    }
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _build_checked_mode(grid_spec: GridSpec, mode_spec: ModeSpec, tolerances: dict):
    grid = build_grid(grid_spec)
    try:
        v = build_mode(mode_spec, grid)
    except (ValueError, FloatingPointError) as err:
        raise NumericalError(f"mode construction failed: {err}") from None
    norm_dev = abs(norm(v) - 1.0)
    if norm_dev > tolerances["mode_norm"]:
        raise NumericalError(
            f"mode norm off by {norm_dev:.3e} (tolerance mode_norm "
            f"{tolerances['mode_norm']:.3e})"
        )
    if "transversality" in tolerances:
        res = transverse_residual(v)
        if res > tolerances["transversality"]:
            raise NumericalError(
                f"transversality residual {res:.3e} exceeds "
                f"{tolerances['transversality']:.3e}"
            )
    return v


def cmd_mode(cfg: dict) -> int:
    _check_keys(cfg, TOP_LEVEL_KEYS, "config")
    tolerances = parse_tolerances(cfg)
    parse_seed(cfg)
    grid_spec = parse_grid(cfg)
    mode_spec = parse_mode(cfg)
    outputs = parse_outputs(cfg, {"report", "wavefunction", "expansion"}, "mode")
    for entry in outputs:
        if entry["kind"] == "expansion":
            entry["l_max"] = _expansion_l_max(grid_spec, entry)
    v = _build_checked_mode(grid_spec, mode_spec, tolerances)
    report = observable_report(v)
    if "j3_eigen_residual" in tolerances:
        res = report.eigen_residuals["J3"]
        if res > tolerances["j3_eigen_residual"]:
            raise NumericalError(
                f"J3 eigen-residual {res:.3e} exceeds "
                f"{tolerances['j3_eigen_residual']:.3e}"
            )
    digest = config_hash(cfg)
    if not outputs:
        sys.stdout.write(report_json(report))
        return 0
    for entry in outputs:
        kind, path = entry["kind"], entry["path"]
        if kind == "report":
            _write_text(path, report_json(report))
        elif kind == "wavefunction":
            write_wavefunction_csv(v, path)
        else:
            write_expansion_json(v, path, entry["l_max"])
        _write_meta(path, digest)
    return 0


def cmd_verify(cfg: dict) -> int:
    _check_keys(cfg, TOP_LEVEL_KEYS, "config")
    if "suite" not in cfg:
        raise ConfigError("config missing key 'suite'")
    suite = cfg["suite"]
    seed = parse_seed(cfg)
    outputs = parse_outputs(cfg, {"report"}, "verify")
    try:
        rows = run_suite(suite, seed=seed)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    text = json.dumps(rows, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    digest = config_hash(cfg)
    for entry in outputs:
        _write_text(entry["path"], text)
        _write_meta(entry["path"], digest)
    return 0 if all(row["pass"] for row in rows) else 1


def cmd_synth(cfg: dict) -> int:
    _check_keys(cfg, TOP_LEVEL_KEYS, "config")
    tolerances = parse_tolerances(cfg)
    parse_seed(cfg)
    grid_spec = parse_grid(cfg)
    mode_spec = parse_mode(cfg)
    lattice = parse_lattice(cfg)
    outputs = parse_outputs(cfg, {"fields"}, "synth")
    if not outputs:
        raise ConfigError("synth requires a non-empty 'outputs' list")
    v = _build_checked_mode(grid_spec, mode_spec, tolerances)
    # field dumps are taken at the first sample time of the lattice
    time = lattice.times[0] if lattice.times else 0.0
    try:
        snapshot = synthesize_fields(v, lattice, time=time)
    except ValueError as err:
        raise NumericalError(str(err)) from None
    if "com_convergence_shift" in tolerances:
        shift = com_convergence_shift(v, lattice, time=time)
        if shift > tolerances["com_convergence_shift"]:
            raise NumericalError(
                f"constants of motion shift by {shift:.3e} under box growth "
                f"(tolerance {tolerances['com_convergence_shift']:.3e}); "
                "the lattice does not contain the packet"
            )
    digest = config_hash(cfg)
    for entry in outputs:
        path = entry["path"]
        try:
            export_fields(snapshot, path)
            export_slice(snapshot, path + ".slice.csv", field="E")
        except OSError as err:
            raise ConfigError(f"cannot write output {path!r}: {err}") from None
        _write_meta(path, digest)
        _write_meta(path + ".slice.csv", digest)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-angmom",
        description="One-photon angular momentum toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_mode = sub.add_parser("mode", help="build a mode and report observables")
    p_mode.add_argument("--config", default=None, help="JSON run configuration")

    p_verify = sub.add_parser("verify", help="run an identity suite")
    p_verify.add_argument("--config", default=None, help="JSON run configuration")
    p_verify.add_argument("--suite", default=None,
                          help="algebraic | spectral | vsh | paraxial | com-crosscheck")
    p_verify.add_argument("--seed", type=int, default=None,
                          help="seed for randomized suite states")

    p_synth = sub.add_parser("synth", help="synthesize real-space fields")
    p_synth.add_argument("--config", default=None, help="JSON run configuration")
    return parser


_COMMANDS = {"mode": cmd_mode, "verify": cmd_verify, "synth": cmd_synth}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        cfg = load_config(args.config)
        if getattr(args, "suite", None) is not None:
            cfg["suite"] = args.suite
        if getattr(args, "seed", None) is not None:
            cfg["seed"] = args.seed
        apply_overrides(cfg, extra)
        return _COMMANDS[args.command](cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
