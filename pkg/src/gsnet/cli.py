"""Command-line front end for the request evaluator and experiment sweeps.

Each subcommand maps onto one function from the scenarios module and
writes a single flat table. Config files (TOML or JSON) use kilometers
and milliseconds; everything is converted to SI on load. The same config
and seed always produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .network import EntanglementTopology, NetworkGeometry, Request, line_geometry
from .patterns import pattern_from_string, pattern_string
from .scenarios import (
    ASYM_MEMORY_COLUMNS,
    ASYM_POSITION_COLUMNS,
    PROTOCOLS,
    SINGLE_COLUMNS,
    SWEEP_SYMMETRIC_COLUMNS,
    TOPOLOGY_COLUMNS,
    NetworkScenario,
    NoiseParameters,
    run_request,
    run_topology_comparison,
    single_rows,
    sweep_asymmetry,
    sweep_symmetric_grid,
    write_rows_csv,
    write_rows_json,
)

KM = 1e3
MS = 1e-3


def load_config(path: str | Path) -> dict:
    """Parse a TOML or JSON config file, picking the format by suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()
    if suffix == ".toml":
        return tomllib.loads(text)
    if suffix == ".json":
        return json.loads(text)
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as toml_err:
        try:
            return json.loads(text)
        except json.JSONDecodeError as json_err:
            raise ValueError(
                f"{path} is neither TOML ({toml_err}) nor JSON ({json_err})"
            ) from None


def _as_seconds(ms_value):
    if isinstance(ms_value, (list, tuple)):
        return [float(v) * MS for v in ms_value]
    return float(ms_value) * MS


def _as_meters(km_value):
    if isinstance(km_value, (list, tuple)):
        return [float(v) * KM for v in km_value]
    return float(km_value) * KM


def _memory_from_config(cfg: dict, nodes: int):
    """Per-node memory times in seconds from the T_ms key (scalar or list)."""
    raw = cfg.get("T_ms", 100.0)
    if isinstance(raw, (list, tuple)):
        if len(raw) != nodes:
            raise ValueError(f"T_ms list needs {nodes} entries, got {len(raw)}")
        return {node: float(t) * MS for node, t in enumerate(raw, start=1)}
    return float(raw) * MS


def _geometry_from_config(cfg: dict, nodes: int, protocol: str) -> NetworkGeometry:
    structure = "chain" if protocol == "local" else "star"
    coordinator = None
    if structure == "star":
        coordinator = int(cfg.get("coordinator", (nodes + 1) // 2))
    if "positions_km" in cfg:
        positions = [
            (float(x) * KM, float(y) * KM) for x, y in cfg["positions_km"]
        ]
        if len(positions) != nodes:
            raise ValueError(
                f"positions_km needs {nodes} entries, got {len(positions)}"
            )
        return NetworkGeometry(
            positions=positions, structure=structure, coordinator=coordinator
        )
    spacing = cfg.get("spacing_km", 15.0)
    if isinstance(spacing, (list, tuple)):
        spacings = [float(s) * KM for s in spacing]
        if len(spacings) != nodes - 1:
            raise ValueError(
                f"spacing_km list needs {nodes - 1} entries, got {len(spacings)}"
            )
    else:
        spacings = [float(spacing) * KM] * (nodes - 1)
    return line_geometry(spacings, structure=structure, coordinator=coordinator)


def _grid_from_config(cfg, values_key, lo_key, hi_key, points_key, defaults, log):
    """A sweep axis: an explicit list, or endpoints with a point count."""
    if values_key in cfg:
        values = [float(v) for v in cfg[values_key]]
        if not values:
            raise ValueError(f"{values_key} must not be empty")
        return values
    lo = float(cfg.get(lo_key, defaults[0]))
    hi = float(cfg.get(hi_key, defaults[1]))
    points = int(cfg.get(points_key, defaults[2]))
    space = np.geomspace if log else np.linspace
    return [float(v) for v in space(lo, hi, points)]


def _resolve_protocol(args, cfg: dict, default: str = "local") -> str:
    protocol = args.protocol or cfg.get("protocol", default)
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    return protocol


def _write(args, name: str, columns, rows) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        path = out_dir / f"{name}.json"
        write_rows_json(path, columns, rows)
    else:
        path = out_dir / f"{name}.csv"
        write_rows_csv(path, columns, rows)
    return path


def cmd_single(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    protocol = _resolve_protocol(args, cfg)
    nodes = int(cfg.get("nodes", 7))
    a = int(cfg.get("a", 1))
    b = int(cfg.get("b", nodes))
    if "permutation" in cfg:
        topology = EntanglementTopology(
            node_of=tuple(int(v) for v in cfg["permutation"])
        )
    else:
        topology = EntanglementTopology.basic(nodes)
    raw_pattern = cfg.get("pattern", "optimize")
    if raw_pattern == "optimize":
        pattern = "optimize"
    else:
        pattern = pattern_from_string(raw_pattern, first_vertex=min(a, b) + 1)
    scenario = NetworkScenario(
        geometry=_geometry_from_config(cfg, nodes, protocol),
        topology=topology,
        protocol=protocol,
        noise=NoiseParameters(
            depolarizing=float(cfg.get("p", 0.01)),
            memory_time=_memory_from_config(cfg, nodes),
        ),
        request=Request(a, b),
        pattern=pattern,
        rng_seed=args.seed,
    )
    result = run_request(scenario)
    path = _write(args, "single", SINGLE_COLUMNS, single_rows(scenario, result))
    print(
        f"F = {result.fidelity:.12g} with pattern "
        f"{pattern_string(result.pattern) or '(none)'} "
        f"({'usable' if result.usable else 'not usable'})"
    )
    print(f"wrote {path}")
    return 0


def cmd_sweep_symmetric(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    protocol = _resolve_protocol(args, cfg)
    nodes = int(cfg.get("nodes", 6))
    p_values = _grid_from_config(
        cfg, "p_values", "p_min", "p_max", "p_points", (1e-3, 0.1, 9), log=True
    )
    memory_values = [
        v * MS
        for v in _grid_from_config(
            cfg, "T_ms_values", "T_ms_min", "T_ms_max", "T_ms_points",
            (1.0, 100.0, 9), log=True,
        )
    ]
    rows = sweep_symmetric_grid(
        nodes,
        p_values,
        memory_values,
        protocol,
        spacing=_as_meters(cfg.get("spacing_km", 15.0)),
        coordinator=cfg.get("coordinator"),
    )
    path = _write(args, "sweep_symmetric", SWEEP_SYMMETRIC_COLUMNS, rows)
    print(f"wrote {path} ({len(rows)} grid points)")
    return 0


def _cmd_asym(args, kind: str) -> int:
    cfg = load_config(args.config) if args.config else {}
    protocol = _resolve_protocol(args, cfg)
    nodes = int(cfg["nodes"]) if "nodes" in cfg else None
    if kind == "memory":
        sweep_values = [
            v * MS
            for v in _grid_from_config(
                cfg, "T_ms_values", "T_ms_min", "T_ms_max", "points",
                (0.1, 100.0, 25), log=True,
            )
        ]
        columns, name = ASYM_MEMORY_COLUMNS, "asym_memory"
    else:
        sweep_values = [
            v * KM
            for v in _grid_from_config(
                cfg, "d_km_values", "d_km_min", "d_km_max", "points",
                (5.0, 25.0, 21), log=False,
            )
        ]
        columns, name = ASYM_POSITION_COLUMNS, "asym_position"
    rows = sweep_asymmetry(
        kind,
        protocol,
        n=nodes,
        p=float(cfg.get("p", 0.01)),
        memory_time=float(cfg.get("T_ms", 100.0)) * MS,
        spacing=_as_meters(cfg.get("spacing_km", 15.0)),
        sweep_values=sweep_values,
        qubits=cfg.get("qubits"),
        coordinator=cfg.get("coordinator"),
    )
    path = _write(args, name, columns, rows)
    print(f"wrote {path} ({len(rows)} points)")
    return 0


def cmd_topology_compare(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    nodes = int(cfg.get("nodes", 100))
    if args.protocol:
        protocols: tuple[str, ...] = (args.protocol,)
    else:
        protocols = tuple(cfg.get("protocols", PROTOCOLS))
    d_range = cfg.get("d_km_range", [5.0, 25.0])
    if cfg.get("disable_dephasing", False):
        memory_range = None
    else:
        t_range = cfg.get("T_ms_range", [10.0, 100.0])
        memory_range = (float(t_range[0]) * MS, float(t_range[1]) * MS)
    rows = run_topology_comparison(
        nodes=nodes,
        spacing_range=(float(d_range[0]) * KM, float(d_range[1]) * KM),
        p=float(cfg.get("p", 0.01)),
        memory_range=memory_range,
        seed=args.seed,
        hop_cap=int(cfg.get("hop_cap", 12)),
        instances=int(cfg.get("instances", 1)),
        coordinator=cfg.get("coordinator"),
        identity_permutation=bool(cfg.get("identity", False)),
        protocols=protocols,
    )
    path = _write(args, "topology_compare", TOPOLOGY_COLUMNS, rows)
    print(f"wrote {path} ({len(rows)} hop rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsnet",
        description="Bell-pair fidelities from noisy cluster-state chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("single", "evaluate one request", cmd_single),
        ("sweep-symmetric", "optimal pattern over a (p, T) grid", cmd_sweep_symmetric),
        ("asym-memory", "curves for one faulty memory", lambda a: _cmd_asym(a, "memory")),
        ("asym-position", "curves for one shifted node", lambda a: _cmd_asym(a, "position")),
        ("topology-compare", "custom versus basic placement", cmd_topology_compare),
    ]
    for name, help_text, handler in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML or JSON config file (km/ms units)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument(
            "--protocol",
            choices=PROTOCOLS,
            help="classical-communication protocol (topology-compare default: both)",
        )
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(handler=handler)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
