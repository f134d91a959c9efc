"""Command-line driver: ``python -m qwalkrot <command> [--config PATH] [--seed S] [--out DIR] [--tol T]``.

Every command reads an optional JSON config whose keys must be a subset of the
command's defaults, runs one experiment, and writes ``result.json`` plus any CSV
arrays into ``--out``. Exit status: 0 success, 2 invalid config, 1 simulation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

import numpy as np

from . import __version__, cqed, embedding, fsbsw, ions, qsp, walk
from .linalg import settings

UNITS = {
    "frequency": "value / 2pi in GHz (cqed *_ghz fields) or MHz (*_mhz fields)",
    "time": "ns for cqed-full and probe traces; units of 1/g (or pi/g where tagged) elsewhere",
    "angle": "radians",
}


class ConfigError(ValueError):
    def __init__(self, problems: dict):
        super().__init__("; ".join(f"{k}: {v}" for k, v in problems.items()))
        self.problems = problems


DEFAULTS = {
    "walk": {"theta": 2 * math.pi / 3, "k": 0.0, "N": 3, "grid_size": 256},
    "embed": {"matrix": None, "dim": 4, "t": 0.333 * math.pi, "k": 0.0, "N": 5},
    "cqed-rwa": {"preset": "table2-homogeneous", "couplings": None, "random_couplings": None,
                 "N_values": None, "k": None, "t_factor": None},
    "cqed-full": {"preset": "table4", "g_mhz": None, "N_values": None, "t_factor": None,
                  "phi_scan": 720, "local_dim": None, "probe": False, "probe_samples": 201},
    "qsp": {"target": "ab", "a": 0.62, "b": 0.3, "degree": 10, "n_qubits": 6, "t": 0.88,
            "phases": None, "grid_size": 201, "restarts": 20},
    "ion": {"n_ions": 4, "theta": 2 * math.pi / 3, "N": 7, "phi": 0.0, "ancilla": 1,
            "partition": None, "partition_file": None, "mechanism": "walk"},
    "rydberg": {"couplings": [1.0, 1.0], "t": math.pi / 8, "N": 3, "phi": 0.0},
    "fsbsw": {"n": 4, "walk_N": 5},
    "sweep": {"kind": "fig6", "points": 121, "k_max": 2 * math.pi / 3, "N": 3, "t_factor": 0.333,
              "x_points": 201, "a": 0.62, "b": 0.3, "walk_N": 5, "preset": "table4",
              "g_mhz": None, "N_values": None, "workers": 1},
}

_TYPES = {
    "theta": float, "k": (float, type(None)), "N": int, "grid_size": int, "dim": int, "t": float,
    "phi_scan": int, "probe": bool, "probe_samples": int, "degree": int, "n_qubits": int,
    "restarts": int, "n_ions": int, "phi": float, "ancilla": int, "n": int, "walk_N": int,
    "points": int, "k_max": float, "t_factor": (float, type(None)), "x_points": int, "a": float,
    "b": float, "workers": int, "preset": (str, type(None)), "target": str, "mechanism": str, "kind": str,
}


def validate(command: str, raw: dict) -> dict:
    if command not in DEFAULTS:
        raise ConfigError({"command": f"unknown command {command!r}"})
    if not isinstance(raw, dict):
        raise ConfigError({"config": "top level must be a JSON object"})
    cfg = dict(DEFAULTS[command])
    problems = {}
    for key, value in raw.items():
        if key not in cfg:
            problems[key] = "unknown field"
            continue
        want = _TYPES.get(key)
        if want is not None:
            ok_types = want if isinstance(want, tuple) else (want,)
            if float in ok_types and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if not isinstance(value, ok_types) or (isinstance(value, bool) and bool not in ok_types):
                problems[key] = f"expected {' or '.join(t.__name__ for t in ok_types)}"
                continue
        cfg[key] = value
    for key in ("N", "walk_N"):
        if key in cfg and isinstance(cfg[key], int) and (cfg[key] < 1 or cfg[key] % 2 == 0):
            problems.setdefault(key, "must be a positive odd integer")
    if command == "ion" and cfg["mechanism"] not in ("walk", "qsp"):
        problems["mechanism"] = "must be 'walk' or 'qsp'"
    if command == "qsp" and cfg["target"] not in ("ab", "a", "walk"):
        problems["target"] = "must be 'ab', 'a' or 'walk'"
    if command == "sweep" and cfg["kind"] not in ("fig6", "fig7", "table4"):
        problems["kind"] = "must be 'fig6', 'fig7' or 'table4'"
    if "preset" in cfg and cfg["preset"] is not None and cfg["preset"] not in cqed.list_presets():
        problems["preset"] = f"unknown preset; available: {', '.join(cqed.list_presets())}"
    if problems:
        raise ConfigError(problems)
    return cfg


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _atomic_json(path: Path, payload) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _clean(value):
    """Make numpy scalars/arrays JSON friendly; complex numbers become [re, im]."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    return value


# -- commands ---------------------------------------------------------------------------


def run_walk(cfg, rng, out):
    params = walk.WalkParams(cfg["theta"], cfg["k"], cfg["N"])
    w = walk.walk_sequence(params)
    wind = walk.winding_number(cfg["theta"], cfg["grid_size"])
    return {
        "revival_residual": walk.revival_residual(cfg["theta"], cfg["N"], cfg["k"]),
        "revival_bound": walk.revival_bound(cfg["theta"], cfg["N"]),
        "winding_number": wind.number,
        "winding_degenerate": wind.degenerate,
        "unitarity_error": w.unitarity_error(),
    }


def _parse_matrix(m):
    arr = np.asarray(m)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError({"matrix": "must be a square list of lists (entries real or [re, im])"})
    return arr.astype(complex)


def run_embed(cfg, rng, out):
    if cfg["matrix"] is None:
        d = cfg["dim"]
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a[:, 0] = 0.0  # guarantee a dark direction
    else:
        a = _parse_matrix(cfg["matrix"])
    sys_ = embedding.embed(a)
    w = embedding.rotation_sequence(sys_, cfg["t"], cfg["k"], cfg["N"])
    block = embedding.ancilla_block(w, 1)
    ideal = embedding.ideal_rotation(sys_, cfg["k"], cfg["N"])
    lam = sys_.blocks.singular_values
    left = sys_.blocks.left_vectors
    diag = np.einsum("ij,jk,ki->i", left.conj().T, block, left)
    dev = np.where(sys_.zero_mask, np.abs(diag - np.exp(2j * cfg["N"] * cfg["k"])), np.abs(diag + 1))
    from .linalg import average_gate_fidelity

    return {
        "singular_values": lam,
        "dark_count": int(sys_.zero_mask.sum()),
        "block_deviation": dev,
        "block_bound": embedding.error_bound(lam, cfg["t"], cfg["N"]),
        "fidelity": average_gate_fidelity(block, ideal),
        "phi": float(np.pi - cfg["N"] * cfg["k"]),
    }


def _rwa_inputs(cfg, rng):
    preset = cqed.load_preset(cfg["preset"]) if cfg["preset"] else {}
    if cfg["random_couplings"] is not None:
        spec = cfg["random_couplings"]
        couplings = rng.normal(spec.get("mean", 1.0), spec.get("std", 0.1), int(spec.get("n", 4)))
    elif cfg["couplings"] is not None:
        couplings = np.asarray(cfg["couplings"], dtype=float)
    else:
        couplings = np.asarray(preset["couplings"], dtype=float)
    n_values = cfg["N_values"] or preset.get("N_values", [3, 5, 7])
    k = cfg["k"] if cfg["k"] is not None else preset.get("k", 0.0)
    t_factor = cfg["t_factor"] if cfg["t_factor"] is not None else preset.get("t_factor", 0.333)
    return couplings, [int(n) for n in n_values], float(k), float(t_factor)


def run_cqed_rwa(cfg, rng, out):
    couplings, n_values, k, t_factor = _rwa_inputs(cfg, rng)
    t_g = t_factor * np.pi / couplings.max()
    rows = []
    for N in n_values:
        rep = cqed.simulate_rwa_sequence(couplings, N, k, t_g)
        rows.append({"N": N, "F": rep.F, "phi": rep.phi_star})
    _write_csv(out / "fidelity.csv", ["N", "F", "phi"], [[r["N"], r["F"], r["phi"]] for r in rows])
    return {"couplings_over_g": couplings, "t_g_times_g": t_g, "rows": rows}


def _full_point(args):
    preset, g_mhz, N, t_factor, phi_scan, local_dim = args
    spec = cqed.lattice_from_preset(preset, g_mhz, local_dim)
    rep = cqed.simulate_full_sequence(spec, N, cqed.gate_time_ns(g_mhz, t_factor), phi_scan)
    alpha_min = min(abs(a) for a in spec.alpha_ghz) / (g_mhz * 1e-3)
    return {"g_mhz": g_mhz, "N": N, "F": rep.F, "phi_star": rep.phi_star, "alpha_over_g_min": alpha_min,
            "leakage": rep.metadata["leakage"], "frame_betas": rep.metadata["frame_betas"]}


def run_cqed_full(cfg, rng, out):
    import warnings

    preset = cqed.load_preset(cfg["preset"])
    g_list = cfg["g_mhz"] or preset["g_mhz"]
    n_list = cfg["N_values"] or preset.get("N_values", [3, 5, 7])
    t_factor = cfg["t_factor"] if cfg["t_factor"] is not None else preset.get("t_factor", 0.333)
    local_dim = cfg["local_dim"] or preset.get("local_dim", 3)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cqed.WeakAnharmonicityWarning)
        for g in g_list:
            for N in n_list:
                rows.append(_full_point((preset, float(g), int(N), t_factor, cfg["phi_scan"], local_dim)))
        result = {"rows": rows}
        if cfg["probe"]:
            g = float(g_list[-1])
            spec = cqed.lattice_from_preset(preset, g, local_dim)
            t_max = np.pi / (cqed.TWO_PI * g * 1e-3)
            labels = preset.get("labels", ["10000", "11000", "11100", "11110", "11111"])
            times, traces = cqed.probe_initial_states(spec, labels, t_max, cfg["probe_samples"])
            cqed.write_traces_csv(out / "traces.csv", times, traces)
            result["probe_g_mhz"] = g
    _write_csv(out / "table.csv", ["g_mhz", "N", "F", "phi_star"],
               [[r["g_mhz"], r["N"], r["F"], r["phi_star"]] for r in rows])
    return result


def run_qsp(cfg, rng, out):
    if cfg["target"] == "ab":
        target = qsp.target_poly_ab(cfg["a"], cfg["b"])
    elif cfg["target"] == "a":
        target = qsp.target_poly_a(cfg["a"])
    else:
        n = (cfg["degree"]) // 2
        target = qsp.TargetPolynomial.from_polynomial(2 * np.polynomial.Polynomial([0, 1]) ** (2 * n) - 1)
    if cfg["phases"] is not None:
        seq = qsp.PhaseSequence(cfg["phases"])
    elif cfg["target"] == "walk":
        seq = qsp.walk_phases(cfg["degree"] // 2)
    else:
        seq = qsp.find_phases(target, cfg["degree"], restarts=cfg["restarts"], seed=int(rng.integers(2**31)))
    xs = qsp.chebyshev_grid(cfg["grid_size"])
    residual = float(np.max(np.abs(qsp.qsp_response(seq, xs) - target(xs))))
    nq = cfg["n_qubits"]
    lam = np.sqrt(np.arange(nq + 1))
    mult = [comb(nq, j) for j in range(nq + 1)]
    fid = qsp.qsp_reflection_fidelity(seq, lam, mult, cfg["t"])
    grid = np.linspace(-1, 1, 201)
    resp = qsp.qsp_response(seq, grid)
    _write_csv(out / "response.csv", ["x", "target", "response_re", "response_im"],
               [[x, float(np.real(target(x))), r.real, r.imag] for x, r in zip(grid, resp)])
    (out / "phases.json").write_text(qsp.phases_to_json(seq) + "\n", encoding="utf-8")
    return {"phases": list(seq.phases), "residual": residual, "fidelity": fid, "degree": seq.degree}


def run_ion(cfg, rng, out):
    values = cfg["partition"]
    if cfg["partition_file"] is not None:
        values = list(ions.partition_from_json(Path(cfg["partition_file"]).read_text()))
    if values is not None:
        rep = ions.partition_oracle(values, cfg["mechanism"], seed=int(rng.integers(2**31)))
        d = rep.to_dict()
        _atomic_json(out / "oracle_report.json", _clean(d))
        return d
    res = ions.ion_reflection(cfg["n_ions"], cfg["theta"], cfg["N"], cfg["phi"], cfg["ancilla"])
    lam = np.arange(-cfg["n_ions"], cfg["n_ions"] + 1, 2) / 2
    bound = max((2 * abs(np.cos(cfg["theta"] * v / 2)) ** cfg["N"] for v in lam if v != 0), default=0.0)
    return {"F": res.F, "subspace_dim": res.subspace_dim, "block_bound": bound}


def run_rydberg(cfg, rng, out):
    res = ions.rydberg_reflection(cfg["couplings"], cfg["t"], cfg["N"], cfg["phi"])
    return {"F": res.F, "subspace_dim": res.subspace_dim}


def run_fsbsw(cfg, rng, out):
    n = cfg["n"]
    if not 3 <= n <= 6:
        raise ConfigError({"n": "must lie in [3, 6]"})
    seq = fsbsw.build_fsbsw_sequence(n)
    u = fsbsw.simulate_fsbsw(n)
    diag, off = fsbsw.computational_diagonal(u, n)
    flips = [format(i, f"0{n}b") for i in np.nonzero(np.abs(diag + 1) < 1e-10)[0]]
    others_fixed = bool(np.all(np.abs(np.delete(diag, [int(f, 2) for f in flips]) - 1) < 1e-10))
    rows = fsbsw.cost_comparison(n, cfg["walk_N"])
    fsbsw.write_cost_csv(out / "cost.csv", rows)
    return {
        "duration_pi_over_g": float(fsbsw.sequence_duration(seq)),
        "flipped_states": flips,
        "phase_flip_verified": flips == [fsbsw.flipped_state(n)] and others_fixed and off < 1e-10,
        "gates": [str(g) for g in seq],
    }


def _fig6_point(args):
    k, t, N = args
    closed = cqed.closed_form_rotation_fidelity(k, t)[1] if N == 3 else float("nan")
    sim = cqed.simulate_rwa_sequence([1.0] * 4, N, k, t).F
    return [k, closed, sim]


def run_sweep(cfg, rng, out):
    kind = cfg["kind"]
    workers = max(1, cfg["workers"])
    points_dir = out / "points"
    points_dir.mkdir(exist_ok=True)
    if kind == "fig6":
        ks = np.linspace(0.0, cfg["k_max"], cfg["points"])
        t = cfg["t_factor"] * np.pi
        tasks = [(float(k), t, cfg["N"]) for k in ks]
        fn, header = _fig6_point, ["k", "F_closed_form", "F_sequence"]
    elif kind == "fig7":
        xs = np.linspace(-1.0, 1.0, cfg["x_points"])
        p_ab = qsp.target_poly_ab(cfg["a"], cfg["b"])
        rows = [[x, 2 * x ** (2 * cfg["walk_N"]) - 1, float(p_ab(x))] for x in xs]
        _write_csv(out / "sweep.csv", ["x", "walk_polynomial", "two_node_target"], rows)
        return {"points": len(rows)}
    else:
        preset = cqed.load_preset(cfg["preset"])
        tasks = [(preset, float(g), int(N), 0.333, 720, preset.get("local_dim", 3))
                 for g in (cfg["g_mhz"] or preset["g_mhz"]) for N in (cfg["N_values"] or preset["N_values"])]
        fn, header = _full_point, ["g_mhz", "N", "F", "phi_star"]
    if workers == 1:
        results = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, tasks))
    rows = []
    for i, r in enumerate(results):
        _atomic_json(points_dir / f"{i:04d}.json", _clean(r))
        rows.append(r if isinstance(r, list) else [r[h] for h in header])
    _write_csv(out / "sweep.csv", header, rows)
    return {"points": len(rows)}


RUNNERS = {
    "walk": run_walk,
    "embed": run_embed,
    "cqed-rwa": run_cqed_rwa,
    "cqed-full": run_cqed_full,
    "qsp": run_qsp,
    "ion": run_ion,
    "rydberg": run_rydberg,
    "fsbsw": run_fsbsw,
    "sweep": run_sweep,
}


def run(command: str, raw_config: dict, seed: int = 0, out: str | Path = ".", tol: float | None = None) -> dict:
    """Validate, execute and record one experiment; returns the record written to result.json."""
    cfg = validate(command, raw_config)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    old_tol = settings.tol
    if tol is not None:
        settings.tol = tol
    start = time.perf_counter()
    try:
        results = RUNNERS[command](cfg, rng, out)
    finally:
        settings.tol = old_tol
    record = {
        "command": command,
        "config": _clean(cfg),
        "seed": seed,
        "tol": settings.tol if tol is None else tol,
        "results": _clean(results),
        "units": UNITS,
        "version": __version__,
        "wall_clock_s": time.perf_counter() - start,
    }
    _atomic_json(out / "result.json", record)
    return record


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalkrot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, help="JSON file with overrides of the command defaults")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--tol", type=float, default=None, help="structural tolerance override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8")) if args.config else {}
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return 2
    try:
        record = run(args.command, raw, args.seed, args.out, args.tol)
    except ConfigError as exc:
        print(json.dumps({"error": "validation", "fields": exc.problems}), file=sys.stderr)
        return 2
    except Exception as exc:  # simulation failure, reported with the command that raised it
        print(json.dumps({"error": "simulation", "command": args.command, "type": type(exc).__name__,
                          "detail": str(exc)}), file=sys.stderr)
        return 1
    print(json.dumps(record["results"], sort_keys=True)[:2000])
    return 0


if __name__ == "__main__":
    sys.exit(main())
