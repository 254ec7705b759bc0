"""Pipeline orchestration and command-line interface.

Subcommands mirror the pipeline stages: gen-state, gen-povm, simulate,
reconstruct-sdp, reconstruct-irt, wigner, metrics, plus the end-to-end
`run` and the fidelity-vs-measurement-count `sweep`. All artifacts are
JSON/CSV files; manifests carry SHA-256 digests of every emitted file.

Exit codes: 0 ok, 1 configuration error, 2 solver stopped non-optimal,
3 infeasible program.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import radon as radon_mod
from . import wigner as wigner_mod
from .errors import ConfigError, DomainError, TomographyError
from .fock import (DensityMatrix, StateSpec, TruncationConfig, build_state,
                   fidelity, negativity, shannon_entropy_probe)
from .povm import SamplingGrid, elements_from_grid, load_povm, save_povm
from .sdp import SolverConfig, assemble, solve, solve_biased
from .simulate import NoiseConfig, load_dataset, save_dataset, simulate

METHODS = ("sdp", "sdp_biased", "irt")
EXIT_OK, EXIT_CONFIG, EXIT_NONOPTIMAL, EXIT_INFEASIBLE = 0, 1, 2, 3


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    state: StateSpec
    trunc: TruncationConfig
    grid: SamplingGrid
    subset_size: int
    subset_seed: int = 0
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    method: str = "sdp"
    solver: SolverConfig = field(default_factory=SolverConfig)
    probe_count: int = 10
    probe_seed: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0 < self.subset_size <= self.grid.cardinality:
            raise ConfigError(
                f"subset_size {self.subset_size} outside 1..{self.grid.cardinality}")
        if self.trunc.modes != self.grid.modes:
            raise ConfigError("truncation and grid disagree on the number of modes")
        if self.method == "irt" and self.trunc.modes != 1:
            raise ConfigError("the inverse-Radon baseline is single-mode only")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RunConfig":
        try:
            trunc = TruncationConfig(cutoff_n=int(doc["trunc"]["cutoff_n"]),
                                     modes=int(doc["trunc"].get("modes", 1)))
            state = StateSpec.from_json_dict(doc["state"])
            grid = _grid_from_config(doc["grid"], trunc.modes)
            noise = (NoiseConfig.from_json_dict(doc["noise"]) if "noise" in doc
                     else NoiseConfig())
            sol = doc.get("solver", {})
            solver = SolverConfig(
                algorithm=sol.get("algorithm", "interior_point"),
                tol_primal=float(sol.get("tol_primal", sol.get("tol", 1e-7))),
                tol_dual=float(sol.get("tol_dual", sol.get("tol", 1e-7))),
                tol_gap=float(sol.get("tol_gap", sol.get("tol", 1e-7))),
                max_iters=sol.get("max_iters"),
                maxent=bool(sol.get("maxent", True)))
            return cls(state=state, trunc=trunc, grid=grid,
                       subset_size=int(doc["subset_size"]),
                       subset_seed=int(doc.get("subset_seed", 0)),
                       noise=noise, method=doc.get("method", "sdp"), solver=solver,
                       probe_count=int(doc.get("probe_count", 10)),
                       probe_seed=int(doc.get("probe_seed", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid run configuration: {exc}") from exc

    def to_json_dict(self) -> dict:
        return {
            "state": self.state.to_json_dict(),
            "trunc": {"cutoff_n": self.trunc.cutoff_n, "modes": self.trunc.modes},
            "grid": self.grid.to_json_dict(),
            "subset_size": self.subset_size,
            "subset_seed": self.subset_seed,
            "noise": self.noise.to_json_dict(),
            "method": self.method,
            "solver": {"algorithm": self.solver.algorithm,
                       "tol_primal": self.solver.tol_primal,
                       "tol_dual": self.solver.tol_dual,
                       "tol_gap": self.solver.tol_gap,
                       "max_iters": self.solver.max_iters,
                       "maxent": self.solver.maxent},
            "probe_count": self.probe_count,
            "probe_seed": self.probe_seed,
        }


@dataclass
class SweepConfig:
    base: RunConfig
    subset_sizes: list[int]
    repeats: int = 5

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.subset_sizes, self.subset_sizes[1:])):
            raise ConfigError("subset_sizes must be strictly increasing")
        if not self.subset_sizes:
            raise ConfigError("subset_sizes must be non-empty")
        if self.base.noise.enabled and self.repeats < 3:
            raise ConfigError("noisy sweeps need at least 3 repeats")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SweepConfig":
        try:
            return cls(base=RunConfig.from_json_dict(doc["base"]),
                       subset_sizes=[int(s) for s in doc["subset_sizes"]],
                       repeats=int(doc.get("repeats", 5)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid sweep configuration: {exc}") from exc


def _grid_from_config(doc: dict, modes: int) -> SamplingGrid:
    if "q_values" in doc or "z_values" in doc:
        return SamplingGrid.from_json_dict(doc)
    kind = doc.get("kind", "quadrature")
    if kind == "quadrature":
        return SamplingGrid.quadrature(
            q_count=int(doc.get("q_count", 7)),
            theta_count=int(doc.get("theta_count", 5)),
            modes=modes,
            q_range=(float(doc.get("q_min", -5.0)), float(doc.get("q_max", 5.0))))
    return SamplingGrid.coherent(
        z_count=int(doc.get("z_count", 10)), modes=modes,
        z_range=(float(doc.get("z_min", 0.0)), float(doc.get("z_max", 2.0))),
        z_im_width=doc.get("z_im_width"))


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _parse_axis(spec: str) -> np.ndarray:
    """Parse 'start:step:stop' into an inclusive uniform axis."""
    try:
        start, step, stop = (float(tok) for tok in spec.split(":"))
    except ValueError as exc:
        raise ConfigError(f"axis spec {spec!r} is not start:step:stop") from exc
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


# --------------------------------------------------------------------------
# pipeline stages
# --------------------------------------------------------------------------

def _subset_indices(grid: SamplingGrid, size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if size >= grid.cardinality:
        return np.arange(grid.cardinality)
    return np.sort(rng.choice(grid.cardinality, size=size, replace=False))


def _probe_elements(config: RunConfig, measured: np.ndarray):
    """Unmeasured grid elements used for the entropy diagnostic."""
    pool = np.setdiff1d(np.arange(config.grid.cardinality), measured)
    if pool.size == 0:
        return []
    rng = np.random.default_rng(config.probe_seed)
    take = min(config.probe_count, pool.size)
    picks = np.sort(rng.choice(pool, size=take, replace=False))
    return elements_from_grid(config.grid, config.trunc, indices=picks)


def run(config: RunConfig, out_dir) -> dict:
    """Execute gen -> simulate -> reconstruct -> metrics; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()

    rho_true = build_state(config.state, config.trunc)
    state_path = out / "state.json"
    state_path.write_text(json.dumps(rho_true.to_json_dict()))

    indices = _subset_indices(config.grid, config.subset_size, config.subset_seed)
    elements = elements_from_grid(config.grid, config.trunc, indices=indices)
    povm_path = out / "povm.json"
    save_povm(povm_path, elements, config.grid, config.trunc)

    records = simulate(rho_true, elements, config.noise)
    data_path = out / "data.jsonl"
    save_dataset(data_path, records, state_spec=config.state.to_json_dict(),
                 trunc={"cutoff_n": config.trunc.cutoff_n, "modes": config.trunc.modes},
                 grid=config.grid.to_json_dict(), noise=config.noise)

    files = {"state": state_path, "povm": povm_path, "data": data_path}
    metrics: dict = {"method": config.method}
    status = "optimal"

    if config.method in ("sdp", "sdp_biased"):
        problem = assemble(elements, records, config.trunc)
        solver = solve if config.method == "sdp" else solve_biased
        result = solver(problem, config.solver)
        status = result.status
        rho_path = out / "rho.json"
        rho_path.write_text(json.dumps(result.rho.to_json_dict()))
        files["rho"] = rho_path
        metrics.update({
            "fidelity": fidelity(result.rho, rho_true),
            "solver_status": result.status,
            "iterations": result.iterations,
            "objective": result.objective,
            "delta_maxent": result.delta_maxent,
            "solver_runtime_seconds": result.runtime_seconds,
            "residual_primal": result.diagnostics["residual_primal"],
            "rel_gap": result.diagnostics["rel_gap"],
        })
        if config.trunc.modes == 2:
            metrics["negativity"] = negativity(result.rho)
        probes = _probe_elements(config, indices)
        if probes:
            metrics["entropy_probe"] = shannon_entropy_probe(result.rho, probes)
    else:  # inverse-Radon baseline
        sino = radon_mod.sinogram(rho_true, np.asarray(config.grid.q_values),
                                  np.asarray(config.grid.theta_values))
        sino_path = out / "sinogram.csv"
        sino.to_csv(sino_path)
        axis = np.arange(-5.0, 5.0001, 0.1)
        target = wigner_mod.PhaseSpaceGrid(q_axis=axis, p_axis=axis,
                                           values=np.zeros((axis.size, axis.size)))
        image = radon_mod.inverse_radon(sino, radon_mod.KernelConfig(), target)
        wigner_path = out / "wigner.csv"
        image.to_csv(wigner_path)
        extracted = radon_mod.density_from_wigner(image, config.trunc)
        rho_path = out / "rho.json"
        rho_path.write_text(json.dumps({
            "dim": config.trunc.total_dim, "cutoff_n": config.trunc.cutoff_n,
            "modes": config.trunc.modes,
            "re": extracted.real.reshape(-1).tolist(),
            "im": extracted.imag.reshape(-1).tolist()}))
        files.update({"sinogram": sino_path, "wigner": wigner_path, "rho": rho_path})
        diag = np.diag(extracted).real
        metrics["negative_diagonal_present"] = bool(diag.min() < 0)
        metrics["min_diagonal"] = float(diag.min())
        try:
            clipped = DensityMatrix(extracted / np.trace(extracted).real, config.trunc)
            metrics["fidelity"] = fidelity(clipped, rho_true)
        except (DomainError, TomographyError):
            metrics["fidelity"] = None

    metrics["wall_time_seconds"] = time.perf_counter() - t_start
    manifest = {
        "config": config.to_json_dict(),
        "metrics": metrics,
        "status": status,
        "files": {name: {"path": str(p), "sha256": _sha256(p)} for name, p in files.items()},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return manifest


def _sweep_cell(args) -> dict:
    base_doc, size, repeat, cell_dir = args
    doc = json.loads(json.dumps(base_doc))
    doc["subset_size"] = size
    doc["subset_seed"] = int(doc.get("subset_seed", 0)) + 7919 * repeat
    doc["noise"]["seed"] = int(doc["noise"].get("seed", 0)) + 104729 * repeat
    try:
        manifest = run(RunConfig.from_json_dict(doc), cell_dir)
        return {"size": size, "repeat": repeat,
                "fidelity": manifest["metrics"].get("fidelity"),
                "status": manifest["status"], "error": None}
    except TomographyError as exc:
        return {"size": size, "repeat": repeat, "fidelity": None,
                "status": "failed", "error": str(exc)}


def sweep(config: SweepConfig, out_dir, jobs: int = 1) -> list[dict]:
    """Fidelity means/stds per subset size; cells run independently."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base_doc = config.base.to_json_dict()
    cells = [(base_doc, size, rep, str(out / f"cell_{size}_{rep}"))
             for size in config.subset_sizes for rep in range(config.repeats)]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(cell) for cell in cells]

    rows = []
    for size in config.subset_sizes:
        fids = [r["fidelity"] for r in results
                if r["size"] == size and r["fidelity"] is not None]
        rows.append({
            "subset_size": size,
            "mean_fidelity": float(np.mean(fids)) if fids else math.nan,
            "std_fidelity": float(np.std(fids)) if fids else math.nan,
            "cells_failed": sum(1 for r in results if r["size"] == size and r["error"]),
        })
    csv_path = out / "sweep.csv"
    with open(csv_path, "w") as fh:
        fh.write("subset_size,mean_fidelity,std_fidelity,cells_failed\n")
        for row in rows:
            fh.write(f"{row['subset_size']},{row['mean_fidelity']:.6f},"
                     f"{row['std_fidelity']:.6f},{row['cells_failed']}\n")
    (out / "sweep_cells.json").write_text(json.dumps(results, indent=2))
    return rows


# --------------------------------------------------------------------------
# argparse surface
# --------------------------------------------------------------------------

def _parse_params(tokens) -> dict:
    params = {}
    for tok in tokens or []:
        if "=" not in tok:
            raise ConfigError(f"--param expects key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        try:
            params[key] = json.loads(val)
        except json.JSONDecodeError:
            params[key] = float(val)
    return params


def _cmd_gen_state(args) -> int:
    trunc = TruncationConfig(cutoff_n=args.cutoff, modes=args.modes)
    spec = StateSpec(kind=args.kind, params=_parse_params(args.param))
    rho = build_state(spec, trunc)
    Path(args.out).write_text(json.dumps(rho.to_json_dict()))
    print(f"wrote {args.out} (dim {rho.dim}, discarded weight {rho.discarded_weight:.3e})")
    return EXIT_OK


def _cmd_gen_povm(args) -> int:
    trunc = TruncationConfig(cutoff_n=args.cutoff, modes=args.modes)
    if args.kind == "quadrature":
        grid = SamplingGrid.quadrature(q_count=args.q_count, theta_count=args.theta_count,
                                       modes=args.modes, q_range=(args.q_min, args.q_max))
    else:
        grid = SamplingGrid.coherent(z_count=args.z_count, modes=args.modes,
                                     z_range=(args.z_min, args.z_max))
    elements = elements_from_grid(grid, trunc)
    save_povm(args.out, elements, grid, trunc, materialize=args.materialize)
    print(f"wrote {args.out} ({len(elements)} elements)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    elements, grid, trunc = load_povm(args.povm)
    rho = DensityMatrix.from_json_dict(json.loads(Path(args.state).read_text()))
    if args.subset is not None:
        rng = np.random.default_rng(args.subset_seed)
        picks = np.sort(rng.choice(len(elements), size=args.subset, replace=False))
        elements = [elements[i] for i in picks]
    noise = NoiseConfig(enabled=not args.no_noise, snr_percent=args.snr,
                        seed=args.noise_seed)
    records = simulate(rho, elements, noise)
    save_dataset(args.out, records, trunc={"cutoff_n": trunc.cutoff_n, "modes": trunc.modes},
                 grid=grid.to_json_dict(), noise=noise)
    print(f"wrote {args.out} ({len(records)} records)")
    return EXIT_OK


def _cmd_reconstruct_sdp(args) -> int:
    elements, grid, trunc = load_povm(args.povm)
    records, _header = load_dataset(args.data)
    have = {r.element_id for r in records}
    elements = [el for el in elements if el.id in have]
    problem = assemble(elements, records, trunc, epsilon_floor=args.epsilon_floor)
    algorithm = {"ip": "interior_point", "admm": "admm"}.get(args.algorithm, args.algorithm)
    config = SolverConfig(algorithm=algorithm, tol_primal=args.tol, tol_dual=args.tol,
                          tol_gap=args.tol, max_iters=args.max_iters,
                          maxent=not args.no_maxent)
    result = solve(problem, config)
    Path(args.out).write_text(json.dumps(result.rho.to_json_dict()))
    print(f"status={result.status} iterations={result.iterations} "
          f"objective={result.objective:.6e}")
    if result.status == "infeasible":
        return EXIT_INFEASIBLE
    if result.status != "optimal":
        return EXIT_NONOPTIMAL
    return EXIT_OK


def _cmd_reconstruct_irt(args) -> int:
    sino = radon_mod.Sinogram.from_csv(args.sinogram)
    axis = _parse_axis(args.grid)
    target = wigner_mod.PhaseSpaceGrid(q_axis=axis, p_axis=axis,
                                       values=np.zeros((axis.size, axis.size)))
    image = radon_mod.inverse_radon(sino, radon_mod.KernelConfig(cutoff_kc=args.kc), target)
    image.to_csv(args.out)
    if args.rho_out:
        trunc = TruncationConfig(cutoff_n=args.cutoff, modes=1)
        extracted = radon_mod.density_from_wigner(image, trunc)
        Path(args.rho_out).write_text(json.dumps({
            "dim": trunc.total_dim, "cutoff_n": trunc.cutoff_n, "modes": 1,
            "re": extracted.real.reshape(-1).tolist(),
            "im": extracted.imag.reshape(-1).tolist()}))
        diag_min = float(np.diag(extracted).real.min())
        print(f"wrote {args.rho_out} (min diagonal {diag_min:.4f})")
    return EXIT_OK


def _cmd_wigner(args) -> int:
    doc = json.loads(Path(args.rho).read_text())
    rho = DensityMatrix.from_json_dict(doc)
    axis = _parse_axis(args.grid)
    if args.full:
        tensor = wigner_mod.wigner_four_dim(rho, axis, axis)
        out = args.json_out or args.out
        Path(out).write_text(json.dumps({
            "q_axis": axis.tolist(), "p_axis": axis.tolist(),
            "values": tensor.tolist(), "layout": "q1,p1,q2,p2"}))
        print(f"wrote {out} (full tensor, shape {tensor.shape})")
        return EXIT_OK
    if rho.trunc.modes == 1:
        grid = wigner_mod.wigner_grid(rho, axis, axis)
    else:
        grid = wigner_mod.wigner_two_mode_slice(rho, args.plot_mode,
                                                (args.fixed_q, args.fixed_p), axis, axis)
    grid.to_csv(args.out)
    if args.json_out:
        grid.to_json(args.json_out, extra={"cutoff_n": rho.trunc.cutoff_n,
                                           "modes": rho.trunc.modes})
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    rho = DensityMatrix.from_json_dict(json.loads(Path(args.rho).read_text()))
    out: dict = {}
    if args.target:
        target = DensityMatrix.from_json_dict(json.loads(Path(args.target).read_text()))
        out["fidelity"] = fidelity(rho, target)
    if rho.trunc.modes == 2:
        out["negativity"] = negativity(rho)
    if args.probes:
        elements, _grid, _trunc = load_povm(args.probes)
        rng = np.random.default_rng(args.probe_seed)
        take = min(args.probe_count, len(elements))
        picks = rng.choice(len(elements), size=take, replace=False)
        out["entropy_probe"] = shannon_entropy_probe(rho, [elements[i] for i in picks])
    Path(args.out).write_text(json.dumps(out, indent=2))
    print(json.dumps(out))
    return EXIT_OK


def _cmd_run(args) -> int:
    doc = json.loads(Path(args.config).read_text())
    config = RunConfig.from_json_dict(doc)
    if args.print_config:
        print(json.dumps(config.to_json_dict(), indent=2))
        return EXIT_OK
    manifest = run(config, args.out_dir)
    print(json.dumps(manifest["metrics"]))
    if manifest["status"] == "infeasible":
        return EXIT_INFEASIBLE
    if manifest["status"] not in ("optimal",):
        return EXIT_NONOPTIMAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    doc = json.loads(Path(args.config).read_text())
    config = SweepConfig.from_json_dict(doc)
    rows = sweep(config, args.out_dir, jobs=args.jobs)
    for row in rows:
        print(f"size {row['subset_size']}: mean F = {row['mean_fidelity']:.4f} "
              f"+- {row['std_fidelity']:.4f} ({row['cells_failed']} failed)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvtomo",
        description="Continuous-variable tomography in a truncated Fock basis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-state", help="build a target state and write it as JSON")
    p.add_argument("--kind", required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_state)

    p = sub.add_parser("gen-povm", help="generate a measurement family")
    p.add_argument("--kind", choices=["quadrature", "coherent"], required=True)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--q-count", type=int, default=7)
    p.add_argument("--theta-count", type=int, default=5)
    p.add_argument("--q-min", type=float, default=-5.0)
    p.add_argument("--q-max", type=float, default=5.0)
    p.add_argument("--z-count", type=int, default=10)
    p.add_argument("--z-min", type=float, default=0.0)
    p.add_argument("--z-max", type=float, default=2.0)
    p.add_argument("--materialize", action="store_true",
                   help="store matrices instead of regenerating from coords")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_povm)

    p = sub.add_parser("simulate", help="measure a state over a POVM file")
    p.add_argument("--state", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--subset", type=int)
    p.add_argument("--subset-seed", type=int, default=0)
    p.add_argument("--no-noise", action="store_true")
    p.add_argument("--snr", type=float, default=10.0)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct-sdp", help="cone-program reconstruction")
    p.add_argument("--data", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--algorithm", default="ip", choices=["ip", "admm", "interior_point"])
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--epsilon-floor", type=float, default=1e-6)
    p.add_argument("--no-maxent", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct_sdp)

    p = sub.add_parser("reconstruct-irt", help="filtered back-projection baseline")
    p.add_argument("--sinogram", required=True)
    p.add_argument("--kc", type=float, default=4.0)
    p.add_argument("--grid", default="-5:0.1:5", help="q axis as start:step:stop")
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--out", required=True)
    p.add_argument("--rho-out")
    p.set_defaults(func=_cmd_reconstruct_irt)

    p = sub.add_parser("wigner", help="evaluate a Wigner function or slice")
    p.add_argument("--rho", required=True)
    p.add_argument("--grid", default="-5:0.1:5")
    p.add_argument("--plot-mode", type=int, default=1, choices=[1, 2])
    p.add_argument("--fixed-q", type=float, default=0.0)
    p.add_argument("--fixed-p", type=float, default=0.0)
    p.add_argument("--full", action="store_true",
                   help="write the full two-mode tensor instead of a slice")
    p.add_argument("--out", required=True)
    p.add_argument("--json-out")
    p.set_defaults(func=_cmd_wigner)

    p = sub.add_parser("metrics", help="evaluate fidelity/negativity/entropy")
    p.add_argument("--rho", required=True)
    p.add_argument("--target")
    p.add_argument("--probes", help="POVM file to draw entropy probes from")
    p.add_argument("--probe-count", type=int, default=10)
    p.add_argument("--probe-seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--print-config", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="fidelity vs measurement count")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TomographyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
