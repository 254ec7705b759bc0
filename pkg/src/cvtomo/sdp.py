"""Density-matrix reconstruction by semidefinite programming.

Given weighted measurement operators E_i and observed frequencies f_i, the
program finds the positive unit-trace state whose predictions sit inside
relative error bands around the data, with minimal total slack:

    min  sum_i Delta_i + delta
    s.t. |Tr(E_i rho) - f_i| <= Delta_i * max(f_i, eps)
         Tr((I - sum_i E_i) rho) <= delta          [maximum-entropy line]
         Delta_i >= 0, delta >= 0, Tr rho = 1, rho >= 0

The maximum-entropy slack delta penalizes probability mass that the
measured family cannot see, selecting the least committed compatible
state; solve_biased drops that line for comparison studies. Zero
frequencies keep a strictly feasible band through the epsilon floor.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._admm import admm_solve
from ._ipm import ConeProblem, ipm_solve
from .errors import DegenerateDataError, DimensionMismatchError, DomainError
from .fock import DensityMatrix, TruncationConfig
from .povm import POVMElement
from .simulate import MeasurementRecord

DEFAULT_EPSILON_FLOOR = 1e-6
ALGORITHMS = ("interior_point", "admm")
DEFAULT_MAX_ITERS = {"interior_point": 200, "admm": 50000}


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str = "interior_point"
    tol_primal: float = 1e-7
    tol_dual: float = 1e-7
    tol_gap: float = 1e-7
    max_iters: int | None = None  # backend default when None
    maxent: bool = True

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if min(self.tol_primal, self.tol_dual, self.tol_gap) <= 0:
            raise DomainError("solver tolerances must be positive")

    @property
    def iteration_cap(self) -> int:
        return self.max_iters if self.max_iters is not None else DEFAULT_MAX_ITERS[self.algorithm]


@dataclass(eq=False)
class TomographyProblem:
    dim: int
    elements: list[POVMElement]
    frequencies: np.ndarray
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR
    trunc: TruncationConfig | None = None

    def __post_init__(self) -> None:
        self.frequencies = np.asarray(self.frequencies, dtype=float).reshape(-1)
        if len(self.elements) != self.frequencies.size:
            raise DimensionMismatchError(
                f"{len(self.elements)} elements vs {self.frequencies.size} frequencies")
        if np.any(self.frequencies < 0):
            raise DomainError("frequencies must be non-negative")
        if self.epsilon_floor < 0:
            raise DomainError("epsilon_floor must be >= 0")

    @property
    def bands(self) -> np.ndarray:
        """Relative band radii g_i = max(f_i, epsilon_floor)."""
        return np.maximum(self.frequencies, self.epsilon_floor)


@dataclass(eq=False)
class ReconstructionResult:
    rho: DensityMatrix
    deltas: np.ndarray
    delta_maxent: float | None
    objective: float
    status: str                 # optimal | max_iters | infeasible
    iterations: int
    runtime_seconds: float
    diagnostics: dict = field(default_factory=dict)

    def digest(self) -> str:
        """SHA-256 of the state rounded to 1e-9, for determinism checks."""
        scaled = self.rho.entries / 1e-9
        quantized = np.stack([np.round(scaled.real), np.round(scaled.imag)]).astype(np.int64)
        return hashlib.sha256(quantized.tobytes()).hexdigest()


def _rank1_ket(matrix: np.ndarray, element_id: str) -> np.ndarray:
    """Recover v with v v^dag = matrix; raises if the element is not rank-1."""
    diag = np.real(np.diag(matrix))
    j = int(np.argmax(diag))
    top = diag[j]
    if top <= 0:
        raise DomainError(f"element {element_id} has a vanishing matrix")
    v = matrix[:, j] / np.sqrt(top)
    if np.max(np.abs(np.outer(v, v.conj()) - matrix)) > 1e-8 * max(top, 1.0):
        vals, vecs = np.linalg.eigh(matrix)
        v = vecs[:, -1] * np.sqrt(max(float(vals[-1]), 0.0))
        if np.max(np.abs(np.outer(v, v.conj()) - matrix)) > 1e-7 * max(top, 1.0):
            raise DomainError(f"element {element_id} is not a rank-1 projector")
    return v


def assemble(elements: Sequence[POVMElement], records: Sequence[MeasurementRecord],
             trunc: TruncationConfig,
             epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> TomographyProblem:
    """Join measurement operators with observed frequencies by element id."""
    if not records:
        raise DegenerateDataError(
            "no measurement records: the program cannot distinguish states")
    by_id = {el.id: el for el in elements}
    if len(by_id) != len(elements):
        raise DomainError("duplicate element ids in the measurement family")
    ordered, freqs = [], []
    for rec in records:
        el = by_id.get(rec.element_id)
        if el is None:
            raise DomainError(f"record {rec.element_id!r} has no matching element")
        ordered.append(el)
        freqs.append(rec.frequency)
    dim = ordered[0].matrix.shape[0]
    if trunc.total_dim != dim:
        raise DimensionMismatchError(
            f"truncation dimension {trunc.total_dim} != element dimension {dim}")
    return TomographyProblem(dim=dim, elements=ordered,
                             frequencies=np.asarray(freqs, dtype=float),
                             epsilon_floor=epsilon_floor, trunc=trunc)


def _cone_problem(problem: TomographyProblem, maxent: bool):
    """Build solver data; zero-frequency records are presolved exactly.

    For PSD rho and PSD E_i, a record with f_i = 0 contributes
    min Delta_i s.t. |Tr(E_i rho)| <= Delta_i eps, which is the linear
    objective term Tr(E_i rho)/eps with no constraint. Folding those
    records into the objective block keeps the band rows limited to
    informative outcomes.
    """
    n = problem.dim
    m = len(problem.elements)
    V_all = np.empty((n, m), dtype=complex)
    for i, el in enumerate(problem.elements):
        V_all[:, i] = np.sqrt(el.weight) * _rank1_ket(el.matrix, el.id)

    f = problem.frequencies
    g = problem.bands
    presolved = (f == 0.0) & (g > 0.0)
    active = ~presolved
    act_idx = np.flatnonzero(active)
    pre_idx = np.flatnonzero(presolved)

    V = V_all[:, act_idx]
    C = None
    if pre_idx.size:
        V0 = V_all[:, pre_idx] / np.sqrt(g[pre_idx])
        C = V0 @ V0.conj().T
        C = 0.5 * (C + C.conj().T)
    G = None
    if maxent:
        G = np.eye(n, dtype=complex) - V_all @ V_all.conj().T
        G = 0.5 * (G + G.conj().T)
    cone = ConeProblem(V=V, f=f[act_idx].copy(), g=g[act_idx].copy(),
                       maxent=maxent, C=C, G=G)
    return cone, act_idx, pre_idx


def _finalize(problem: TomographyProblem, config: SolverConfig, maxent: bool,
              raw, act_idx: np.ndarray, pre_idx: np.ndarray,
              runtime: float) -> ReconstructionResult:
    trunc = problem.trunc if problem.trunc is not None else TruncationConfig(problem.dim - 1, 1)
    X = 0.5 * (raw.X + raw.X.conj().T)
    trace = float(np.trace(X).real)
    if trace <= 0:
        raise DomainError("solver returned a non-normalizable iterate")
    X = X / trace
    vals, vecs = np.linalg.eigh(X)
    projection_distance = 0.0
    if vals[0] < 0.0:
        clipped = np.clip(vals, 0.0, None)
        Xp = (vecs * clipped) @ vecs.conj().T
        Xp /= float(np.trace(Xp).real)
        projection_distance = float(np.linalg.norm(Xp - X))
        X = Xp
    rho = DensityMatrix(X, trunc)

    m = len(problem.elements)
    m_active = act_idx.size
    deltas = np.zeros(m)
    deltas[act_idx] = raw.u[:m_active]
    for i in pre_idx:
        el = problem.elements[i]
        val = float(np.einsum("ij,ji->", el.matrix, X).real) * el.weight
        deltas[i] = max(0.0, val) / problem.bands[i]
    delta_maxent = float(raw.u[m_active]) if maxent else None

    e = np.array([float(np.einsum("ij,ji->", el.matrix, X).real) * el.weight
                  for el in problem.elements])
    band_violation = float(np.max(np.abs(e - problem.frequencies)
                                  - deltas * problem.bands, initial=-np.inf))
    diagnostics = {
        "residual_primal": raw.residual_primal,
        "residual_dual": raw.residual_dual,
        "rel_gap": raw.rel_gap,
        "mu": raw.mu,
        "projection_distance": projection_distance,
        "band_violation_max": band_violation,
        "algorithm": config.algorithm,
        "maxent": maxent,
    }
    return ReconstructionResult(
        rho=rho, deltas=deltas, delta_maxent=delta_maxent,
        objective=raw.objective, status=raw.status, iterations=raw.iterations,
        runtime_seconds=runtime, diagnostics=diagnostics)


def solve(problem: TomographyProblem,
          config: SolverConfig = SolverConfig()) -> ReconstructionResult:
    """Solve the reconstruction program with the configured backend."""
    maxent = config.maxent
    cone, act_idx, pre_idx = _cone_problem(problem, maxent)
    start = time.perf_counter()
    backend = ipm_solve if config.algorithm == "interior_point" else admm_solve
    raw = backend(cone, tol_primal=config.tol_primal, tol_dual=config.tol_dual,
                  tol_gap=config.tol_gap, max_iters=config.iteration_cap)
    runtime = time.perf_counter() - start
    return _finalize(problem, config, maxent, raw, act_idx, pre_idx, runtime)


def solve_biased(problem: TomographyProblem,
                 config: SolverConfig = SolverConfig()) -> ReconstructionResult:
    """Solve with the maximum-entropy line removed (biased variant)."""
    biased = SolverConfig(algorithm=config.algorithm, tol_primal=config.tol_primal,
                          tol_dual=config.tol_dual, tol_gap=config.tol_gap,
                          max_iters=config.max_iters, maxent=False)
    return solve(problem, biased)
