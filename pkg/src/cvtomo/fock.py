"""Truncated Fock-basis toolkit: wavefunctions, ladder operators, target
states, and state metrics (fidelity, negativity, probe entropy).

All operators are dimensionless (hbar = 1), so the oscillator length scale
is 1 and the position wavefunctions are

    psi_n(q) = (sqrt(pi) 2^n n!)^(-1/2) H_n(q) exp(-q^2/2).

Multi-mode objects are flattened row-major with mode 1 as the slow index:
the basis state |n1, n2> sits at flat index n1*d + n2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (DegenerateDataError, DimensionMismatchError, DomainError,
                     TruncationError)

HERMITE_MAX_N = 200

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_TOL = 1e-8

STATE_KINDS = ("noon", "hermite_gauss", "squeezed_vacuum", "dephased_cat",
               "fock", "coherent")


# --------------------------------------------------------------------------
# configuration and state containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationConfig:
    """Fock-space truncation: keep number states 0..cutoff_n on each mode."""

    cutoff_n: int = 10
    modes: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.cutoff_n, (int, np.integer)) or self.cutoff_n < 0:
            raise DomainError(f"cutoff_n must be a non-negative integer, got {self.cutoff_n}")
        if not isinstance(self.modes, (int, np.integer)) or self.modes < 1:
            raise DomainError(f"modes must be a positive integer, got {self.modes}")

    @property
    def dim(self) -> int:
        """Single-mode dimension d = cutoff_n + 1."""
        return self.cutoff_n + 1

    @property
    def total_dim(self) -> int:
        """Full Hilbert-space dimension d**modes."""
        return self.dim ** self.modes


@dataclass(frozen=True, eq=False)
class PureState:
    """Fock coefficients of a normalized pure state (flattened row-major)."""

    amplitudes: np.ndarray
    trunc: TruncationConfig

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.trunc.total_dim:
            raise DimensionMismatchError(
                f"amplitude vector has length {amps.size}, expected {self.trunc.total_dim}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-10:
            raise DomainError(f"pure state norm {norm} deviates from 1 by more than 1e-10")

    @property
    def dim(self) -> int:
        return self.trunc.total_dim

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.trunc)


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on the truncated Fock space."""

    entries: np.ndarray
    trunc: TruncationConfig
    discarded_weight: float = 0.0  # probability mass lost to truncation

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got shape {mat.shape}")
        if mat.shape[0] != self.trunc.total_dim:
            raise DimensionMismatchError(
                f"matrix dimension {mat.shape[0]} != truncation dimension {self.trunc.total_dim}")
        self.entries = mat

    @property
    def dim(self) -> int:
        return self.trunc.total_dim

    def validate(self, eig_tol: float = EIG_TOL) -> None:
        """Raise unless Hermitian, unit trace, and PSD within tolerances."""
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > HERMITICITY_TOL:
            raise DomainError(f"Hermiticity violation {herm:.3e} > {HERMITICITY_TOL}")
        tr = complex(np.trace(self.entries))
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace {tr} deviates from 1 by more than {TRACE_TOL}")
        min_eig = float(np.linalg.eigvalsh(self.entries)[0])
        if min_eig < -eig_tol:
            raise DomainError(f"minimum eigenvalue {min_eig:.3e} < -{eig_tol}")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def to_json_dict(self) -> dict:
        """JSON form: {dim, cutoff_n, modes, re, im} with row-major float arrays."""
        return {
            "dim": self.dim,
            "cutoff_n": self.trunc.cutoff_n,
            "modes": self.trunc.modes,
            "re": self.entries.real.reshape(-1).tolist(),
            "im": self.entries.imag.reshape(-1).tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DensityMatrix":
        trunc = TruncationConfig(cutoff_n=int(data["cutoff_n"]), modes=int(data["modes"]))
        dim = int(data["dim"])
        if dim != trunc.total_dim:
            raise DimensionMismatchError(f"dim field {dim} inconsistent with truncation {trunc}")
        mat = (np.asarray(data["re"], dtype=float) +
               1j * np.asarray(data["im"], dtype=float)).reshape(dim, dim)
        return cls(mat, trunc)


@dataclass(frozen=True)
class StateSpec:
    """Target-state recipe: a kind plus its real-valued parameters."""

    kind: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in STATE_KINDS:
            raise DomainError(f"unknown state kind {self.kind!r}; expected one of {STATE_KINDS}")
        object.__setattr__(self, "params", dict(self.params))
        if self.kind == "hermite_gauss":
            sp = float(self.params.get("sigma_plus", 1.0))
            sm = float(self.params.get("sigma_minus", 0.5))
            if sp <= 0 or sm <= 0:
                raise DomainError("hermite_gauss widths sigma_plus, sigma_minus must be > 0")
        if self.kind == "dephased_cat":
            p = float(self.params.get("p", 0.5))
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"dephasing probability p={p} must lie in [0, 1]")

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "StateSpec":
        return cls(kind=str(data["kind"]), params=dict(data.get("params", {})))


# --------------------------------------------------------------------------
# wavefunctions and elementary operators
# --------------------------------------------------------------------------

def hermite_basis(n_max: int, q: np.ndarray) -> np.ndarray:
    """All oscillator eigenfunctions psi_0..psi_n_max at the points q.

    Uses the normalized three-term recursion
        psi_{k+1} = sqrt(2/(k+1)) q psi_k - sqrt(k/(k+1)) psi_{k-1},
    which folds the (2^n n!)^(-1/2) prefactor into every step and therefore
    never overflows, unlike recursing on raw Hermite polynomials.

    Returns an array of shape (n_max + 1,) + q.shape.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max}")
    if n_max > HERMITE_MAX_N:
        raise DomainError(f"n_max={n_max} exceeds the supported maximum {HERMITE_MAX_N}")
    q = np.asarray(q, dtype=float)
    out = np.empty((n_max + 1,) + q.shape, dtype=float)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * q * q)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * q * out[0]
    for k in range(1, n_max):
        out[k + 1] = (math.sqrt(2.0 / (k + 1)) * q * out[k]
                      - math.sqrt(k / (k + 1.0)) * out[k - 1])
    return out


def hermite_wavefunction(n: int, q):
    """Oscillator eigenfunction psi_n(q); accepts scalar or array q."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if n > HERMITE_MAX_N:
        raise DomainError(f"n={n} exceeds the supported maximum {HERMITE_MAX_N}")
    values = hermite_basis(n, np.asarray(q, dtype=float))[n]
    if np.isscalar(q) or np.asarray(q).ndim == 0:
        return float(values)
    return values


def coherent_amplitudes(n_max: int, z: complex) -> np.ndarray:
    """Fock coefficients <n|z> = exp(-|z|^2/2) z^n / sqrt(n!) for n = 0..n_max."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    z = complex(z)
    out = np.empty(n_max + 1, dtype=complex)
    out[0] = math.exp(-0.5 * abs(z) ** 2)
    for k in range(n_max):
        out[k + 1] = out[k] * z / math.sqrt(k + 1.0)
    return out


def coherent_overlap(n: int, z: complex) -> complex:
    """Single Fock/coherent overlap <n|z>."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    return complex(coherent_amplitudes(n, z)[n])


def annihilation_matrix(trunc: TruncationConfig) -> np.ndarray:
    """Single-mode annihilation operator: a[m, n] = sqrt(n) delta_{m, n-1}."""
    d = trunc.dim
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def tensor_lift(single_mode_matrices: Sequence[np.ndarray],
                trunc: TruncationConfig | None = None) -> np.ndarray:
    """Kronecker product of per-mode operators, mode 1 slowest."""
    mats = [np.asarray(m) for m in single_mode_matrices]
    if not mats:
        raise DimensionMismatchError("tensor_lift needs at least one matrix")
    for m in mats:
        if m.ndim != 2 or m.shape != mats[0].shape or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("all matrices must be square and share one dimension")
    if trunc is not None:
        if len(mats) != trunc.modes:
            raise DimensionMismatchError(
                f"got {len(mats)} matrices for {trunc.modes} modes")
        if mats[0].shape[0] != trunc.dim:
            raise DimensionMismatchError(
                f"matrix dimension {mats[0].shape[0]} != single-mode dimension {trunc.dim}")
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


# --------------------------------------------------------------------------
# target states
# --------------------------------------------------------------------------

def _normalized(amps: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale to unit norm; return (vector, captured squared norm)."""
    captured = float(np.vdot(amps, amps).real)
    if captured <= 0.0:
        raise TruncationError("state has no support inside the truncated space")
    return amps / math.sqrt(captured), captured


def _noon_amplitudes(trunc: TruncationConfig) -> np.ndarray:
    if trunc.modes != 2:
        raise DomainError("the NOON target state is defined for exactly 2 modes")
    if trunc.cutoff_n < 1:
        raise TruncationError("NOON state needs cutoff_n >= 1")
    d = trunc.dim
    amps = np.zeros(d * d, dtype=complex)
    amps[1 * d + 0] = 1.0 / math.sqrt(2.0)
    amps[0 * d + 1] = 1.0 / math.sqrt(2.0)
    return amps


def _squeezed_vacuum_amplitudes(zeta: float, trunc: TruncationConfig) -> np.ndarray:
    if trunc.modes != 2:
        raise DomainError("the two-mode squeezed vacuum needs exactly 2 modes")
    d = trunc.dim
    lam = math.tanh(zeta)
    amps = np.zeros(d * d, dtype=complex)
    pref = math.sqrt(max(0.0, 1.0 - lam * lam)) if abs(lam) < 1 else 0.0
    for n in range(d):
        amps[n * d + n] = pref * lam ** n
    return amps


HG_QUADRATURE_ORDER = 80
# Minimum fraction of the continuous norm the truncated projection must keep.
# The reference two-mode state (n=1, sigma_plus=1, sigma_minus=0.5) loses
# 1.95e-4 to the n=10 cutoff, so the bar sits at 1e-3.
HG_MIN_CAPTURED = 1.0 - 1e-3


def _hermite_gauss_amplitudes(n: int, sigma_plus: float, sigma_minus: float,
                              trunc: TruncationConfig,
                              min_captured: float = HG_MIN_CAPTURED) -> np.ndarray:
    """Project the correlated Hermite-Gauss wavepacket onto the Fock grid.

    In rotated coordinates u = (q1+q2)/sqrt2, v = (q1-q2)/sqrt2 the
    wavefunction factorizes into unit-norm oscillator modes of widths
    sigma_plus (order n) and sigma_minus (order 0), so a tensor
    Gauss-Hermite rule in (u, v) evaluates every Fock overlap at once.
    """
    if trunc.modes != 2:
        raise DomainError("the Hermite-Gauss target state needs exactly 2 modes")
    d = trunc.dim
    nodes, weights = np.polynomial.hermite.hermgauss(HG_QUADRATURE_ORDER)
    # plain-integration weights: w_k exp(x_k^2)
    wexp = weights * np.exp(nodes * nodes)

    uu, vv = np.meshgrid(nodes, nodes, indexing="ij")
    q1 = ((uu + vv) / math.sqrt(2.0)).reshape(-1)
    q2 = ((uu - vv) / math.sqrt(2.0)).reshape(-1)
    psi1 = hermite_basis(trunc.cutoff_n, q1)          # (d, K)
    psi2 = hermite_basis(trunc.cutoff_n, q2)          # (d, K)

    phi_u = hermite_basis(n, nodes / sigma_plus)[n] / math.sqrt(sigma_plus)
    phi_v = hermite_basis(0, nodes / sigma_minus)[0] / math.sqrt(sigma_minus)
    cell = ((phi_u * wexp)[:, None] * (phi_v * wexp)[None, :]).reshape(-1)

    coeff = (psi1 * cell[None, :]) @ psi2.T           # (d, d), real
    amps = coeff.astype(complex).reshape(-1)
    captured = float(np.vdot(amps, amps).real)        # continuous norm is 1
    if captured < min_captured:
        raise TruncationError(
            f"Hermite-Gauss projection keeps only {captured:.8f} of the norm; "
            f"cutoff_n={trunc.cutoff_n} is too small for sigma_plus={sigma_plus}, "
            f"sigma_minus={sigma_minus}")
    return amps


def _coherent_product_vector(z: complex, trunc: TruncationConfig) -> np.ndarray:
    single = coherent_amplitudes(trunc.cutoff_n, z)
    out = single
    for _ in range(trunc.modes - 1):
        out = np.kron(out, single)
    return out


def _dephased_cat_density(alpha: float, p: float, trunc: TruncationConfig) -> tuple[np.ndarray, float]:
    if trunc.modes != 2:
        raise DomainError("the dephased-cat target state needs exactly 2 modes")
    plus = _coherent_product_vector(complex(alpha), trunc)
    minus = _coherent_product_vector(complex(-alpha), trunc)
    rho = (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj())
           - (1.0 - p) * (np.outer(plus, minus.conj()) + np.outer(minus, plus.conj())))
    trace = float(np.trace(rho).real)
    # exact untruncated trace for the discarded-weight diagnostic
    overlap = math.exp(-4.0 * abs(alpha) ** 2)
    trace_exact = 2.0 - 2.0 * (1.0 - p) * overlap
    return rho / trace, max(0.0, 1.0 - trace / trace_exact)


def build_state(spec: StateSpec, trunc: TruncationConfig) -> DensityMatrix:
    """Construct a target state in the truncated basis, renormalized to unit trace.

    Pure recipes (noon, hermite_gauss, squeezed_vacuum, fock, coherent)
    yield rank-1 matrices; dephased_cat is rank 2 for 0 < p <= 1.
    """
    kind = spec.kind
    params = spec.params

    if kind == "noon":
        amps = _noon_amplitudes(trunc)
    elif kind == "squeezed_vacuum":
        amps = _squeezed_vacuum_amplitudes(float(params.get("zeta", 0.2)), trunc)
    elif kind == "hermite_gauss":
        amps = _hermite_gauss_amplitudes(
            int(params.get("n", 1)),
            float(params.get("sigma_plus", 1.0)),
            float(params.get("sigma_minus", 0.5)),
            trunc)
    elif kind == "fock":
        ns = params.get("n", 0)
        if isinstance(ns, (int, np.integer)):
            ns = [int(ns)] * trunc.modes if trunc.modes == 1 else None
            if ns is None:
                raise DomainError("for multi-mode fock states pass n as a per-mode list")
        ns = [int(v) for v in ns]
        if len(ns) != trunc.modes:
            raise DomainError(f"fock occupation list has length {len(ns)}, expected {trunc.modes}")
        if any(v < 0 or v > trunc.cutoff_n for v in ns):
            raise TruncationError(f"fock occupations {ns} exceed cutoff_n={trunc.cutoff_n}")
        amps = np.zeros(trunc.total_dim, dtype=complex)
        flat = 0
        for v in ns:
            flat = flat * trunc.dim + v
        amps[flat] = 1.0
    elif kind == "coherent":
        z = complex(float(params.get("z_re", 0.0)), float(params.get("z_im", 0.0)))
        amps = _coherent_product_vector(z, trunc)
    elif kind == "dephased_cat":
        rho, discarded = _dephased_cat_density(
            float(params.get("alpha", 1.0)), float(params.get("p", 0.5)), trunc)
        return DensityMatrix(rho, trunc, discarded_weight=discarded)
    else:  # pragma: no cover - guarded by StateSpec
        raise DomainError(f"unhandled state kind {kind!r}")

    unit, captured = _normalized(amps)
    rho = np.outer(unit, unit.conj())
    return DensityMatrix(rho, trunc, discarded_weight=max(0.0, 1.0 - captured))


# --------------------------------------------------------------------------
# state metrics
# --------------------------------------------------------------------------

def negativity(rho: DensityMatrix) -> float:
    """Entanglement negativity (||rho^T1||_1 - 1) / 2 for a two-mode state."""
    if rho.trunc.modes != 2:
        raise DomainError("negativity requires exactly 2 modes (bipartition undefined otherwise)")
    d = rho.trunc.dim
    four = rho.entries.reshape(d, d, d, d)          # [m1, m2, n1, n2]
    pt = four.transpose(2, 1, 0, 3).reshape(d * d, d * d)
    eigs = np.linalg.eigvalsh(pt)
    return max(0.0, float((np.sum(np.abs(eigs)) - 1.0) / 2.0))


def _principal_vector(mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Largest eigenpair plus the second eigenvalue (for rank-1 detection)."""
    vals, vecs = np.linalg.eigh(mat)
    return vecs[:, -1], float(vals[-2]) if mat.shape[0] > 1 else 0.0


def fidelity(rho: DensityMatrix, sigma: DensityMatrix, psd_tol: float = EIG_TOL) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Rank-1 inputs are special-cased as <psi|rho|psi>, which is both faster
    and better conditioned than the general matrix square roots.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dimension mismatch {rho.dim} != {sigma.dim}")
    for name, state in (("rho", rho), ("sigma", sigma)):
        min_eig = float(np.linalg.eigvalsh(state.entries)[0])
        if min_eig < -psd_tol:
            raise DomainError(f"{name} is not PSD: minimum eigenvalue {min_eig:.3e}")

    for pure, mixed in ((sigma, rho), (rho, sigma)):
        vec, second = _principal_vector(pure.entries)
        if abs(second) <= 1e-12:
            val = float(np.real(np.vdot(vec, mixed.entries @ vec)))
            return min(max(val, 0.0), 1.0 + 1e-8)

    vals, vecs = np.linalg.eigh(rho.entries)
    sqrt_rho = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    inner = sqrt_rho @ sigma.entries @ sqrt_rho
    inner_vals = np.linalg.eigvalsh(inner)
    # roundoff-scale eigenvalues would contribute sqrt(eps) each; drop them
    floor = max(float(inner_vals[-1]), 0.0) * 1e-14
    inner_vals = np.where(inner_vals > floor, inner_vals, 0.0)
    val = float(np.sum(np.sqrt(inner_vals)) ** 2)
    return min(max(val, 0.0), 1.0 + 1e-8)


def shannon_entropy_probe(rho: DensityMatrix, probes: Sequence, log_base: float = 10.0) -> float:
    """Shannon entropy of the normalized expectation vector over probe operators.

    Each probe must expose ``weight`` and ``matrix`` attributes; the raw
    values weight * Tr(rho matrix) are normalized to sum to one and the
    entropy is taken in the given logarithm base. Zero entries contribute 0.
    """
    if not probes:
        raise DegenerateDataError("probe list is empty")
    raw = []
    for probe in probes:
        val = float(np.einsum("ij,ji->", rho.entries, probe.matrix).real) * float(probe.weight)
        raw.append(max(val, 0.0))
    total = float(np.sum(raw))
    if total <= 0.0:
        raise DegenerateDataError("all probe expectations vanish; normalization undefined")
    p = np.asarray(raw) / total
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz) / math.log(log_base)))
