"""Filtered back-projection baseline for single-mode tomography.

The quadrature distribution pr(q, theta) = <q_theta| rho |q_theta> is the
Radon transform of the Wigner function; the inverse transform

    W(q, p) = 1/(2 pi^2) Int pr(x, theta) K(q cos t + p sin t - x) dx dt

uses the regularized ramp kernel K with frequency cutoff k_c,

    K(x) = (cos(k_c x) - 1)/x^2 + k_c sin(k_c x)/x,

the exact value of (1/2) Int_{-k_c}^{k_c} |xi| e^{i xi x} dxi. Sparse data
produces gross artifacts and non-physical density matrices; that failure
mode is the point of keeping this baseline next to the cone-program
reconstruction, so the extracted matrix is deliberately NOT projected back
to the PSD cone.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DimensionMismatchError, DomainError
from .fock import DensityMatrix, TruncationConfig, hermite_basis
from .wigner import PhaseSpaceGrid, wigner_kernel


@dataclass(frozen=True)
class KernelConfig:
    """Frequency cutoff of the regularized ramp filter."""

    cutoff_kc: float = 4.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.cutoff_kc) or self.cutoff_kc <= 0:
            raise DomainError(f"cutoff_kc must be positive and finite, got {self.cutoff_kc}")


@dataclass(eq=False)
class Sinogram:
    """Quadrature outcome densities pr(q, theta) on a rectangular grid."""

    q_axis: np.ndarray
    theta_axis: np.ndarray
    values: np.ndarray  # shape (len(q_axis), len(theta_axis))

    def __post_init__(self) -> None:
        self.q_axis = np.asarray(self.q_axis, dtype=float).reshape(-1)
        self.theta_axis = np.asarray(self.theta_axis, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.q_axis.size, self.theta_axis.size):
            raise DimensionMismatchError(
                f"sinogram shape {self.values.shape} does not match axes")
        if np.min(self.values) < -1e-12:
            raise DomainError("quadrature densities must be non-negative")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [f"{t:.12g}" for t in self.theta_axis])
            for qi, q in enumerate(self.q_axis):
                writer.writerow([f"{q:.12g}"] + [f"{v:.12g}" for v in self.values[qi]])

    @classmethod
    def from_csv(cls, path) -> "Sinogram":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        theta_axis = np.array([float(x) for x in rows[0][1:]])
        q_axis = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        return cls(q_axis=q_axis, theta_axis=theta_axis, values=values)


def sinogram(rho: DensityMatrix, q_axis, theta_axis) -> Sinogram:
    """Exact quadrature densities of a single-mode state."""
    if rho.trunc.modes != 1:
        raise DomainError("the back-projection baseline is single-mode only")
    q_axis = np.asarray(q_axis, dtype=float)
    theta_axis = np.asarray(theta_axis, dtype=float)
    d = rho.trunc.dim
    psis = hermite_basis(rho.trunc.cutoff_n, q_axis)          # (d, nq)
    phases = np.exp(1j * np.outer(np.arange(d), theta_axis))  # <n|q_theta> phases
    # pr(q, t) = sum_mn conj(k_m) rho_mn k_n with k_n = psi_n(q) e^{i n t}
    vals = np.einsum("mq,mt,mn,nq,nt->qt", psis, phases.conj(), rho.entries,
                     psis, phases, optimize=True)
    resid = float(np.max(np.abs(vals.imag)))
    if resid > 1e-10:
        raise DomainError(f"sinogram has imaginary residue {resid:.3e}")
    vals = np.clip(vals.real, 0.0, None)
    return Sinogram(q_axis=q_axis, theta_axis=theta_axis, values=vals)


def irt_kernel(x, cfg: KernelConfig = KernelConfig()):
    """Regularized back-projection kernel; even in x, K(0) = k_c^2 / 2."""
    kc = cfg.cutoff_kc
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6 / kc
    xs = x[~small]
    out[~small] = (np.cos(kc * xs) - 1.0) / (xs * xs) + kc * np.sin(kc * xs) / xs
    # series limit around zero keeps the kernel continuous
    out[small] = kc * kc / 2.0 - (kc ** 4) * x[small] ** 2 / 8.0
    return float(out[0]) if scalar else out


def _trapezoid_weights(axis: np.ndarray) -> np.ndarray:
    if axis.size < 2:
        return np.ones(axis.size)
    step = axis[1] - axis[0]
    w = np.full(axis.size, step)
    w[0] = w[-1] = step / 2.0
    return w


def inverse_radon(sino: Sinogram, cfg: KernelConfig, out_grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    """Filtered back-projection of a sinogram onto the output grid.

    The output is a plain numerical image of the Wigner function; for sparse
    sinograms it carries artifacts and need not correspond to any physical
    state.
    """
    for axis in (sino.q_axis, sino.theta_axis):
        steps = np.diff(axis)
        if steps.size and np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
            raise DomainError("inverse_radon needs uniform sinogram axes")
    wq = _trapezoid_weights(sino.q_axis)
    wt = _trapezoid_weights(sino.theta_axis)

    qq, pp = np.meshgrid(out_grid.q_axis, out_grid.p_axis, indexing="ij")
    out = np.zeros(qq.shape)
    for ti, theta in enumerate(sino.theta_axis):
        proj = qq * math.cos(theta) + pp * math.sin(theta)       # (nq_out, np_out)
        args = proj[..., None] - sino.q_axis[None, None, :]
        kern = irt_kernel(args.reshape(-1), cfg).reshape(args.shape)
        out += wt[ti] * np.einsum("qpk,k->qp", kern, wq * sino.values[:, ti])
    out /= 2.0 * math.pi ** 2
    return PhaseSpaceGrid(q_axis=out_grid.q_axis, p_axis=out_grid.p_axis, values=out)


def density_from_wigner(grid: PhaseSpaceGrid, trunc: TruncationConfig) -> np.ndarray:
    """Fock-basis matrix extracted from a Wigner image by basis overlaps.

    rho_mn = 2 pi sum W(q,p) W_{|n><m|}(q,p) dq dp over the grid. The result
    is Hermitized but deliberately not projected to the PSD cone, so the
    baseline's non-physical outputs stay visible.
    """
    if trunc.modes != 1:
        raise DomainError("density extraction is single-mode only")
    if grid.dq > 0.2 + 1e-12 or grid.dp > 0.2 + 1e-12:
        raise AccuracyError(
            f"grid spacing ({grid.dq:.3f}, {grid.dp:.3f}) too coarse; need <= 0.2")
    if max(np.abs(grid.q_axis).max(), np.abs(grid.p_axis).max()) < 5.0 - 1e-9:
        raise AccuracyError("grid must cover |q|, |p| <= 5 for cutoff 10 states")
    d = trunc.dim
    qq, pp = np.meshgrid(grid.q_axis, grid.p_axis, indexing="ij")
    cell = grid.dq * grid.dp
    rho = np.empty((d, d), dtype=complex)
    for m in range(d):
        for n in range(m, d):
            kern = wigner_kernel(n, m, qq, pp)
            val = 2.0 * math.pi * cell * np.sum(grid.values * kern)
            rho[m, n] = val
            rho[n, m] = np.conj(val)
    return 0.5 * (rho + rho.conj().T)
