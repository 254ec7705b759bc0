"""Wigner functions of truncated-Fock states on phase-space grids.

The basis kernel W_{|m><n|}(q, p) is evaluated in closed form through
associated Laguerre polynomials in z = q + ip (hbar = 1, so the vacuum
peaks at 1/pi and every single-mode Wigner function obeys |W| <= 1/pi):

    n >= m:  W_{mn} = (-1)^m/pi sqrt(m!/n!) (sqrt2 z)^(n-m)
                      L_m^{n-m}(2|z|^2) exp(-|z|^2)
    n <  m:  complex conjugate of W_{nm}.

A density matrix then evaluates as W(q,p) = sum_mn rho_mn W_{mn}... with
the index order fixed so that coherent |z0> peaks at (q, p) =
(sqrt2 Re z0, sqrt2 Im z0). Two-mode states are exposed as slices: one
mode's phase-space plane is scanned while the other mode sits at fixed
coordinates.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .fock import DensityMatrix

WIGNER_BOUND_TOL = 1e-6


@dataclass(eq=False)
class PhaseSpaceGrid:
    """Rectangular (q, p) grid carrying Wigner values W[i, j] = W(q_i, p_j)."""

    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    mode_slice: tuple | None = None  # fixed (q, p) of the non-plotted mode

    def __post_init__(self) -> None:
        self.q_axis = np.asarray(self.q_axis, dtype=float).reshape(-1)
        self.p_axis = np.asarray(self.p_axis, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.q_axis.size, self.p_axis.size):
            raise DimensionMismatchError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.q_axis.size}, {self.p_axis.size})")
        for axis in (self.q_axis, self.p_axis):
            if axis.size > 1:
                steps = np.diff(axis)
                if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
                    raise DomainError("phase-space axes must be uniform")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Wigner values must be finite")

    @property
    def dq(self) -> float:
        return float(self.q_axis[1] - self.q_axis[0]) if self.q_axis.size > 1 else 1.0

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0]) if self.p_axis.size > 1 else 1.0

    def integral(self) -> float:
        """Plain Riemann sum of the carried values."""
        return float(np.sum(self.values) * self.dq * self.dp)

    def check_bound(self, modes: int = 1) -> None:
        bound = (1.0 / math.pi) ** modes + WIGNER_BOUND_TOL
        peak = float(np.max(np.abs(self.values)))
        if peak > bound:
            raise DomainError(f"|W| reaches {peak:.6f}, above the {bound:.6f} bound")

    # -- file formats -------------------------------------------------------
    def to_csv(self, path) -> None:
        """First row = p axis, first column = q axis, body = W values."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [f"{p:.12g}" for p in self.p_axis])
            for qi, q in enumerate(self.q_axis):
                writer.writerow([f"{q:.12g}"] + [f"{v:.12g}" for v in self.values[qi]])

    @classmethod
    def from_csv(cls, path) -> "PhaseSpaceGrid":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        p_axis = np.array([float(x) for x in rows[0][1:]])
        q_axis = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        return cls(q_axis=q_axis, p_axis=p_axis, values=values)

    def to_json(self, path, extra: dict | None = None) -> None:
        doc = {"q_axis": self.q_axis.tolist(), "p_axis": self.p_axis.tolist(),
               "values": self.values.tolist(), "mode_slice": self.mode_slice}
        if extra:
            doc.update(extra)
        Path(path).write_text(json.dumps(doc))


def _laguerre(k: int, alpha: int, x: np.ndarray) -> np.ndarray:
    """Associated Laguerre L_k^alpha(x) by the three-term recursion."""
    out0 = np.ones_like(x)
    if k == 0:
        return out0
    out1 = 1.0 + alpha - x
    for j in range(1, k):
        out0, out1 = out1, ((2 * j + 1 + alpha - x) * out1 - (j + alpha) * out0) / (j + 1)
    return out1


def wigner_kernel(m: int, n: int, q, p):
    """Wigner transform of |m><n| at (q, p); complex for m != n.

    Matches (1/2pi) Int psi_m(q - v/2) psi_n(q + v/2) e^{ivp} dv.
    """
    if m < 0 or n < 0:
        raise DomainError("Fock indices must be non-negative")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    scalar = q.ndim == 0 and p.ndim == 0
    if m > n:
        return np.conj(wigner_kernel(n, m, q, p))
    z = q + 1j * p
    r2 = 2.0 * (q * q + p * p)
    log_ratio = 0.5 * (math.lgamma(m + 1) - math.lgamma(n + 1))
    pref = ((-1.0) ** m / math.pi) * math.exp(log_ratio)
    val = pref * (math.sqrt(2.0) * z) ** (n - m) * _laguerre(m, n - m, r2) * np.exp(-0.5 * r2)
    return complex(val) if scalar else val


def wigner_grid(rho: DensityMatrix, q_axis, p_axis) -> PhaseSpaceGrid:
    """Single-mode Wigner function on the product grid q_axis x p_axis."""
    if rho.trunc.modes != 1:
        raise DomainError("wigner_grid needs a single-mode state; "
                          "use wigner_two_mode_slice for two modes")
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    qq, pp = np.meshgrid(q_axis, p_axis, indexing="ij")
    d = rho.trunc.dim
    total = np.zeros(qq.shape, dtype=complex)
    for m in range(d):
        for n in range(d):
            coeff = rho.entries[m, n]
            if coeff == 0:
                continue
            total += coeff * wigner_kernel(n, m, qq, pp)
    resid = float(np.max(np.abs(total.imag)))
    if resid > 1e-10:
        raise DomainError(f"Wigner evaluation left imaginary residue {resid:.3e}")
    return PhaseSpaceGrid(q_axis=q_axis, p_axis=p_axis, values=total.real)


FULL_TENSOR_POINT_CAP = 2_000_000


def wigner_four_dim(rho: DensityMatrix, q_axis, p_axis) -> np.ndarray:
    """Full W(q1, p1, q2, p2) tensor of a two-mode state on shared axes.

    Memory grows with the fourth power of the axis length, so the evaluation
    refuses grids beyond a couple of million points; slices cover the
    plotting use cases.
    """
    if rho.trunc.modes != 2:
        raise DomainError("wigner_four_dim needs exactly two modes")
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    points = (q_axis.size * p_axis.size) ** 2
    if points > FULL_TENSOR_POINT_CAP:
        raise DomainError(f"full tensor would hold {points} points; "
                          f"cap is {FULL_TENSOR_POINT_CAP}")
    d = rho.trunc.dim
    qq, pp = np.meshgrid(q_axis, p_axis, indexing="ij")
    kernels = np.empty((d, d, q_axis.size, p_axis.size), dtype=complex)
    for m in range(d):
        for n in range(d):
            kernels[m, n] = wigner_kernel(n, m, qq, pp)
    four = rho.entries.reshape(d, d, d, d)
    out = np.einsum("abcd,acqp,bdrs->qprs", four, kernels, kernels, optimize=True)
    resid = float(np.max(np.abs(out.imag)))
    if resid > 1e-9:
        raise DomainError(f"full Wigner tensor left imaginary residue {resid:.3e}")
    return out.real


def wigner_two_mode_slice(rho: DensityMatrix, plot_mode: int, fixed: tuple[float, float],
                          q_axis, p_axis) -> PhaseSpaceGrid:
    """Wigner slice of a two-mode state over one mode's (q, p) plane.

    The other mode is pinned at the given coordinates; peak magnitudes fall
    like the product of single-mode bounds, 1/pi^2.
    """
    if rho.trunc.modes != 2:
        raise DomainError("wigner_two_mode_slice needs exactly two modes")
    if plot_mode not in (1, 2):
        raise DomainError("plot_mode must be 1 or 2")
    fq, fp = float(fixed[0]), float(fixed[1])
    if abs(fq) > 8.0 or abs(fp) > 8.0:
        raise DomainError("fixed coordinates beyond |q|,|p| <= 8 underflow the kernels")
    d = rho.trunc.dim
    four = rho.entries.reshape(d, d, d, d)      # [m1, m2, n1, n2]

    # contract the fixed mode first, leaving an effective single-mode matrix
    kern_fixed = np.empty((d, d), dtype=complex)
    for mm in range(d):
        for nn in range(d):
            kern_fixed[mm, nn] = wigner_kernel(nn, mm, fq, fp)
    if plot_mode == 1:
        eff = np.einsum("abcd,bd->ac", four, kern_fixed)
    else:
        eff = np.einsum("abcd,ac->bd", four, kern_fixed)

    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    qq, pp = np.meshgrid(q_axis, p_axis, indexing="ij")
    total = np.zeros(qq.shape, dtype=complex)
    for m in range(d):
        for n in range(d):
            coeff = eff[m, n]
            if abs(coeff) == 0:
                continue
            total += coeff * wigner_kernel(n, m, qq, pp)
    resid = float(np.max(np.abs(total.imag)))
    if resid > 1e-10:
        raise DomainError(f"Wigner slice left imaginary residue {resid:.3e}")
    return PhaseSpaceGrid(q_axis=q_axis, p_axis=p_axis, values=total.real,
                          mode_slice=(fq, fp))
