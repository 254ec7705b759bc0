"""ADMM backend for the tomography cone program.

Splits the problem between its affine polytope {A x = b} (projected by a
precomputed least-squares solve of the Gram system) and the product cone
PSD x orthant (projected by eigenvalue clipping / max(0, .)). Slower than
the interior-point backend but memory-light; intended for small problems
or as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ipm import ConeProblem, IPMResult


@dataclass
class _Point:
    X: np.ndarray
    u: np.ndarray

    def copy(self) -> "_Point":
        return _Point(self.X.copy(), self.u.copy())


def _gram(prob: ConeProblem) -> np.ndarray:
    """A A^T of the constraint map, assembled from rank-1 structure."""
    return prob.schur(np.eye(prob.n, dtype=complex), np.ones(prob.k))


def _project_affine(prob: ConeProblem, chol, pt: _Point) -> _Point:
    resid = prob.apply_psd(pt.X) + prob.apply_lin(pt.u) - prob.b
    lam = chol(resid)
    X = pt.X - prob.adjoint_psd(lam)
    return _Point(0.5 * (X + X.conj().T), pt.u - prob.adjoint_lin(lam))


def _project_cone(pt: _Point) -> _Point:
    vals, vecs = np.linalg.eigh(pt.X)
    X = (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T
    return _Point(0.5 * (X + X.conj().T), np.clip(pt.u, 0.0, None))


def admm_solve(prob: ConeProblem, tol_primal: float = 1e-7, tol_dual: float = 1e-7,
               tol_gap: float = 1e-7, max_iters: int = 50000,
               penalty: float = 1.0) -> IPMResult:
    n, k = prob.n, prob.k
    gram = _gram(prob)
    gram += 1e-12 * np.mean(np.diag(gram)) * np.eye(prob.p)
    L = np.linalg.cholesky(gram)

    def chol_solve(r):
        return np.linalg.solve(L.conj().T, np.linalg.solve(L, r))

    c_over = _Point(prob.C / penalty, prob.c_lin / penalty)
    x = _Point(np.eye(n, dtype=complex) / n, np.ones(k))
    z = x.copy()
    lam = _Point(np.zeros((n, n), dtype=complex), np.zeros(k))

    scale = float(np.sqrt(n * n + k))
    status = "max_iters"
    it = 0
    res_p = res_d = np.inf
    for it in range(1, max_iters + 1):
        x = _project_affine(prob, chol_solve, _Point(
            z.X - lam.X - c_over.X, z.u - lam.u - c_over.u))
        z_prev = z
        z = _project_cone(_Point(x.X + lam.X, x.u + lam.u))
        lam = _Point(lam.X + x.X - z.X, lam.u + x.u - z.u)

        if it % 25 == 0 or it == max_iters:
            res_p = (np.linalg.norm(x.X - z.X) + np.linalg.norm(x.u - z.u)) / scale
            res_d = penalty * (np.linalg.norm(z.X - z_prev.X)
                               + np.linalg.norm(z.u - z_prev.u)) / scale
            if res_p <= tol_primal and res_d <= tol_dual:
                status = "optimal"
                break

    pobj = float(prob.c_lin @ z.u) + float(np.vdot(prob.C, z.X).real)
    # affine residual of the cone-feasible iterate, for honest reporting
    aff = prob.apply_psd(z.X) + prob.apply_lin(z.u) - prob.b
    res_aff = float(np.linalg.norm(aff)) / (1.0 + float(np.linalg.norm(prob.b)))
    return IPMResult(X=z.X, u=z.u, y=np.zeros(prob.p), status=status,
                     iterations=it, objective=pobj,
                     residual_primal=max(res_p if np.isfinite(res_p) else 0.0, res_aff),
                     residual_dual=res_d if np.isfinite(res_d) else 0.0,
                     rel_gap=res_d if np.isfinite(res_d) else 0.0, mu=0.0)
