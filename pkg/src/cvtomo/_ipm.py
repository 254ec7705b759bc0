"""Primal-dual path-following interior-point solver for the tomography cone
program.

The program couples one complex-Hermitian PSD block X (the state) with a
nonnegative linear block u = [Delta, (delta), s+, s-, (t)]:

    min  <C, X> + sum(Delta) (+ delta)
    s.t. Tr(X) = 1
         Tr(Etil_i X) - g_i Delta_i + s+_i = f_i        (upper band)
        -Tr(Etil_i X) - g_i Delta_i + s-_i = -f_i       (lower band)
         <G, X> - delta + t = 0          [maxent only]
         X >= 0 (PSD),  u >= 0

where Etil_i = w_i v_i v_i^dag are weighted rank-1 measurement operators.
Records whose observed frequency is zero never enter as band rows: for PSD
X and PSD Etil_i the pair |Tr(Etil_i X)| <= Delta_i g_i with cost Delta_i
is exactly the linear objective term Tr(Etil_i X)/g_i, which the caller
folds into C. That presolve step removes the epsilon-width bands that
would otherwise wreck the conditioning of noisy datasets.

Rank-1 structure collapses every Schur inner product
Tr(Etil_i W Etil_j W) to |(V^dag W V)_ij|^2 with V = [sqrt(w_i) v_i], so
one n x m product per iteration replaces the usual O(m n^3) assembly.

The method is Mehrotra-flavoured: an affine predictor fixes the centering
parameter sigma = (mu_aff/mu)^3, and the combined step carries
second-order corrections in both blocks (symmetrized against Z^{-1} in the
PSD block). Primal and dual move with one common step length under a 0.99
fraction-to-boundary rule, with a recentering fallback when the step
collapses. The Hermitian PSD cone is handled directly in complex
arithmetic (n x n eigendecompositions), i.e. the real symmetric embedding
of the complex cone without the 2n x 2n blow-up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FRACTION_TO_BOUNDARY = 0.99
DUAL_BLOWUP = 1e9  # dual objective beyond this flags primal infeasibility


@dataclass
class ConeProblem:
    """Structured data of one tomography program."""

    V: np.ndarray            # n x m complex, columns sqrt(w_i) v_i (band rows)
    f: np.ndarray            # observed frequencies, length m
    g: np.ndarray            # band radii max(f_i, eps), length m
    maxent: bool
    C: np.ndarray | None = None   # Hermitian objective block (presolved records)
    G: np.ndarray | None = None   # I - sum of ALL measured operators (maxent)

    def __post_init__(self) -> None:
        self.n = self.V.shape[0]
        self.m = self.V.shape[1]
        n, m = self.n, self.m
        if self.C is None:
            self.C = np.zeros((n, n), dtype=complex)
        if self.maxent and self.G is None:
            raise ValueError("maxent problems need the gap operator G")
        self.k = 3 * m + 2 if self.maxent else 3 * m
        self.p = 2 * m + 2 if self.maxent else 2 * m + 1
        # linear block layout
        self.i_delta = slice(0, m)
        if self.maxent:
            self.i_dmax = m
            self.i_sp = slice(m + 1, 2 * m + 1)
            self.i_sm = slice(2 * m + 1, 3 * m + 1)
            self.i_t = 3 * m + 1
        else:
            self.i_sp = slice(m, 2 * m)
            self.i_sm = slice(2 * m, 3 * m)
        # equality row layout
        self.r_plus = slice(1, m + 1)
        self.r_minus = slice(m + 1, 2 * m + 1)
        self.r_dmax = 2 * m + 1 if self.maxent else None

        self.b = np.zeros(self.p)
        self.b[0] = 1.0
        self.b[self.r_plus] = self.f
        self.b[self.r_minus] = -self.f
        self.c_lin = np.zeros(self.k)
        self.c_lin[self.i_delta] = 1.0
        if self.maxent:
            self.c_lin[self.i_dmax] = 1.0

    # -- linear maps -------------------------------------------------------
    def expectations(self, X: np.ndarray) -> np.ndarray:
        """Tr(Etil_i X) for all band rows."""
        return np.real(np.sum(self.V.conj() * (X @ self.V), axis=0))

    def apply_psd(self, X: np.ndarray) -> np.ndarray:
        e = self.expectations(X)
        out = np.zeros(self.p)
        out[0] = float(np.trace(X).real)
        out[self.r_plus] = e
        out[self.r_minus] = -e
        if self.maxent:
            out[self.r_dmax] = float(np.vdot(self.G, X).real)
        return out

    def apply_lin(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros(self.p)
        out[self.r_plus] = -self.g * u[self.i_delta] + u[self.i_sp]
        out[self.r_minus] = -self.g * u[self.i_delta] + u[self.i_sm]
        if self.maxent:
            out[self.r_dmax] = -u[self.i_dmax] + u[self.i_t]
        return out

    def adjoint_psd(self, y: np.ndarray) -> np.ndarray:
        coef = y[self.r_plus] - y[self.r_minus]
        Y = (self.V * coef) @ self.V.conj().T
        Y = 0.5 * (Y + Y.conj().T)
        Y[np.diag_indices(self.n)] += y[0]
        if self.maxent:
            Y = Y + float(y[self.r_dmax]) * self.G
        return Y

    def adjoint_lin(self, y: np.ndarray) -> np.ndarray:
        a = np.zeros(self.k)
        a[self.i_delta] = -self.g * (y[self.r_plus] + y[self.r_minus])
        a[self.i_sp] = y[self.r_plus]
        a[self.i_sm] = y[self.r_minus]
        if self.maxent:
            a[self.i_dmax] = -float(y[self.r_dmax])
            a[self.i_t] = float(y[self.r_dmax])
        return a

    def schur(self, W: np.ndarray, D: np.ndarray) -> np.ndarray:
        """Dense Schur complement A (W . W) A* + B D B^T (upper assembled)."""
        m, p = self.m, self.p
        T = W @ self.V
        U = self.V.conj().T @ T
        S = np.abs(U) ** 2                              # Tr(Etil_i W Etil_j W)
        b1 = np.real(np.sum(T.conj() * T, axis=0))      # Tr(Etil_i W^2)
        tw2 = float(np.real(np.sum(W * W.conj())))      # Tr(W^2)

        M = np.zeros((p, p))
        rp, rm = self.r_plus, self.r_minus
        M[0, 0] = tw2
        M[0, rp] = b1
        M[0, rm] = -b1
        M[rp, rp] = S
        M[rm, rm] = S
        M[rp, rm] = -S
        g2d = self.g ** 2 * D[self.i_delta]
        idx = np.arange(m)
        M[1 + idx, 1 + idx] += g2d + D[self.i_sp]
        M[1 + m + idx, 1 + m + idx] += g2d + D[self.i_sm]
        M[1 + idx, 1 + m + idx] += g2d
        if self.maxent:
            rd = self.r_dmax
            Q = W @ self.G @ W
            gq = np.real(np.sum(self.V.conj() * (Q @ self.V), axis=0))
            M[0, rd] = float(np.trace(Q).real)
            M[rp, rd] = gq
            M[rm, rd] = -gq
            M[rd, rd] = (float(np.vdot(self.G, Q).real)
                         + D[self.i_dmax] + D[self.i_t])
        return np.triu(M) + np.triu(M, 1).T


@dataclass
class IPMResult:
    X: np.ndarray
    u: np.ndarray
    y: np.ndarray
    status: str               # optimal | max_iters | infeasible
    iterations: int
    objective: float
    residual_primal: float
    residual_dual: float
    rel_gap: float
    mu: float


def _initial_point(prob: ConeProblem):
    """Balanced infeasible start: identity-scaled cones, zero multipliers."""
    n = prob.n
    X = np.eye(n, dtype=complex) / n
    u = np.ones(prob.k)
    y = np.zeros(prob.p)
    Z = np.eye(n, dtype=complex) + prob.C
    w = np.ones(prob.k)
    return X, u, y, Z, w


def _floored(vals: np.ndarray) -> np.ndarray:
    """Clip a positive spectrum to 1e-18 of its peak; keeps inverses finite
    when boundary coordinates decay into the denormal range."""
    top = float(np.max(vals)) if vals.size else 1.0
    return np.clip(vals, max(top, 1e-280) * 1e-18, None)


def _nt_scaling(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """NT scaling point W with W Z W = X, via three Hermitian eigensolves."""
    lx, qx = np.linalg.eigh(X)
    lx = _floored(lx)
    xh = (qx * np.sqrt(lx)) @ qx.conj().T
    ls, qs = np.linalg.eigh(xh @ Z @ xh)
    ls = _floored(ls)
    sinv = (qs / np.sqrt(ls)) @ qs.conj().T
    W = xh @ sinv @ xh
    return 0.5 * (W + W.conj().T)


def _max_step_psd(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with X + alpha dX PSD (X assumed PD)."""
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(dX))):
        return 0.0
    try:
        try:
            L = np.linalg.cholesky(X)
        except np.linalg.LinAlgError:
            lx, qx = np.linalg.eigh(X)
            L = qx * np.sqrt(np.clip(lx, 1e-300, None))
        Y = np.linalg.solve(L, dX)
        Y = np.linalg.solve(L, Y.conj().T).conj().T
        Y = 0.5 * (Y + Y.conj().T)
        if not np.all(np.isfinite(Y)):
            return 0.0
        lam = float(np.linalg.eigvalsh(Y)[0])
    except np.linalg.LinAlgError:
        return 0.0
    return np.inf if lam >= -1e-14 else -1.0 / lam


def _max_step_lin(u: np.ndarray, du: np.ndarray) -> float:
    neg = du < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-u[neg] / du[neg]))


def _solve_schur(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the Schur system with static regularization and refinement.

    Late iterations push cond(M) toward 1/mu^2; a proportional diagonal
    floor bounds the factorization while iterative refinement against the
    unregularized matrix restores direction accuracy.
    """
    base = float(np.mean(np.diag(M))) or 1.0
    jitter = 0.0
    for _ in range(5):
        try:
            Mj = M if jitter == 0.0 else M + jitter * np.eye(M.shape[0])
            np.linalg.cholesky(Mj)
            sol = np.linalg.solve(Mj, rhs)
            for _ in range(3):
                resid = rhs - M @ sol
                if np.linalg.norm(resid) <= 1e-12 * max(1.0, float(np.linalg.norm(rhs))):
                    break
                sol = sol + np.linalg.solve(Mj, resid)
            return sol
        except np.linalg.LinAlgError:
            jitter = max(jitter * 1000.0, 1e-14 * base)
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def ipm_solve(prob: ConeProblem, tol_primal: float = 1e-7, tol_dual: float = 1e-7,
              tol_gap: float = 1e-7, max_iters: int = 200) -> IPMResult:
    n, k = prob.n, prob.k
    X, u, y, Z, w = _initial_point(prob)
    norm_b = float(np.linalg.norm(prob.b))
    norm_c = float(np.sqrt(np.linalg.norm(prob.c_lin) ** 2
                           + np.linalg.norm(prob.C) ** 2))
    status = "max_iters"
    it = 0

    def metrics():
        rp = prob.b - prob.apply_psd(X) - prob.apply_lin(u)
        Rd = prob.C - Z - prob.adjoint_psd(y)
        rl = prob.c_lin - w - prob.adjoint_lin(y)
        pobj = float(prob.c_lin @ u) + float(np.vdot(prob.C, X).real)
        dobj = float(prob.b @ y)
        res_p = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        res_d = float(np.sqrt(np.linalg.norm(Rd) ** 2 + np.linalg.norm(rl) ** 2)) / (1.0 + norm_c)
        compl = float(np.real(np.vdot(X, Z))) + float(u @ w)
        # the complementarity sum certifies the gap without the cancellation
        # noise that plagues pobj - dobj when the objective block is large
        gap = min(abs(pobj - dobj), compl) / (1.0 + abs(pobj) + abs(dobj))
        mu = compl / (n + k)
        return rp, Rd, rl, pobj, dobj, res_p, res_d, gap, mu

    best = None
    best_score = np.inf
    stalls = 0
    for it in range(1, max_iters + 1):
        try:
            rp, Rd, rl, pobj, dobj, res_p, res_d, gap, mu = metrics()
        except np.linalg.LinAlgError:
            break
        score = max(res_p, res_d, gap)
        if score < best_score:
            best_score = score
            best = (X.copy(), u.copy(), y.copy(), pobj, res_p, res_d, gap, mu)
        if res_p <= tol_primal and res_d <= tol_dual and gap <= tol_gap:
            status = "optimal"
            break
        if dobj > DUAL_BLOWUP * (1.0 + abs(pobj)) and res_d <= 1e-5:
            status = "infeasible"
            break
        if stalls >= 10:
            break

        try:
            W = _nt_scaling(X, Z)
            w_safe = np.maximum(w, float(np.max(w)) * 1e-18) if k else w
            D = u / w_safe
            M = prob.schur(W, D)
            lz, qz = np.linalg.eigh(Z)
            Zinv = (qz / _floored(lz)) @ qz.conj().T
        except np.linalg.LinAlgError:
            break

        def take_direction(rc_s, rc_l, rp=rp, Rd=Rd, rl=rl, W=W, D=D, M=M):
            rhs = (rp - prob.apply_psd(rc_s - W @ Rd @ W)
                   - prob.apply_lin(rc_l - D * rl))
            dy = _solve_schur(M, rhs)
            dZ = Rd - prob.adjoint_psd(dy)
            dw = rl - prob.adjoint_lin(dy)
            dX = rc_s - W @ dZ @ W
            dX = 0.5 * (dX + dX.conj().T)
            du = rc_l - D * dw
            if not (np.all(np.isfinite(dX)) and np.all(np.isfinite(du))
                    and np.all(np.isfinite(dZ)) and np.all(np.isfinite(dw))):
                return dX, du, dy, dZ, dw, 0.0
            alpha = min(1.0, FRACTION_TO_BOUNDARY * min(
                _max_step_psd(X, dX), _max_step_lin(u, du),
                _max_step_psd(Z, dZ), _max_step_lin(w, dw)))
            return dX, du, dy, dZ, dw, alpha

        # affine predictor fixes the centering weight
        dX_a, du_a, dy_a, dZ_a, dw_a, a_aff = take_direction(-X, -u)
        mu_aff = ((np.real(np.vdot(X + a_aff * dX_a, Z + a_aff * dZ_a))
                   + (u + a_aff * du_a) @ (w + a_aff * dw_a)) / (n + k))
        sigma = float(np.clip((max(mu_aff, 0.0) / max(mu, 1e-300)) ** 3, 1e-8, 0.99))
        if res_p <= tol_primal and res_d <= tol_dual:
            # residuals are done; a blocked predictor must not freeze mu
            sigma = min(sigma, 0.2)

        # combined step with second-order corrections in both blocks; the
        # PSD correction is dropped when Z^{-1} amplifies it out of scale
        corr = dX_a @ dZ_a @ Zinv
        if float(np.linalg.norm(corr)) > 10.0 * (float(np.linalg.norm(X)) + sigma * mu * n):
            corr = np.zeros_like(corr)
        rc_s = sigma * mu * Zinv - X - 0.5 * (corr + corr.conj().T)
        rc_l = (sigma * mu - du_a * dw_a) / w_safe - u
        dX, du, dy, dZ, dw, alpha = take_direction(rc_s, rc_l)
        residuals_done = res_p <= tol_primal and res_d <= tol_dual
        if alpha < 0.05:
            # recenter: pure sigma-step without the Mehrotra corrections;
            # once the residuals are converged the fallback must still let
            # the complementarity decay
            sigma = 0.3 if residuals_done else max(sigma, 0.8)
            rc_s = sigma * mu * Zinv - X
            rc_l = sigma * mu / w_safe - u
            dX, du, dy, dZ, dw, alpha = take_direction(rc_s, rc_l)

        # accept by merit: residuals and complementarity must shrink jointly,
        # so feasibility progress may buy a temporary mu increase
        gap_scale = 1.0 + abs(pobj) + abs(dobj)

        def merit_at(a):
            Xa = X + a * dX
            ua = u + a * du
            ya = y + a * dy
            Za = Z + a * dZ
            wa = w + a * dw
            rpa = prob.b - prob.apply_psd(Xa) - prob.apply_lin(ua)
            Rda = prob.C - Za - prob.adjoint_psd(ya)
            rla = prob.c_lin - wa - prob.adjoint_lin(ya)
            ca = float(np.real(np.vdot(Xa, Za))) + float(ua @ wa)
            return (float(np.linalg.norm(rpa)) / (1.0 + norm_b)
                    + float(np.sqrt(np.linalg.norm(Rda) ** 2
                                    + np.linalg.norm(rla) ** 2)) / (1.0 + norm_c)
                    + ca / gap_scale)

        compl0 = float(np.real(np.vdot(X, Z))) + float(u @ w)
        merit0 = res_p + res_d + compl0 / gap_scale
        while alpha >= 1e-6 and merit_at(alpha) > (1.0 - 1e-3 * alpha) * merit0:
            alpha *= 0.5
        if alpha < 1e-6:
            # last resort: centering has the mildest curvature and restores
            # centrality for the next predictor (sigma < 1 in the endgame so
            # the gap keeps shrinking)
            sigma_lr = 0.5 if residuals_done else 1.0
            rc_s = sigma_lr * mu * Zinv - X
            rc_l = sigma_lr * mu / w_safe - u
            dX, du, dy, dZ, dw, alpha = take_direction(rc_s, rc_l)
            while alpha >= 1e-6 and merit_at(alpha) > (1.0 + 1e-6) * merit0:
                alpha *= 0.5
        stalls = stalls + 1 if alpha < 1e-6 else 0

        if alpha >= 1e-6:
            X = X + alpha * dX
            X = 0.5 * (X + X.conj().T)
            u = u + alpha * du
            y = y + alpha * dy
            Z = Z + alpha * dZ
            Z = 0.5 * (Z + Z.conj().T)
            w = w + alpha * dw

    rp, Rd, rl, pobj, dobj, res_p, res_d, gap, mu = metrics()
    if max(res_p, res_d, gap) > best_score and best is not None:
        X, u, y, pobj, res_p, res_d, gap, mu = best
    if status != "infeasible" and res_p <= tol_primal and res_d <= tol_dual and gap <= tol_gap:
        status = "optimal"
    elif status == "max_iters" and res_p > max(1e-3, 1e3 * tol_primal):
        # the iteration could not find even three digits of feasibility;
        # with strictly positive bands that only happens for conflicting
        # exact constraints
        status = "infeasible"
    return IPMResult(X=X, u=u, y=y, status=status, iterations=it, objective=pobj,
                     residual_primal=res_p, residual_dual=res_d, rel_gap=gap, mu=mu)
