"""Tests for the truncated Fock-basis toolkit."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvtomo.errors import (DegenerateDataError, DimensionMismatchError,
                           DomainError, TruncationError)
from cvtomo.fock import (DensityMatrix, PureState, StateSpec, TruncationConfig,
                         annihilation_matrix, build_state, coherent_amplitudes,
                         coherent_overlap, fidelity, hermite_basis,
                         hermite_wavefunction, negativity,
                         shannon_entropy_probe, tensor_lift)


# --------------------------------------------------------------------------
# independent oracles
# --------------------------------------------------------------------------

def hermite_poly(n, x):
    """Raw Hermite polynomial by the classic recursion H_{k+1} = 2xH_k - 2kH_{k-1}."""
    h0, h1 = 1.0, 2.0 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2.0 * x * h1 - 2.0 * k * h0
    return h1


def psi_oracle(n, q):
    log_norm = -0.5 * (0.5 * math.log(math.pi) + n * math.log(2.0) + math.lgamma(n + 1))
    return math.exp(log_norm - 0.5 * q * q) * hermite_poly(n, q)


def coherent_wavepacket(q, z):
    """Position wavefunction <q|z> for real z, from the generating function."""
    return math.pi ** -0.25 * np.exp(-0.5 * q * q + math.sqrt(2.0) * z * q - z * z)


GH_NODES, GH_WEIGHTS = np.polynomial.hermite.hermgauss(80)


def gh_integral(f):
    """Plain integral of f over the real line via Gauss-Hermite."""
    return float(np.sum(GH_WEIGHTS * np.exp(GH_NODES ** 2) * f(GH_NODES)))


# --------------------------------------------------------------------------
# wavefunctions
# --------------------------------------------------------------------------

class TestHermiteWavefunction:
    def test_ground_state_at_origin(self):
        assert hermite_wavefunction(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-12)

    def test_odd_parity_vanishes_at_origin(self):
        assert hermite_wavefunction(1, 0.0) == 0.0

    def test_second_level_against_recursion_oracle(self):
        # H_2(0) = -2 via the independent recursion
        assert hermite_poly(2, 0.0) == -2.0
        assert hermite_wavefunction(2, 0.0) == pytest.approx(psi_oracle(2, 0.0), abs=1e-12)
        assert hermite_wavefunction(2, 0.0) == pytest.approx(-0.5311259, abs=1e-7)

    @pytest.mark.parametrize("n", [0, 3, 7, 10, 25])
    def test_matches_oracle_at_random_points(self, n):
        rng = np.random.default_rng(n)
        for q in rng.uniform(-4, 4, 8):
            assert hermite_wavefunction(n, float(q)) == pytest.approx(
                psi_oracle(n, float(q)), rel=1e-10, abs=1e-12)

    def test_orthonormality_via_quadrature(self):
        # spec invariant: |int psi_n psi_m - delta_nm| <= 1e-10 for n, m <= 10
        psis = hermite_basis(10, GH_NODES)
        gram = (psis * GH_WEIGHTS * np.exp(GH_NODES ** 2)) @ psis.T
        assert np.max(np.abs(gram - np.eye(11))) < 1e-10

    def test_large_n_does_not_overflow(self):
        val = hermite_wavefunction(200, 3.0)
        assert math.isfinite(val)

    @pytest.mark.parametrize("bad", [-1, 2.5, 201, True])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            hermite_wavefunction(bad, 0.0)


class TestCoherentOverlap:
    def test_vacuum_on_vacuum(self):
        assert coherent_overlap(0, 0.0) == 1.0

    def test_paper_value(self):
        assert coherent_overlap(1, 1.0) == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_against_wavepacket_integration_oracle(self):
        # <2|z=0.5> by integrating psi_2 against the coherent wavepacket
        want = gh_integral(lambda q: hermite_basis(2, q)[2] * coherent_wavepacket(q, 0.5))
        got = coherent_overlap(2, 0.5)
        assert got.imag == 0.0
        assert got.real == pytest.approx(want, abs=1e-10)
        assert got.real == pytest.approx(math.exp(-0.125) * 0.25 / math.sqrt(2), abs=1e-12)

    def test_truncated_norm_unit_disk(self):
        # the n = 10 truncation keeps all but ~1e-8 of |z| <= 1 coherent states
        for zr in (0.25, 0.5, 1.0):
            amps = coherent_amplitudes(10, zr)
            assert float(np.vdot(amps, amps).real) >= 1.0 - 1.1e-8

    def test_truncated_norm_matches_poisson_tail(self):
        # at |z| = 2 the leakage is the Poisson(4) tail beyond 10, about 2.8e-3
        amps = coherent_amplitudes(10, 2.0)
        norm = float(np.vdot(amps, amps).real)
        lam = 4.0
        tail = 1.0 - math.exp(-lam) * sum(lam ** k / math.factorial(k) for k in range(11))
        assert 1.0 - norm == pytest.approx(tail, rel=1e-10)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            coherent_overlap(-1, 0.0)


class TestAnnihilation:
    def test_two_level(self):
        a = annihilation_matrix(TruncationConfig(1, 1))
        assert np.allclose(a, [[0, 1], [0, 0]])

    def test_commutator_truncation_artifact(self):
        a = annihilation_matrix(TruncationConfig(10, 1))
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(11)
        expected[10, 10] = -10.0
        assert np.allclose(comm, expected, atol=1e-12)

    def test_ladder_action(self):
        a = annihilation_matrix(TruncationConfig(5, 1))
        ket3 = np.zeros(6)
        ket3[3] = 1.0
        out = a @ ket3
        assert out[2] == pytest.approx(math.sqrt(3), abs=1e-14)
        assert np.count_nonzero(out) == 1


class TestTensorLift:
    def test_identity(self):
        eye = np.eye(3)
        assert np.allclose(tensor_lift([eye, eye]), np.eye(9))

    def test_projector_flat_index(self):
        d = 4
        p1 = np.zeros((d, d))
        p1[1, 1] = 1.0
        p0 = np.zeros((d, d))
        p0[0, 0] = 1.0
        lifted = tensor_lift([p1, p0])
        # mode 1 is the slow index: |1>|0> sits at 1*d + 0
        expect = np.zeros((16, 16))
        expect[1 * d, 1 * d] = 1.0
        assert np.allclose(lifted, expect)

    def test_trace_multiplicative(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            a, b = a + a.conj().T, b + b.conj().T
            lifted = tensor_lift([a, b])
            direct = sum(a[i, i] * b[j, j] for i in range(3) for j in range(3))
            assert np.trace(lifted) == pytest.approx(direct, rel=1e-12)
            assert np.trace(lifted) == pytest.approx(np.trace(a) * np.trace(b), rel=1e-12)

    def test_mode_count_checked(self):
        with pytest.raises(DimensionMismatchError):
            tensor_lift([np.eye(3)], TruncationConfig(2, 2))


# --------------------------------------------------------------------------
# target states
# --------------------------------------------------------------------------

T2 = TruncationConfig(10, 2)
T1 = TruncationConfig(10, 1)


class TestBuildState:
    def test_noon_amplitudes(self):
        rho = build_state(StateSpec("noon"), T2)
        d = T2.dim
        vec = rho.entries[:, 1 * d]  # column of |1,0>
        assert rho.entries[1 * d, 1 * d] == pytest.approx(0.5, abs=1e-12)
        assert rho.entries[0 * d + 1, 0 * d + 1] == pytest.approx(0.5, abs=1e-12)
        assert rho.entries[1 * d, 0 * d + 1] == pytest.approx(0.5, abs=1e-12)
        assert np.linalg.matrix_rank(rho.entries, tol=1e-10) == 1

    def test_flattening_roundtrip(self):
        # mode 1 slow everywhere: reshape recovers the two components
        rho = build_state(StateSpec("noon"), T2)
        vals, vecs = np.linalg.eigh(rho.entries)
        amp = vecs[:, -1].reshape(T2.dim, T2.dim)
        assert abs(amp[1, 0]) == pytest.approx(1 / math.sqrt(2), abs=1e-10)
        assert abs(amp[0, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-10)

    def test_squeezed_vacuum_series(self):
        rho = build_state(StateSpec("squeezed_vacuum", {"zeta": 0.2}), T2)
        lam = math.tanh(0.2)
        # oracle: direct geometric series, truncated then renormalized
        series = np.array([lam ** (2 * n) for n in range(11)])
        series /= series.sum()
        assert rho.entries[0, 0].real == pytest.approx(series[0], abs=1e-12)
        assert rho.entries[0, 0].real == pytest.approx(1 - lam * lam, abs=1e-6)

    def test_hermite_gauss_norm_capture(self):
        rho = build_state(StateSpec("hermite_gauss", {}), T2)
        assert rho.discarded_weight < 1e-3
        assert rho.discarded_weight == pytest.approx(1.95e-4, rel=0.05)

    def test_hermite_gauss_truncation_error(self):
        with pytest.raises(TruncationError):
            build_state(StateSpec("hermite_gauss", {}), TruncationConfig(3, 2))

    def test_dephased_cat_structure(self):
        rho = build_state(StateSpec("dephased_cat", {"alpha": 1.0, "p": 0.5}), T2)
        evals = np.linalg.eigvalsh(rho.entries)
        assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-12)
        assert np.sum(evals > 1e-10) == 2
        assert evals[-2] > 0
        # oracle: 2x2 Gram-representation eigenvalues in the span of the
        # two coherent branches
        s = math.exp(-4.0)
        gram = np.array([[1.0, s], [s, 1.0]])
        coeff = np.array([[1.0, -0.5], [-0.5, 1.0]])
        sq = np.linalg.cholesky(gram)
        small = sq.T @ coeff @ sq
        want = np.sort(np.linalg.eigvalsh(small))
        want = want / want.sum()
        assert np.allclose(np.sort(evals[-2:]), want, atol=1e-6)

    @pytest.mark.parametrize("spec,trunc", [
        (StateSpec("noon"), T2),
        (StateSpec("squeezed_vacuum", {"zeta": 0.2}), T2),
        (StateSpec("hermite_gauss", {}), T2),
        (StateSpec("dephased_cat", {"alpha": 1.0, "p": 0.5}), T2),
        (StateSpec("fock", {"n": 1}), T1),
        (StateSpec("coherent", {"z_re": 1.0}), T1),
    ])
    def test_invariants(self, spec, trunc):
        rho = build_state(spec, trunc)
        assert np.max(np.abs(rho.entries - rho.entries.conj().T)) <= 1e-10
        assert abs(np.trace(rho.entries) - 1.0) <= 1e-10
        assert np.linalg.eigvalsh(rho.entries)[0] >= -1e-10

    def test_bad_specs(self):
        with pytest.raises(DomainError):
            StateSpec("unknown_kind")
        with pytest.raises(DomainError):
            StateSpec("hermite_gauss", {"sigma_plus": -1.0})
        with pytest.raises(DomainError):
            StateSpec("dephased_cat", {"p": 1.5})
        with pytest.raises(DomainError):
            build_state(StateSpec("noon"), T1)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

class TestNegativity:
    def test_product_state(self):
        rho = build_state(StateSpec("fock", {"n": [0, 0]}), T2)
        assert negativity(rho) == pytest.approx(0.0, abs=1e-12)

    def test_noon_paper_value(self):
        assert negativity(build_state(StateSpec("noon"), T2)) == pytest.approx(0.50, abs=1e-10)

    def test_squeezed_vacuum_schmidt_oracle(self):
        # closed form from Schmidt coefficients: ((sum c_n)^2 - 1)/2
        lam = math.tanh(0.2)
        coeffs = np.array([lam ** n for n in range(11)])
        coeffs /= np.linalg.norm(coeffs)
        want = (coeffs.sum() ** 2 - 1.0) / 2.0
        rho = build_state(StateSpec("squeezed_vacuum", {"zeta": 0.2}), T2)
        assert negativity(rho) == pytest.approx(want, abs=1e-12)
        assert negativity(rho) == pytest.approx(lam / (1 - lam), abs=1e-6)

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(3)
        rho = build_state(StateSpec("noon"), T2)
        base = negativity(rho)
        for _ in range(3):
            h1 = rng.normal(size=(11, 11)) + 1j * rng.normal(size=(11, 11))
            h2 = rng.normal(size=(11, 11)) + 1j * rng.normal(size=(11, 11))
            u1 = np.linalg.qr(h1)[0]
            u2 = np.linalg.qr(h2)[0]
            u = np.kron(u1, u2)
            rotated = DensityMatrix(u @ rho.entries @ u.conj().T, T2)
            assert negativity(rotated) == pytest.approx(base, abs=1e-8)

    def test_single_mode_rejected(self):
        with pytest.raises(DomainError):
            negativity(build_state(StateSpec("fock", {"n": 0}), T1))


class TestFidelity:
    def test_self_fidelity(self):
        rho = build_state(StateSpec("dephased_cat", {"alpha": 1.0, "p": 0.5}), T2)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_pure(self):
        a = build_state(StateSpec("fock", {"n": 0}), T1)
        b = build_state(StateSpec("fock", {"n": 1}), T1)
        assert fidelity(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_vacuum_vs_coherent(self):
        a = build_state(StateSpec("fock", {"n": 0}), T1)
        b = build_state(StateSpec("coherent", {"z_re": 1.0}), T1)
        assert fidelity(a, b) == pytest.approx(math.exp(-1.0), abs=1e-6)

    def test_symmetry_and_mixed_closed_form(self):
        d = T1.total_dim
        r1 = DensityMatrix(np.diag([0.5, 0.5] + [0.0] * (d - 2)).astype(complex), T1)
        r2 = DensityMatrix(np.diag([0.25, 0.75] + [0.0] * (d - 2)).astype(complex), T1)
        want = (math.sqrt(0.5 * 0.25) + math.sqrt(0.5 * 0.75)) ** 2
        assert fidelity(r1, r2) == pytest.approx(want, abs=1e-10)
        assert fidelity(r1, r2) == pytest.approx(fidelity(r2, r1), abs=1e-8)

    def test_monotone_under_mixing_toward_target(self):
        rng = np.random.default_rng(1)
        h = rng.normal(size=(11, 11)) + 1j * rng.normal(size=(11, 11))
        mixed = h @ h.conj().T
        mixed /= np.trace(mixed).real
        rho = DensityMatrix(mixed, T1)
        sigma = build_state(StateSpec("coherent", {"z_re": 0.5}), T1)
        previous = -1.0
        for t in np.linspace(0.0, 1.0, 11):
            blend = DensityMatrix((1 - t) * rho.entries + t * sigma.entries, T1)
            val = fidelity(blend, sigma)
            assert val >= previous - 1e-10
            previous = val

    def test_non_psd_rejected(self):
        bad = np.diag([1.5, -0.5] + [0.0] * 9).astype(complex)
        with pytest.raises(DomainError):
            fidelity(DensityMatrix(bad, T1), build_state(StateSpec("fock", {"n": 0}), T1))

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fidelity(build_state(StateSpec("fock", {"n": 0}), T1),
                     build_state(StateSpec("noon"), T2))


class _Probe:
    def __init__(self, matrix, weight=1.0):
        self.matrix = matrix
        self.weight = weight


class TestEntropyProbe:
    def test_single_probe_is_zero(self):
        rho = build_state(StateSpec("fock", {"n": 0}), T1)
        probe = _Probe(np.eye(11, dtype=complex))
        assert shannon_entropy_probe(rho, [probe]) == 0.0

    def test_uniform_ten_probes(self):
        rho = build_state(StateSpec("fock", {"n": 0}), T1)
        probes = [_Probe(np.eye(11, dtype=complex), weight=0.1) for _ in range(10)]
        assert shannon_entropy_probe(rho, probes) == pytest.approx(1.0, abs=1e-12)

    def test_zero_probes_rejected(self):
        rho = build_state(StateSpec("fock", {"n": 0}), T1)
        dead = _Probe(np.zeros((11, 11), dtype=complex) + 0j)
        with pytest.raises(DegenerateDataError):
            shannon_entropy_probe(rho, [dead])
        with pytest.raises(DegenerateDataError):
            shannon_entropy_probe(rho, [])


# --------------------------------------------------------------------------
# containers
# --------------------------------------------------------------------------

class TestContainers:
    def test_truncation_dimensions(self):
        t = TruncationConfig(10, 2)
        assert t.dim == 11 and t.total_dim == 121
        with pytest.raises(DomainError):
            TruncationConfig(-1, 1)
        with pytest.raises(DomainError):
            TruncationConfig(3, 0)

    def test_pure_state_norm_checked(self):
        with pytest.raises(DomainError):
            PureState(np.ones(11), T1)

    def test_density_json_roundtrip(self):
        rho = build_state(StateSpec("dephased_cat", {"alpha": 1.0, "p": 0.5}), T2)
        doc = rho.to_json_dict()
        back = DensityMatrix.from_json_dict(doc)
        assert np.allclose(back.entries, rho.entries, atol=1e-15)
        assert back.trunc == rho.trunc

    def test_density_validate(self):
        rho = build_state(StateSpec("noon"), T2)
        rho.validate()
        bad = DensityMatrix(np.diag([2.0] + [0.0] * 120).astype(complex), T2)
        with pytest.raises(DomainError):
            bad.validate()


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_coherent_norm_property(zr, zi):
    """Truncated coherent norms stay within the Poisson tail of unity."""
    z = complex(zr, zi)
    amps = coherent_amplitudes(10, z)
    norm = float(np.vdot(amps, amps).real)
    assert norm <= 1.0 + 1e-12
    if abs(z) <= 1.0:
        assert norm >= 1.0 - 1.1e-8
