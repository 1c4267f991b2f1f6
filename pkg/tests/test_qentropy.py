import math

import numpy as np
import pytest

from qehumor.density import DensityMatrix, build_density
from qehumor.embeddings import EmbeddingTable
from qehumor.errors import ContractViolationError, DimensionError
from qehumor.linalg import eig_sym
from qehumor.qentropy import conditional_quantum_entropy, von_neumann_entropy


def shannon(probs):
    """Scalar Shannon entropy in nats; the independent oracle for diagonals."""
    return -sum(p * math.log(p) for p in probs if p > 0.0)


def diag_density(probs):
    return DensityMatrix(np.diag(np.asarray(probs, dtype=float)), len(probs))


def pure(v):
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v), 1)


def mixed(n):
    return DensityMatrix(np.eye(n) / n, n)


def random_density(rng, n):
    a = rng.standard_normal((n, n))
    m = a @ a.T
    return DensityMatrix(m / np.trace(m), n)


class TestVonNeumannEntropy:
    def test_pure_state_is_zero(self):
        assert von_neumann_entropy(pure([3.0, 4.0, 0.0])) == 0.0

    def test_maximally_mixed_two(self):
        assert von_neumann_entropy(mixed(2)) == pytest.approx(math.log(2), abs=1e-12)

    def test_two_level_mixture(self):
        # Frozen from the scalar formula: -(0.7 ln 0.7 + 0.3 ln 0.3).
        expected = shannon([0.7, 0.3])
        assert expected == pytest.approx(0.610864, abs=1e-6)
        assert von_neumann_entropy(diag_density([0.7, 0.3])) == pytest.approx(
            expected, abs=1e-12
        )

    def test_matches_shannon_on_diagonals(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            n = int(rng.integers(1, 11))
            probs = rng.dirichlet(np.ones(n))
            got = von_neumann_entropy(diag_density(probs))
            assert abs(got - shannon(probs)) <= 1e-10

    def test_unitary_invariance(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            rho = random_density(rng, 6)
            q, r = np.linalg.qr(rng.standard_normal((6, 6)))
            q = q * np.sign(np.diag(r))
            rotated = DensityMatrix((q @ rho.matrix @ q.T + (q @ rho.matrix @ q.T).T) / 2, 6)
            assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) <= 1e-8

    def test_bounded_by_log_rank(self):
        rng = np.random.default_rng(47)
        table = EmbeddingTable(9, {f"t{i}": rng.standard_normal(9) for i in range(14)})
        for _ in range(30):
            length = int(rng.integers(1, 14))
            tokens = [f"t{i}" for i in rng.integers(0, 14, size=length)]
            d = build_density(table, tokens)
            s = von_neumann_entropy(d)
            assert 0.0 <= s <= math.log(min(d.source_length, 9)) + 1e-8

    def test_rejects_scaled_input(self):
        with pytest.raises(ContractViolationError):
            von_neumann_entropy(DensityMatrix(np.eye(2), 2))

    def test_rejects_indefinite_input(self):
        with pytest.raises(ContractViolationError):
            von_neumann_entropy(diag_density([1.5, -0.5]))


class TestConditionalQuantumEntropy:
    def test_self_conditioning_identity_two(self):
        # sigma rho = I/4 whose spectrum {1/4, 1/4} gives ln 2, minus S(rho) = ln 2.
        got = conditional_quantum_entropy(mixed(2), mixed(2))
        assert got == pytest.approx(0.0, abs=1e-9)

    def test_self_conditioning_negative_three(self):
        # Spectrum of I/9 gives (2 ln 3)/3; minus ln 3 leaves -(ln 3)/3.
        expected = -math.log(3) / 3.0
        assert expected == pytest.approx(-0.366204, abs=1e-6)
        got = conditional_quantum_entropy(mixed(3), mixed(3))
        assert got == pytest.approx(expected, abs=1e-9)

    def test_orthogonal_pure_pair_is_zero(self):
        sigma = pure([0.0, 1.0, 0.0])
        rho = pure([1.0, 0.0, 0.0])
        assert conditional_quantum_entropy(sigma, rho) == pytest.approx(0.0, abs=1e-12)

    def test_pure_pair_with_half_overlap(self):
        # Single nonzero eigenvalue c = (u.v)^2 = 0.5 gives -c ln c.
        expected = -0.5 * math.log(0.5)
        assert expected == pytest.approx(0.346574, abs=1e-6)
        u = np.array([1.0, 0.0])
        v = np.array([1.0, 1.0]) / math.sqrt(2.0)
        got = conditional_quantum_entropy(pure(v), pure(u))
        assert got == pytest.approx(expected, abs=1e-9)

    def test_identical_pure_states_give_zero(self):
        d = pure([1.0, 2.0, 2.0])
        assert conditional_quantum_entropy(d, d) == pytest.approx(0.0, abs=1e-12)

    def test_product_spectrum_matches_direct_method(self):
        # Oracle: eigenvalues of the plain product sigma @ rho from the
        # general-purpose dense solver, compared to the symmetrized route.
        rng = np.random.default_rng(53)
        for _ in range(50):
            sigma = random_density(rng, 4)
            rho = random_density(rng, 4)
            spectrum = eig_sym(rho.matrix)
            root = (spectrum.eigenvectors * np.sqrt(np.clip(spectrum.eigenvalues, 0, None))) @ spectrum.eigenvectors.T
            sym_eigs = np.sort(eig_sym((root @ sigma.matrix @ root + (root @ sigma.matrix @ root).T) / 2).eigenvalues)[::-1]
            direct = np.sort(np.linalg.eigvals(sigma.matrix @ rho.matrix).real)[::-1]
            np.testing.assert_allclose(sym_eigs, direct, atol=1e-6)

    def test_order_mismatch(self):
        with pytest.raises(DimensionError):
            conditional_quantum_entropy(mixed(2), mixed(3))

    def test_rejects_invalid_density(self):
        with pytest.raises(ContractViolationError):
            conditional_quantum_entropy(DensityMatrix(np.eye(2), 2), mixed(2))
