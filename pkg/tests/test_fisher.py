import numpy as np
import pytest

from probelab import dynamics, fisher, states
from probelab.errors import SingularOutcomeError, SLDInconsistencyError

SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def single_qubit_setup(sign=+1):
    gen = dynamics.nonentangling_generator(1)
    rho = states.optimal_single_qubit(sign)
    return rho, dynamics.state_derivative(gen, rho), dynamics.product_pm_readout(1)


def test_sld_golden_single_qubit():
    rho, rho_prime, _ = single_qubit_setup(+1)
    result = fisher.sld_from_state(rho, rho_prime)
    assert np.allclose(result.operator, -SX, atol=1e-10)
    assert result.route == fisher.EIGENBASIS_FORMULA
    assert result.kernel_dim == 1  # the single zero-eigenvalue diagonal pair


def test_sld_zero_derivative_gives_zero_operator():
    rho = states.random_mixed_state(2, 5)
    result = fisher.sld_from_state(rho, np.zeros((4, 4)))
    assert np.linalg.norm(result.operator) < 1e-12


def test_sld_two_qubit_product_state():
    gen = dynamics.nonentangling_generator(2)
    rho = states.tensor_power(states.optimal_single_qubit(+1), 2)
    rho_prime = dynamics.state_derivative(gen, rho)
    l_min = fisher.sld_from_state(rho, rho_prime).operator
    expected = -(np.kron(SX, np.eye(2)) + np.kron(np.eye(2), SX))
    # the two agree wherever the state has support: same defining equation
    lhs = 0.5 * (l_min @ rho.matrix + rho.matrix @ l_min)
    lhs_expected = 0.5 * (expected @ rho.matrix + rho.matrix @ expected)
    assert np.allclose(lhs, lhs_expected, atol=1e-10)
    assert np.allclose(lhs, rho_prime, atol=1e-10)


def test_sld_defining_equation_residual_full_rank_states():
    rng = np.random.default_rng(17)
    for _ in range(20):
        rho = states.random_mixed_state(2, rng)
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = h + h.conj().T
        rho_prime = -1j * (h @ rho.matrix - rho.matrix @ h)
        l_op = fisher.sld_from_state(rho, rho_prime).operator
        residual = np.linalg.norm(
            0.5 * (l_op @ rho.matrix + rho.matrix @ l_op) - rho_prime
        )
        assert residual <= 1e-8


def test_sld_rejects_derivative_outside_support():
    # rank-1 state with a derivative living entirely on the kernel
    rho = states.pure_state(np.array([1.0, 0.0]))
    bad = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    bad = bad - np.trace(bad) * np.eye(2) / 2  # traceless, still kernel-supported
    with pytest.raises(SLDInconsistencyError):
        fisher.sld_from_state(rho, bad)


def test_lambda_spectrum_golden_single_qubit():
    rho, rho_prime, basis = single_qubit_setup(+1)
    l_op = fisher.sld_from_state(rho, rho_prime).operator
    spectrum = fisher.lambda_spectrum(basis, rho, rho_prime, l_op)
    assert spectrum["+"] == pytest.approx(-1.0)
    assert spectrum["-"] == pytest.approx(1.0)
    assert spectrum.max_abs_imag() < 1e-12


def test_lambda_spectrum_additivity_two_qubits():
    gen = dynamics.nonentangling_generator(2)
    basis = dynamics.product_pm_readout(2)
    rho = states.tensor_power(states.optimal_single_qubit(+1), 2)
    rho_prime = dynamics.state_derivative(gen, rho)
    l_op = fisher.sld_from_state(rho, rho_prime).operator
    spectrum = fisher.lambda_spectrum(basis, rho, rho_prime, l_op)
    expected = {"++": -2.0, "+-": 0.0, "-+": 0.0, "--": 2.0}
    for label, value in expected.items():
        assert spectrum[label] == pytest.approx(value, abs=1e-10)


def test_lambda_spectrum_pure_imaginary_for_entangling_pair():
    gen = dynamics.entangling_generator(2)
    basis = dynamics.product_pm_readout(2)
    rho = states.tensor_power(states.optimal_single_qubit(+1), 2)
    rho_prime = dynamics.state_derivative(gen, rho)
    l_op = fisher.sld_from_state(rho, rho_prime).operator
    spectrum = fisher.lambda_spectrum(basis, rho, rho_prime, l_op)
    assert np.max(np.abs(np.real(spectrum.values))) < 1e-12
    assert np.min(np.abs(np.imag(spectrum.values))) > 0.5
    report = fisher.check_saturation(basis, rho, rho_prime)
    assert not report.saturated
    assert report.im_condition_max > 0.1


def test_lambda_spectrum_diagonal_operator_reads_eigenvalues():
    basis = dynamics.product_pm_readout(1)
    rho = states.from_bloch([0.0, 0.6, 0.0])
    gen = dynamics.nonentangling_generator(1)
    rho_prime = dynamics.state_derivative(gen, rho)
    l_op = fisher.sld_from_state(rho, rho_prime).operator
    spectrum = fisher.lambda_spectrum(basis, rho, rho_prime, l_op)
    # L is diagonal in the readout basis here; ratios equal its eigenvalues
    for label in basis.labels:
        ket = basis.kets[:, basis.index(label)]
        eig = np.real(np.vdot(ket, l_op @ ket))
        assert spectrum[label].real == pytest.approx(eig, abs=1e-10)


def test_lambda_spectrum_undefined_ratio_raises():
    # a near-zero outcome probability with a large numerator is numerically
    # undefined rather than unconstrained
    eps = 1e-13
    rho = states.density_matrix(np.diag([1.0 - eps, eps]).astype(complex))
    basis = dynamics.readout_from_kets(np.eye(2, dtype=complex), ("0", "1"))
    l_op = np.diag([0.0, 1e5]).astype(complex)
    with pytest.raises(fisher.UndefinedLambdaError):
        fisher.lambda_spectrum(basis, rho, np.zeros((2, 2)), l_op)


def test_check_saturation_golden_cases():
    rho, rho_prime, basis = single_qubit_setup(+1)
    assert fisher.check_saturation(basis, rho, rho_prime).saturated

    cat = states.cat_state(2)
    gen = dynamics.nonentangling_generator(2)
    report = fisher.check_saturation(
        dynamics.product_pm_readout(2), cat, dynamics.state_derivative(gen, cat)
    )
    assert not report.saturated


def test_classical_fisher_golden_values():
    rho, rho_prime, basis = single_qubit_setup(+1)
    assert fisher.classical_fisher(basis, rho, rho_prime) == pytest.approx(1.0)

    gen2 = dynamics.nonentangling_generator(2)
    rho2 = states.tensor_power(states.optimal_single_qubit(+1), 2)
    rp2 = dynamics.state_derivative(gen2, rho2)
    assert fisher.classical_fisher(
        dynamics.product_pm_readout(2), rho2, rp2
    ) == pytest.approx(2.0)

    cat = states.cat_state(2)
    rp_cat = dynamics.state_derivative(gen2, cat)
    assert abs(fisher.classical_fisher(dynamics.product_pm_readout(2), cat, rp_cat)) < 1e-10


def test_classical_fisher_singular_outcome_error():
    basis = dynamics.product_pm_readout(1)
    rho = states.pure_state(np.array([1.0, -1.0]) / np.sqrt(2.0))  # p(+) = 0
    rho_prime = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)  # d p(+) != 0
    with pytest.raises(SingularOutcomeError):
        fisher.classical_fisher(basis, rho, rho_prime)


def test_quantum_fisher_golden_values():
    rho, rho_prime, _ = single_qubit_setup(+1)
    assert fisher.quantum_fisher(rho, rho_prime) == pytest.approx(1.0)
    for n in range(1, 7):
        gen = dynamics.nonentangling_generator(n)
        rng_state = states.tensor_power(states.optimal_single_qubit(+1), n)
        rp = dynamics.state_derivative(gen, rng_state)
        assert fisher.quantum_fisher(rng_state, rp) == pytest.approx(n, abs=1e-8)
    ent = dynamics.entangling_generator(2)
    candidate = states.two_qubit_entangling_candidate(1.0, 1.0, 1.0)
    rp = dynamics.state_derivative(ent, candidate)
    assert fisher.quantum_fisher(candidate, rp) == pytest.approx(1.0)


def test_fisher_hierarchy_random_sweep():
    rng = np.random.default_rng(71)
    for _ in range(60):
        n = int(rng.integers(1, 4))
        rho = (
            states.random_pure_state(n, rng)
            if rng.random() < 0.5
            else states.random_mixed_state(n, rng)
        )
        dim = 2**n
        h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        gen = dynamics.custom_generator(h + h.conj().T)
        rho_prime = dynamics.state_derivative(gen, rho)
        basis = (
            dynamics.product_pm_readout(n)
            if rng.random() < 0.5
            else dynamics.random_projective_readout(n, rng)
        )
        f_c = fisher.classical_fisher(basis, rho, rho_prime)
        f_q = fisher.quantum_fisher(rho, rho_prime)
        assert f_c <= f_q + 1e-9
        if fisher.check_saturation(basis, rho, rho_prime).saturated:
            assert abs(f_c - f_q) <= 1e-7


def test_saturation_implies_fisher_equality():
    gen = dynamics.nonentangling_generator(2)
    rho = states.tensor_power(states.optimal_single_qubit(+1), 2)
    rho_prime = dynamics.state_derivative(gen, rho)
    basis = dynamics.product_pm_readout(2)
    assert fisher.check_saturation(basis, rho, rho_prime).saturated
    f_c = fisher.classical_fisher(basis, rho, rho_prime)
    f_q = fisher.quantum_fisher(rho, rho_prime)
    assert abs(f_c - f_q) <= 1e-7


def test_cramer_rao_bound():
    assert fisher.cramer_rao_bound(1.0, 1) == 1.0
    for n in range(1, 7):
        assert fisher.cramer_rao_bound(float(n), 1) == pytest.approx(1 / np.sqrt(n))
    assert fisher.cramer_rao_bound(1.0, 10**4) == pytest.approx(0.01)
    assert np.isinf(fisher.cramer_rao_bound(0.0, 5))
    with pytest.raises(ValueError):
        fisher.cramer_rao_bound(1.0, 0)
