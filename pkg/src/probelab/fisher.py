"""Symmetric logarithmic derivative, Fisher information, and saturation checks.

The SLD operator L is defined implicitly by (L rho + rho L)/2 = d(rho)/dx.  It
is constructed here in the eigenbasis of rho as L_jk = 2 (drho)_jk / (p_j +
p_k); matrix elements on eigenvalue pairs with p_j + p_k below threshold are
set to zero (the SLD is non-unique there, and the zero choice keeps tr(L^2
rho) minimal and reproducible).

A fixed projective readout extracts the classical Fisher information

    F = sum_outcomes (d p / dx)^2 / p,

which is bounded by the quantum Fisher information tr(L^2 rho).  The bound is
attained exactly when every outcome ratio tr(E L rho)/tr(E rho) is real and
the projectors are compatible with L on the support of rho, i.e.
E (L - Re(ratio)) rho = 0 for every outcome.  Both conditions are measured by
:func:`check_saturation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ReadoutBasis
from .errors import (
    DimensionError,
    SingularOutcomeError,
    SLDInconsistencyError,
    UndefinedLambdaError,
)
from .operators import hermitian_eigen, is_hermitian
from .states import DensityMatrix

EIGENBASIS_FORMULA = "eigenbasis-formula"
READOUT_DIAGONAL = "readout-diagonal"

#: p_j + p_k at or below this is treated as the kernel of the defining equation.
KERNEL_TOL = 1e-10

#: Residual thresholds: defining equation and saturation flags.
SLD_RESIDUAL_TOL = 1e-8
SATURATION_TOL = 1e-8

#: Probabilities at or below this are "zero" for lambda ratios and Fisher sums.
PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class SLDResult:
    """Hermitian SLD operator plus bookkeeping about how it was built."""

    operator: np.ndarray
    route: str
    kernel_dim: int


@dataclass(frozen=True)
class LambdaSpectrum:
    """Per-outcome inverse eigenvalues tr(E L rho)/tr(E rho).

    Values are recorded as complex numbers: nonzero imaginary parts are data
    (they witness saturation failure), not errors.  Outcomes with vanishing
    probability and vanishing numerator are unconstrained and reported as 0.
    """

    labels: tuple[str, ...]
    values: np.ndarray
    unconstrained: tuple[bool, ...]

    def as_dict(self) -> dict[str, complex]:
        return {label: complex(v) for label, v in zip(self.labels, self.values)}

    def real_values(self) -> np.ndarray:
        return np.real(self.values)

    def max_abs_imag(self) -> float:
        return float(np.max(np.abs(np.imag(self.values)))) if len(self.values) else 0.0

    def __getitem__(self, label: str) -> complex:
        return complex(self.values[self.labels.index(label)])


@dataclass(frozen=True)
class SaturationReport:
    """Diagnostics for attainment of the quantum bound by a fixed readout.

    ``im_condition_max`` is max over outcomes of |Im tr(rho E L)|;
    ``diagonal_residual`` aggregates || E (L - Re(1/lambda)) rho ||_F over
    outcomes.  ``saturated`` is defined as both residuals <= tolerance.
    """

    im_condition_max: float
    diagonal_residual: float
    saturated: bool


def sld_from_state(
    rho: DensityMatrix, rho_prime: np.ndarray, tol: float = KERNEL_TOL
) -> SLDResult:
    """Solve (L rho + rho L)/2 = rho_prime for Hermitian L.

    ``tol`` is the kernel threshold on eigenvalue sums p_j + p_k.  Raises
    :class:`SLDInconsistencyError` if the defining equation cannot be met to
    within ``SLD_RESIDUAL_TOL`` after kernel handling (the derivative then has
    support where the state has none).
    """
    rho_prime = np.asarray(rho_prime, dtype=complex)
    if rho_prime.shape != rho.matrix.shape:
        raise DimensionError(
            f"derivative shape {rho_prime.shape} does not match state {rho.matrix.shape}"
        )
    if not is_hermitian(rho_prime):
        raise SLDInconsistencyError("state derivative must be Hermitian")
    eig = hermitian_eigen(rho.matrix)
    p = np.clip(eig.values, 0.0, None)
    drho_eig = eig.vectors.conj().T @ rho_prime @ eig.vectors
    sums = p[:, None] + p[None, :]
    kernel = sums <= tol
    weights = np.where(kernel, 0.0, 2.0 / np.where(kernel, 1.0, sums))
    l_eig = weights * drho_eig
    l_op = eig.vectors @ l_eig @ eig.vectors.conj().T
    l_op = 0.5 * (l_op + l_op.conj().T)
    residual = float(
        np.linalg.norm(0.5 * (l_op @ rho.matrix + rho.matrix @ l_op) - rho_prime)
    )
    if residual > SLD_RESIDUAL_TOL:
        raise SLDInconsistencyError(
            f"defining-equation residual {residual:.3e} exceeds "
            f"{SLD_RESIDUAL_TOL:.1e}: derivative has support outside the state"
        )
    return SLDResult(
        operator=l_op, route=EIGENBASIS_FORMULA, kernel_dim=int(np.sum(kernel))
    )


def sld_from_spectrum(basis: ReadoutBasis, inv_lambdas) -> SLDResult:
    """Readout-diagonal operator sum_outcomes (1/lambda) E(outcome)."""
    values = _inv_lambda_array(basis, inv_lambdas)
    l_op = (basis.kets * values) @ basis.kets.conj().T
    return SLDResult(operator=l_op, route=READOUT_DIAGONAL, kernel_dim=0)


def _inv_lambda_array(basis: ReadoutBasis, inv_lambdas) -> np.ndarray:
    """Accepts a LambdaSpectrum, a label->value mapping, or an aligned array."""
    if isinstance(inv_lambdas, LambdaSpectrum):
        if inv_lambdas.labels != basis.labels:
            raise DimensionError("lambda spectrum labels do not match the basis")
        return np.real(inv_lambdas.values)
    if hasattr(inv_lambdas, "keys"):
        return np.array([float(inv_lambdas[label]) for label in basis.labels])
    values = np.asarray(inv_lambdas, dtype=float)
    if values.shape != (basis.n_outcomes,):
        raise DimensionError(
            f"expected {basis.n_outcomes} inverse eigenvalues, got shape {values.shape}"
        )
    return values


def lambda_spectrum(
    basis: ReadoutBasis,
    rho: DensityMatrix,
    rho_prime: np.ndarray,
    l_op: np.ndarray,
    *,
    probability_floor: float = PROBABILITY_FLOOR,
) -> LambdaSpectrum:
    """Per-outcome ratios tr(E L rho) / tr(E rho), kept complex.

    Cross-checks that the real parts match tr(E rho')/tr(E rho) (an exact
    consequence of the defining equation).  Outcomes where both numerator and
    probability vanish are unconstrained; a vanishing probability with a
    nonvanishing numerator is an error.
    """
    if basis.dim != rho.dim:
        raise DimensionError("basis and state dimensions differ")
    rho_l = rho.matrix @ l_op
    kets = basis.kets
    numerators = np.einsum("ik,ij,jk->k", kets.conj(), rho_l, kets)
    probs = np.real(np.einsum("ik,ij,jk->k", kets.conj(), rho.matrix, kets))
    dprobs = np.real(np.einsum("ik,ij,jk->k", kets.conj(), rho_prime, kets))
    values = np.zeros(basis.n_outcomes, dtype=complex)
    unconstrained = []
    for k, label in enumerate(basis.labels):
        if probs[k] <= probability_floor:
            if abs(numerators[k]) > 1e-10:
                raise UndefinedLambdaError(
                    f"outcome {label!r} has probability {probs[k]:.3e} but "
                    f"|tr(E L rho)| = {abs(numerators[k]):.3e}"
                )
            values[k] = 0.0
            unconstrained.append(True)
            continue
        ratio = numerators[k] / probs[k]
        if abs(ratio.real - dprobs[k] / probs[k]) > 1e-9:
            raise SLDInconsistencyError(
                f"outcome {label!r}: Re tr(E L rho)/p = {ratio.real:.12g} does not "
                f"match tr(E rho')/p = {dprobs[k] / probs[k]:.12g}"
            )
        values[k] = ratio
        unconstrained.append(False)
    values.setflags(write=False)
    return LambdaSpectrum(
        labels=basis.labels, values=values, unconstrained=tuple(unconstrained)
    )


def check_saturation(
    basis: ReadoutBasis,
    rho: DensityMatrix,
    rho_prime: np.ndarray,
    *,
    tol: float = SATURATION_TOL,
) -> SaturationReport:
    """Evaluate both saturation conditions for a fixed projective readout.

    Builds L from the state and derivative, then measures (a) the largest
    imaginary part of tr(rho E L) over outcomes and (b) the projector
    compatibility residual sqrt(sum_outcomes ||E (L - Re(1/lambda)) rho||_F^2),
    which vanishes exactly when the readout projects onto an eigenbasis of an
    SLD with real eigenvalue ratios on the support of rho.
    """
    sld = sld_from_state(rho, rho_prime)
    spectrum = lambda_spectrum(basis, rho, rho_prime, sld.operator)
    kets = basis.kets
    l_rho = sld.operator @ rho.matrix
    # tr(rho E L) = <theta| L rho |theta> by cyclicity.
    traces = np.einsum("ik,ij,jk->k", kets.conj(), l_rho, kets)
    im_max = float(np.max(np.abs(np.imag(traces))))
    # Row vectors <theta| (L - Re(1/lambda)) rho for every outcome.
    rows = kets.conj().T @ l_rho - np.real(spectrum.values)[:, None] * (
        kets.conj().T @ rho.matrix
    )
    diag_residual = float(np.linalg.norm(rows))
    return SaturationReport(
        im_condition_max=im_max,
        diagonal_residual=diag_residual,
        saturated=bool(im_max <= tol and diag_residual <= tol),
    )


def classical_fisher(
    basis: ReadoutBasis,
    rho: DensityMatrix,
    rho_prime: np.ndarray,
    *,
    probability_floor: float = PROBABILITY_FLOOR,
) -> float:
    """F = sum over outcomes of (dp/dx)^2 / p with dp/dx = tr(E rho').

    Outcomes with both p and dp/dx below floor contribute nothing; a vanishing
    p with a nonvanishing derivative makes the sum divergent and raises.
    """
    if basis.dim != rho.dim:
        raise DimensionError("basis and state dimensions differ")
    kets = basis.kets
    probs = np.real(np.einsum("ik,ij,jk->k", kets.conj(), rho.matrix, kets))
    dprobs = np.real(np.einsum("ik,ij,jk->k", kets.conj(), rho_prime, kets))
    total = 0.0
    for label, p, dp in zip(basis.labels, probs, dprobs):
        if p <= probability_floor:
            if abs(dp) > 1e-10:
                raise SingularOutcomeError(
                    f"outcome {label!r} has probability {p:.3e} but derivative {dp:.3e}"
                )
            continue
        total += dp * dp / p
    return float(total)


def quantum_fisher(rho: DensityMatrix, rho_prime: np.ndarray) -> float:
    """tr(L^2 rho): the maximum of the classical Fisher information."""
    sld = sld_from_state(rho, rho_prime)
    l2 = sld.operator @ sld.operator
    return float(np.real(np.trace(l2 @ rho.matrix)))


def cramer_rao_bound(fisher: float, repetitions: int = 1) -> float:
    """Lower bound 1/sqrt(repetitions * fisher) on the estimate uncertainty.

    A non-positive Fisher information leaves the uncertainty unbounded, which
    is reported as ``inf``.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if fisher <= 0.0:
        return math.inf
    return 1.0 / math.sqrt(repetitions * fisher)
