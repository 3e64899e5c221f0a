"""Entropies, mutual information and two-qubit discord (all in bits).

Two-qubit states are 4x4 matrices in the basis |00>, |01>, |10>, |11> with
subsystem A as the leading tensor factor.  Discord measurements always act
on B; permute factors with :func:`swap_subsystems` to measure A instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import minimize

EIG_FLOOR = 1e-14
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
DISCORD_CLIP = 1e-9


def check_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Validate a 2x2 or 4x4 density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix has trace {tr}")
    if np.linalg.eigvalsh(rho).min() < -POSITIVITY_TOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def _xlog2x_sum(p: np.ndarray, axis=-1) -> np.ndarray:
    p = np.where(p > EIG_FLOOR, p, 1.0)
    return -np.sum(p * np.log2(p), axis=axis)


def shannon_entropy(probs: Iterable[float]) -> float:
    p = np.asarray(list(probs), dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    return float(_xlog2x_sum(p))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return shannon_entropy([p, 1.0 - p])


def von_neumann_entropy(rho) -> float:
    rho = check_density_matrix(rho)
    return float(_xlog2x_sum(np.linalg.eigvalsh(rho)))


def _as_tensor(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(2, 2, 2, 2)


def partial_trace_B(rho) -> np.ndarray:
    return np.einsum("abcb->ac", _as_tensor(np.asarray(rho, dtype=complex)))


def partial_trace_A(rho) -> np.ndarray:
    return np.einsum("abad->bd", _as_tensor(np.asarray(rho, dtype=complex)))


def swap_subsystems(rho) -> np.ndarray:
    return _as_tensor(np.asarray(rho, dtype=complex)).transpose(1, 0, 3, 2).reshape(4, 4)


def mutual_information(rho_AB) -> float:
    rho = check_density_matrix(rho_AB, 4)
    return (
        von_neumann_entropy(partial_trace_B(rho))
        + von_neumann_entropy(partial_trace_A(rho))
        - von_neumann_entropy(rho)
    )


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective qubit measurement along Bloch angles (theta, phi)."""

    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")

    @classmethod
    def folded(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Equivalent basis with angles mapped into the canonical ranges."""
        theta = theta % (2 * math.pi)
        if theta > math.pi:
            theta, phi = 2 * math.pi - theta, phi + math.pi
        phi = phi % (2 * math.pi)
        if phi >= 2 * math.pi:
            phi = 0.0
        return cls(min(theta, math.pi), phi)


def measurement_unitary(theta: float, phi: float) -> np.ndarray:
    """U with columns U|0>, U|1>; measuring B in this basis equals rotating by U then measuring Z."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -s * np.exp(-1j * phi)], [s * np.exp(1j * phi), c]], dtype=complex
    )


def _basis_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Columns U|0>, U|1> for every angle pair; shape (n, 2 outcomes, 2 components)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    u0 = np.stack([c, s * e], axis=-1)
    u1 = np.stack([-s * np.conj(e), c], axis=-1)
    return np.stack([u0, u1], axis=1)


def _conditional_entropies(rho: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """sum_k p_k S(rho_A|k) after measuring B, for arrays of angles."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    shape = theta.shape
    u = _basis_vectors(theta.ravel(), phi.ravel())
    R = _as_tensor(rho)
    # unnormalized conditional states of A: <u_k| rho |u_k> taken on B
    sigma = np.einsum("nkb,abcd,nkd->nkac", u.conj(), R, u)
    sigma = 0.5 * (sigma + np.conj(np.swapaxes(sigma, -1, -2)))
    lam = np.linalg.eigvalsh(sigma)
    p = lam.sum(axis=-1)
    safe_p = np.where(p > EIG_FLOOR, p, 1.0)
    normed = lam / safe_p[..., None]
    per_outcome = np.where(p > EIG_FLOOR, p * _xlog2x_sum(normed), 0.0)
    return per_outcome.sum(axis=-1).reshape(shape)


def conditional_entropy_after_measurement(rho_AB, basis: MeasurementBasis) -> float:
    rho = check_density_matrix(rho_AB, 4)
    return float(_conditional_entropies(rho, np.array(basis.theta), np.array(basis.phi)))


def classical_correlation(rho_AB, basis: MeasurementBasis) -> float:
    """J(A|B) = S(A) - sum_k p_k S(rho_A|k) for one measurement on B."""
    rho = check_density_matrix(rho_AB, 4)
    return von_neumann_entropy(partial_trace_B(rho)) - conditional_entropy_after_measurement(rho, basis)


def angle_grid(n_theta: int, n_phi: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    n_phi = n_theta if n_phi is None else n_phi
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    return np.meshgrid(theta, phi, indexing="ij")


def classical_correlation_grid(rho_AB, n_theta: int, n_phi: int | None = None) -> np.ndarray:
    """J(theta, phi) over a uniform angle grid, shape (n_theta, n_phi)."""
    rho = check_density_matrix(rho_AB, 4)
    th, ph = angle_grid(n_theta, n_phi)
    return von_neumann_entropy(partial_trace_B(rho)) - _conditional_entropies(rho, th, ph)


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    mutual_information: float
    classical_correlation: float
    basis: MeasurementBasis
    grid_conditional_entropy: float
    conditional_entropy: float


def discord_details(rho_AB, grid: int = 64, n_seeds: int = 3, tol: float = 1e-10) -> DiscordResult:
    """Discord with measurement on B: coarse angle grid, then simplex refinement."""
    rho = check_density_matrix(rho_AB, 4)
    th, ph = angle_grid(grid)
    values = _conditional_entropies(rho, th, ph)
    order = np.argsort(values, axis=None, kind="stable")[:n_seeds]
    grid_best = float(values.flat[order[0]])
    best, best_x = grid_best, (float(th.flat[order[0]]), float(ph.flat[order[0]]))

    def objective(x):
        return float(_conditional_entropies(rho, np.array(x[0]), np.array(x[1])))

    for i in order:
        res = minimize(
            objective,
            x0=[th.flat[i], ph.flat[i]],
            method="Nelder-Mead",
            options={"fatol": tol, "xatol": 1e-9, "maxiter": 2000},
        )
        if res.fun < best:
            best, best_x = float(res.fun), (float(res.x[0]), float(res.x[1]))

    s_a = von_neumann_entropy(partial_trace_B(rho))
    mi = mutual_information(rho)
    j = s_a - best
    d = mi - j
    if d < -DISCORD_CLIP:
        raise RuntimeError(f"negative discord {d}: optimiser or input inconsistent")
    return DiscordResult(
        discord=max(d, 0.0),
        mutual_information=mi,
        classical_correlation=j,
        basis=MeasurementBasis.folded(*best_x),
        grid_conditional_entropy=grid_best,
        conditional_entropy=best,
    )


def quantum_discord(rho_AB, grid: int = 64) -> float:
    return discord_details(rho_AB, grid=grid).discord


def grid_discord(rho_AB, n_theta: int, n_phi: int | None = None) -> float:
    """Discord from a dense angle grid alone, without refinement."""
    rho = check_density_matrix(rho_AB, 4)
    j = classical_correlation_grid(rho, n_theta, n_phi)
    return mutual_information(rho) - float(j.max())
