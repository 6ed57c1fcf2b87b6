"""
Oracle Module

Exact propagation of a few two-level atoms with pairwise interactions,

    H(tau) = omega/2 sum_i (f(tau) sigma_eg^i + h.c.) + sum_{i<j} k_ij n_i n_j,

used to check the series coefficients. Basis states are bit strings (bit i set means
atom i is excited). The interaction is diagonal, so the state is propagated in the
frame rotating with it and only the drive, a sparse bit-flip operator, enters the
right-hand side of ``solve_ivp``. Pairs with |k| at or above ``hard_blockade`` are
treated as perfectly blockaded: basis states exciting both atoms are removed.

Functions:
    - basis_occupations: Occupation table of the 2**N basis.
    - propagate: Solves the Schrodinger equation from the ground state.
    - observables: Excitation probabilities and pair correlations of a state.
    - collective_state: Symmetric single-excitation state.
    - fit_power_law: Fits residual = A omega**p.
    - expansion_residual: Residual order of the truncated series against the oracle.
    - trajectory_frame: Observables of a trajectory as a DataFrame.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import integrate, sparse

from rydberg_expansion import environment
from rydberg_expansion.errors import ExpansionOrderError, FitError, OracleError
from rydberg_expansion.expansion import i41, i4_finite, second_order
from rydberg_expansion.pulse import envelope, pulse_area

_logger = logging.getLogger(__name__)

HARD_BLOCKADE = 1e5
NORM_TOLERANCE = 1e-9
DEFAULT_OMEGA_SPAN = (0.15, 1.5)


def basis_occupations(n_atoms):
    """Boolean table of shape (2**N, N); entry [b, i] is bit i of b."""
    states = np.arange(2 ** n_atoms)
    return ((states[:, None] >> np.arange(n_atoms)[None, :]) & 1).astype(bool)


def _check_couplings(couplings, n_atoms):
    k = np.asarray(couplings, dtype=float)
    if k.shape != (n_atoms, n_atoms):
        raise ValueError(f"coupling matrix must have shape ({n_atoms}, {n_atoms})")
    if not np.all(np.isfinite(k)):
        raise ValueError("couplings must be finite")
    if np.any(np.diag(k) != 0.0):
        raise ValueError("coupling matrix must have a zero diagonal")
    if not np.allclose(k, k.T, rtol=1e-12, atol=0.0):
        raise ValueError("coupling matrix must be symmetric")
    return k


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States (rows, in the bit-string basis) at the output times ``taus``."""

    taus: np.ndarray
    states: np.ndarray = field(repr=False)
    n_atoms: int

    def populations(self):
        """Excitation probability of each atom, shape (times, N)."""
        occupation = basis_occupations(self.n_atoms).astype(float)
        return (np.abs(self.states) ** 2) @ occupation

    def pair_correlations(self):
        """<n_i n_j>, shape (times, N, N); the diagonal holds <n_i>."""
        occupation = basis_occupations(self.n_atoms).astype(float)
        weights = np.abs(self.states) ** 2
        return np.einsum("tb,bi,bj->tij", weights, occupation, occupation)

    def norms(self):
        return np.linalg.norm(self.states, axis=1)


class _Hamiltonian:
    def __init__(self, n_atoms, couplings, hard_blockade):
        occupation = basis_occupations(n_atoms)
        dim = 2 ** n_atoms
        pairs = np.triu_indices(n_atoms, 1)
        hard = np.abs(couplings[pairs]) >= hard_blockade
        both = occupation[:, pairs[0]] & occupation[:, pairs[1]]

        self.allowed = ~np.any(both[:, hard], axis=1)
        soft = both[:, ~hard].astype(float) @ couplings[pairs][~hard]
        self.diagonal = np.where(self.allowed, soft, 0.0)

        rows, cols = [], []
        for i in range(n_atoms):
            lower = np.flatnonzero(~occupation[:, i])
            upper = lower | (1 << i)
            keep = self.allowed[lower] & self.allowed[upper]
            rows.append(upper[keep])
            cols.append(lower[keep])
        rows, cols = np.concatenate(rows), np.concatenate(cols)
        self.raising = sparse.csr_matrix((np.ones(rows.size), (rows, cols)),
                                         shape=(dim, dim))
        self.lowering = self.raising.T.tocsr()


def propagate(n_atoms, couplings, pulse, omega, output_times=None, *, rtol=1e-10,
              atol=1e-12, hard_blockade=HARD_BLOCKADE, max_atoms=None):
    """
    Propagates N atoms from the ground state through ``pulse``.

    Args:
        n_atoms (int): Number of atoms, 1 to RYDBERG_ORACLE_MAX_N.
        couplings (array_like): Symmetric (N, N) scaled couplings, zero diagonal.
        pulse (PulseSpec): Drive.
        omega (float): Scaled Rabi amplitude.
        output_times (array_like): Increasing times inside the pulse window; the end
                                   of the pulse by default.
        rtol, atol (float): Tolerances of the DOP853 integrator.
        hard_blockade (float): |k| treated as an infinite interaction.

    Returns:
        Trajectory: States at the output times.

    Raises:
        OracleError: If N exceeds the atom limit or the integrator fails.
    """
    limit = environment.oracle_max_atoms() if max_atoms is None else max_atoms
    if n_atoms < 1:
        raise ValueError(f"at least one atom is required, got {n_atoms}")
    if n_atoms > limit:
        raise OracleError(f"{n_atoms} atoms exceed the limit of {limit} "
                          "(RYDBERG_ORACLE_MAX_N)")
    couplings = _check_couplings(couplings, n_atoms)
    if output_times is None:
        taus = np.array([pulse.tau_end])
    else:
        taus = np.asarray(output_times, dtype=float)
        if (taus.ndim != 1 or taus.size == 0 or np.any(np.diff(taus) <= 0.0)
                or taus[0] < pulse.tau0 or taus[-1] > pulse.tau_end):
            raise ValueError("output times must increase within the pulse window")

    hamiltonian = _Hamiltonian(n_atoms, couplings, hard_blockade)
    diagonal = hamiltonian.diagonal
    raising, lowering = hamiltonian.raising, hamiltonian.lowering
    half_omega = 0.5 * omega

    def rhs(tau, phi):
        phase = np.exp(1j * diagonal * tau)
        psi = phi * np.conj(phase)
        drive = complex(envelope(pulse, tau))
        coupled = drive * (raising @ psi) + drive.conjugate() * (lowering @ psi)
        return -1j * half_omega * phase * coupled

    initial = np.zeros(2 ** n_atoms, dtype=complex)
    initial[0] = 1.0
    solution = integrate.solve_ivp(rhs, (pulse.tau0, taus[-1]), initial, method="DOP853",
                                   t_eval=taus, rtol=rtol, atol=atol, max_step=0.1)
    if not solution.success:
        raise OracleError(f"propagation failed: {solution.message}")

    states = (solution.y * np.exp(-1j * np.outer(diagonal, solution.t))).T
    trajectory = Trajectory(solution.t, states, n_atoms)
    drift = float(np.max(np.abs(trajectory.norms() - 1.0)))
    if drift > NORM_TOLERANCE:
        _logger.warning("Norm drift %.2g exceeds %.0e; tighten the tolerances",
                        drift, NORM_TOLERANCE)
    _logger.debug("Propagated %d atoms in %d right-hand side evaluations", n_atoms,
                  solution.nfev)
    return trajectory


def observables(state, n_atoms):
    """
    Returns the excitation probability of each atom and the matrix of <n_i n_j>.
    """
    trajectory = Trajectory(np.zeros(1), np.asarray(state, dtype=complex)[None, :],
                            n_atoms)
    return trajectory.populations()[0], trajectory.pair_correlations()[0]


def collective_state(n_atoms):
    """(1 / sqrt(N)) sum_i |g...e_i...g>."""
    state = np.zeros(2 ** n_atoms, dtype=complex)
    state[1 << np.arange(n_atoms)] = 1.0 / np.sqrt(n_atoms)
    return state


@dataclass(frozen=True, eq=False)
class ResidualFit:
    """Least-squares fit residual = amplitude * omega**order."""

    order: float
    amplitude: float
    omegas: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)


def fit_power_law(omegas, residuals, *, floor=1e-13):
    """
    Fits log(residual) against log(omega) with ``numpy.polyfit``.

    Raises:
        FitError: Fewer than three points, less than a decade in omega, or residuals
                  at the numerical noise floor.
    """
    omegas = np.asarray(omegas, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if omegas.size < 3 or omegas.size != residuals.size:
        raise FitError("at least three (omega, residual) pairs are needed")
    if np.any(omegas <= 0.0) or omegas.max() / omegas.min() < 10.0 * (1.0 - 1e-9):
        raise FitError("omega values must be positive and span at least a decade")
    if np.any(residuals <= floor):
        raise FitError(f"residuals below the noise floor {floor:.0e}; increase omega")
    order, intercept = np.polyfit(np.log(omegas), np.log(residuals), 1)
    return ResidualFit(float(order), float(np.exp(intercept)), omegas, residuals)


def expansion_residual(couplings, pulse, omega_list=None, *, atom=0, min_order=5.5,
                       **propagate_options):
    """
    Compares the series c2 omega**2 + c4 omega**4 for ``atom`` with the exact
    excitation probability and fits the residual's power of omega.

    Args:
        couplings (array_like): Symmetric (N, N) coupling matrix.
        pulse (PulseSpec): Drive.
        omega_list (array_like): Rabi amplitudes; 7 log-spaced values with omega W
                                 between 0.15 and 1.5 by default.
        atom (int): Atom whose probability is compared.
        min_order (float): Smallest acceptable order, None to skip the check.
        **propagate_options: Passed to :func:`propagate`.

    Returns:
        ResidualFit: Fitted order and amplitude.

    Raises:
        ExpansionOrderError: If the fitted order is below ``min_order``.
    """
    couplings = np.asarray(couplings, dtype=float)
    n_atoms = couplings.shape[0]
    if omega_list is None:
        omega_list = np.geomspace(*DEFAULT_OMEGA_SPAN, 7) / pulse_area(pulse)
    omegas = np.asarray(omega_list, dtype=float)

    c2 = second_order(pulse)
    c4 = -(i41(pulse) + i4_finite(pulse, np.delete(couplings[atom], atom)))
    exact = np.array([
        propagate(n_atoms, couplings, pulse, omega, **propagate_options).populations()[-1, atom]
        for omega in omegas
    ])
    residuals = np.abs(exact - (c2 * omegas ** 2 + c4 * omegas ** 4))
    fit = fit_power_law(omegas, residuals)
    _logger.info("Residual order %.3f (amplitude %.3g) for %d atoms", fit.order,
                 fit.amplitude, n_atoms)
    if min_order is not None and fit.order < min_order:
        raise ExpansionOrderError(
            f"residual scales as omega**{fit.order:.2f}, expected at least "
            f"omega**{min_order}"
        )
    return fit


def trajectory_frame(trajectory):
    """One row per output time: tau, P_i for each atom and <n_i n_j> for i < j."""
    columns = {"tau": trajectory.taus}
    populations = trajectory.populations()
    pairs = trajectory.pair_correlations()
    for i in range(trajectory.n_atoms):
        columns[f"P_{i}"] = populations[:, i]
    for i in range(trajectory.n_atoms):
        for j in range(i + 1, trajectory.n_atoms):
            columns[f"nn_{i}_{j}"] = pairs[:, i, j]
    columns["norm"] = trajectory.norms()
    return pd.DataFrame(columns)
