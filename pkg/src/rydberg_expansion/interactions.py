"""
Interactions Module

Pair couplings between Rydberg atoms and random atom ensembles.

Two atoms at separation R interact through V = h C_s A(theta) / R**s with s = 6
(van der Waals, isotropic) or s = 3 (dipole-dipole, isotropic or aligned along a
quantisation axis). In scaled time the coupling is k = 2 pi C_s T A(theta) / R**s.

Functions:
    - au_to_hz: Converts C_s from atomic units to Hz cm**s.
    - coupling: Scaled coupling of one atom pair.
    - couplings_from: Scaled couplings of one atom to many others.
    - coupling_matrix: Symmetric coupling matrix of an ensemble.
    - coupling_at_distance: Scaled coupling as a function of separation and angle.
    - sample_ensemble: Uniform random atom positions in a box or sphere.

Usage:
    from rydberg_expansion.interactions import InteractionKernel
    kernel = InteractionKernel(s=6, C_au=-3.08e21)
"""
import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from scipy.constants import physical_constants

from rydberg_expansion import environment
from rydberg_expansion.errors import EnsembleError

_logger = logging.getLogger(__name__)

HARTREE_HZ = physical_constants["hartree-hertz relationship"][0]
BOHR_RADIUS_CM = physical_constants["Bohr radius"][0] * 1e2
CM_PER_UM = 1e-4


class AngularForm(str, enum.Enum):
    ISOTROPIC = "isotropic"
    ALIGNED_DIPOLE = "aligned-dipole"


class Geometry(str, enum.Enum):
    BOX = "box"
    SPHERE = "sphere"


def au_to_hz(c_au, s):
    """C_s in Hz cm**s from atomic units (E_h a_0**s)."""
    return c_au * HARTREE_HZ * BOHR_RADIUS_CM ** s


@dataclass(frozen=True)
class InteractionKernel:
    """
    Interaction strength and angular form.

    Attributes:
        s (int): Power law exponent, 3 or 6.
        C_au (float): Signed C_s in atomic units; negative is attractive.
        angular (AngularForm): Isotropic, or 1 - 3 cos**2 for aligned dipoles (s = 3).
        axis (tuple): Quantisation axis of aligned dipoles.
        allow_zero (bool): Permits C_s = 0, the non-interacting limit.
    """

    s: int = 6
    C_au: float = 0.0
    angular: AngularForm = AngularForm.ISOTROPIC
    axis: tuple = (0.0, 0.0, 1.0)
    allow_zero: bool = False

    def __post_init__(self):
        if self.s not in (3, 6):
            raise ValueError(f"interaction exponent s must be 3 or 6, got {self.s}")
        angular = AngularForm(self.angular)
        object.__setattr__(self, "angular", angular)
        if angular is AngularForm.ALIGNED_DIPOLE and self.s != 3:
            raise ValueError("aligned dipoles need s = 3")
        if not math.isfinite(self.C_au):
            raise ValueError("C_s must be finite")
        if self.C_au == 0.0 and not self.allow_zero:
            raise ValueError("C_s must be non-zero; use InteractionKernel.non_interacting()")
        axis = np.asarray(self.axis, dtype=float)
        norm = np.linalg.norm(axis)
        if axis.shape != (3,) or norm == 0.0:
            raise ValueError("the quantisation axis must be a non-zero 3-vector")
        object.__setattr__(self, "axis", tuple(axis / norm))

    @classmethod
    def non_interacting(cls, s=6):
        return cls(s=s, C_au=0.0, allow_zero=True)

    @property
    def C_hz(self):
        """C_s in Hz cm**s."""
        return au_to_hz(self.C_au, self.s)

    @property
    def sign(self):
        return int(np.sign(self.C_au))

    @property
    def is_interacting(self):
        return self.C_au != 0.0

    def strength(self, T):
        """|C_s| T in cm**s."""
        return abs(self.C_hz) * T

    def blockade_radius(self, T):
        """Distance (cm) at which an isotropic pair coupling has |k| = 1."""
        return (2.0 * math.pi * self.strength(T)) ** (1.0 / self.s)

    def angular_factor(self, directions):
        """A(theta) for unit separation vectors of shape (..., 3)."""
        directions = np.asarray(directions, dtype=float)
        if self.angular is AngularForm.ISOTROPIC:
            return np.ones(directions.shape[:-1])
        cos = directions @ np.asarray(self.axis)
        return 1.0 - 3.0 * cos ** 2

    def scaled(self, factor):
        return replace(self, C_au=self.C_au * factor)


def couplings_from(kernel, pulse, origin, positions):
    """
    Scaled couplings between the atom at ``origin`` and each row of ``positions``.

    Args:
        kernel (InteractionKernel): Interaction.
        pulse (PulseSpec): Supplies the duration T.
        origin (array_like): Position (cm) of the reference atom.
        positions (array_like): Positions (cm) of shape (n, 3).

    Returns:
        np.ndarray: k values of shape (n,).
    """
    separation = np.atleast_2d(np.asarray(positions, dtype=float)) - np.asarray(origin)
    distance = np.linalg.norm(separation, axis=1)
    if np.any(distance == 0.0):
        raise ValueError("coincident atoms have no finite coupling")
    unit = separation / distance[:, None]
    return (2.0 * math.pi * kernel.C_hz * pulse.T * kernel.angular_factor(unit)
            / distance ** kernel.s)


def coupling(kernel, pulse, r_i, r_j):
    """Scaled coupling k_ij between atoms at positions ``r_i`` and ``r_j`` (cm)."""
    return float(couplings_from(kernel, pulse, r_i, [r_j])[0])


def coupling_matrix(kernel, pulse, positions):
    """Symmetric (n, n) matrix of scaled couplings with a zero diagonal."""
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    matrix = np.zeros((n, n))
    for i in range(n - 1):
        matrix[i, i + 1:] = couplings_from(kernel, pulse, positions[i], positions[i + 1:])
    return matrix + matrix.T


def coupling_at_distance(kernel, pulse, distance_cm, theta=0.0):
    """Scaled coupling at separation ``distance_cm`` and angle ``theta`` to the axis."""
    distance_cm = np.asarray(distance_cm, dtype=float)
    if np.any(distance_cm <= 0.0):
        raise ValueError("separations must be positive")
    if kernel.angular is AngularForm.ISOTROPIC:
        factor = 1.0
    else:
        factor = 1.0 - 3.0 * math.cos(theta) ** 2
    return 2.0 * math.pi * kernel.C_hz * pulse.T * factor / distance_cm ** kernel.s


@dataclass(frozen=True, eq=False)
class AtomEnsemble:
    """
    Atom positions (cm) drawn uniformly at density ``rho`` (cm**-3).

    ``extent`` is the sphere radius or the box side.
    """

    positions: np.ndarray
    rho: float
    geometry: Geometry
    extent: float
    seed: object = None

    @property
    def n_atoms(self):
        return self.positions.shape[0]

    @property
    def inscribed_radius(self):
        return self.extent if self.geometry is Geometry.SPHERE else 0.5 * self.extent

    def to_frame(self):
        return pd.DataFrame(self.positions, columns=["x_cm", "y_cm", "z_cm"])


def region_volume(geometry, radius):
    """Volume of a sphere of ``radius`` or of the cube inscribing it."""
    if Geometry(geometry) is Geometry.SPHERE:
        return 4.0 * math.pi * radius ** 3 / 3.0
    return (2.0 * radius) ** 3


def inscribed_radius(geometry, volume):
    if Geometry(geometry) is Geometry.SPHERE:
        return (3.0 * volume / (4.0 * math.pi)) ** (1.0 / 3.0)
    return 0.5 * volume ** (1.0 / 3.0)


def sample_ensemble(rho, geometry, volume, seed=None, *, max_atoms=None,
                    include_origin=False):
    """
    Draws floor(rho * volume) atoms uniformly in a box or a sphere centred on 0.

    Args:
        rho (float): Density, cm**-3.
        geometry (Geometry or str): ``box`` or ``sphere``.
        volume (float): Region volume, cm**3.
        seed (int or np.random.SeedSequence): Seed of the generator.
        max_atoms (int): Atom-count cap, RYDBERG_MAX_ATOMS when omitted.
        include_origin (bool): Prepend an atom at the origin.

    Returns:
        AtomEnsemble: Sampled positions.
    """
    geometry = Geometry(geometry)
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise EnsembleError(f"density must be non-negative and finite, got {rho}")
    if not volume > 0.0:
        raise EnsembleError(f"volume must be positive, got {volume}")
    n = int(math.floor(rho * volume))
    limit = environment.max_atoms() if max_atoms is None else max_atoms
    if n > limit:
        raise EnsembleError(f"{n} atoms requested, the limit is {limit} (RYDBERG_MAX_ATOMS)")

    rng = np.random.default_rng(seed)
    if geometry is Geometry.BOX:
        extent = volume ** (1.0 / 3.0)
        positions = rng.uniform(-0.5 * extent, 0.5 * extent, size=(n, 3))
    else:
        extent = inscribed_radius(geometry, volume)
        directions = rng.normal(size=(n, 3))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        positions = directions * (extent * rng.random(n) ** (1.0 / 3.0))[:, None]
    if include_origin:
        positions = np.vstack([np.zeros((1, 3)), positions])
    _logger.debug("Sampled %d atoms in a %s of extent %.3g cm", n, geometry.value, extent)
    return AtomEnsemble(positions, rho, geometry, extent, seed)
