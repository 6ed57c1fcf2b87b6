"""
Saturation Module

Closure of the truncated series into an excitation curve. The interacting gas behaves
like an ensemble of isolated atoms whose Rabi frequency is enhanced by
sqrt(N_d), N_d = 1 + gamma rho (|C_s| T)**(3/s), up to the intensity
I_0 = I_sat / N_d; above it the excitation fraction stays at 1 / N_d.

Functions:
    - suppression_factor: N_d.
    - saturated_fraction: Saturated excitation fraction 1 / N_d.
    - p0_truncated: Estimate 3 / (4 N_d) from the truncated series alone.
    - saturation_intensity: I_0 / I_sat.
    - excitation_curve: Excitation fraction against I / I_sat.
    - density_sweep: Saturated fraction on a density grid.
    - intensity_sweep: Excitation curve with the isolated-atom reference.
"""
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from rydberg_expansion.interactions import InteractionKernel


def suppression_factor(gamma, rho, kernel, T):
    """N_d = 1 + gamma rho (|C_s| T)**(3/s)."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise ValueError(f"density must be non-negative and finite, got {rho}")
    return 1.0 + gamma * rho * kernel.strength(T) ** (3.0 / kernel.s)


def saturated_fraction(gamma, rho, kernel, T):
    return 1.0 / suppression_factor(gamma, rho, kernel, T)


def p0_truncated(gamma, rho, kernel, T):
    return 0.75 / suppression_factor(gamma, rho, kernel, T)


def saturation_intensity(gamma, rho, kernel, T):
    """I_0 / I_sat."""
    return 1.0 / suppression_factor(gamma, rho, kernel, T)


def excitation_curve(n_d, intensity_ratio):
    """
    sin**2(pi sqrt(N_d x) / 2) / N_d below x = 1 / N_d, and 1 / N_d above.
    """
    x = np.asarray(intensity_ratio, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("intensity ratios must be non-negative")
    rising = np.sin(0.5 * np.pi * np.sqrt(n_d * np.minimum(x, 1.0 / n_d))) ** 2 / n_d
    values = np.where(x < 1.0 / n_d, rising, 1.0 / n_d)
    return values if values.ndim else float(values)


@dataclass(frozen=True)
class SaturationModel:
    gamma: float
    rho: float
    T: float
    kernel: InteractionKernel
    n_d: float

    @classmethod
    def from_inputs(cls, gamma, rho, kernel, T):
        return cls(gamma, rho, T, kernel, suppression_factor(gamma, rho, kernel, T))

    @property
    def P0(self):
        return 1.0 / self.n_d

    @property
    def P0_truncated(self):
        return 0.75 / self.n_d

    @property
    def I0_over_Isat(self):
        return 1.0 / self.n_d

    def excitation(self, intensity_ratio):
        return excitation_curve(self.n_d, intensity_ratio)

    def to_record(self):
        return {"gamma": self.gamma, "rho": self.rho, "T": self.T, "s": self.kernel.s,
                "C_au": self.kernel.C_au, "N_d": self.n_d, "P0": self.P0,
                "P0_truncated": self.P0_truncated, "I0_over_Isat": self.I0_over_Isat}


def _check_grid(grid, name):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid < 0.0) or np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} grid must be non-negative and strictly increasing")
    return grid


def density_sweep(gamma, kernel, T, rho_grid):
    """Saturated fraction P0 = 1 / N_d for each density (cm**-3)."""
    rho = _check_grid(rho_grid, "density")
    n_d = 1.0 + gamma * rho * kernel.strength(T) ** (3.0 / kernel.s)
    return pd.DataFrame({"rho": rho, "N_d": n_d, "P0": 1.0 / n_d,
                         "P0_truncated": 0.75 / n_d})


def intensity_sweep(model, intensity_grid):
    """Model excitation fraction and the isolated-atom sin**2(pi sqrt(x) / 2)."""
    x = _check_grid(intensity_grid, "intensity")
    return pd.DataFrame({"I_over_Isat": x, "P": model.excitation(x),
                         "P_isolated": np.sin(0.5 * np.pi * np.sqrt(x)) ** 2})
