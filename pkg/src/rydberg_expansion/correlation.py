"""
Correlation Module

Lowest-order pair correlation of two atoms at separation R,

    P(R) = <n1 n2> / (<n1> <n2>) = 16 c4(k) / |F|**4,
    c4(k) = 1/4 |int exp(i k t) f(t) F(t) dt|**2,

with k the scaled coupling at R. P < 1 signals blockade; P > 1 appears for detuned
or chirped pulses whose frequency sweep crosses the pair resonance.

Functions:
    - c4: Doubly-excited pair population coefficient.
    - pair_correlation: P for given separations.
    - correlation_scan: P on a grid of separations.
    - correlation_peak: Largest P on a curve, refined between grid points.
    - has_positive_correlation: Whether a curve exceeds 1 anywhere.
    - chirp_family, detuning_family: Pulse families of the correlation scans.
    - correlation_family: Scans a pulse family in parallel.
"""
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import optimize

from rydberg_expansion.errors import UndefinedCorrelationError
from rydberg_expansion.interactions import CM_PER_UM, coupling_at_distance
from rydberg_expansion.pulse import (
    PulseShape,
    PulseSpec,
    tabulate,
    transform_limited_bandwidth,
    with_bandwidth,
)
from rydberg_expansion.quadrature import ComplexSpline, spline_fourier

_logger = logging.getLogger(__name__)

DEFAULT_R_GRID_UM = np.geomspace(0.5, 20.0, 200)
_AREA_FLOOR = 1e-12


@functools.lru_cache(maxsize=32)
def _pair_integrand(p, tau):
    table = tabulate(p)
    upper = table.pulse.tau_end if tau is None else min(max(tau, p.tau0), p.tau_end)
    nodes = np.linspace(p.tau0, upper, table.nodes.size)
    spline = ComplexSpline(nodes - p.tau0, table.f(nodes) * table.F(nodes))
    return spline, table.F(upper)


def c4(p, k, tau=None):
    """
    c4(k) = 1/4 |int_{tau0}^{tau} exp(i k t) f(t) F(t) dt|**2.

    Args:
        p (PulseSpec): Pulse.
        k (float or array_like): Scaled couplings.
        tau (float): Upper limit, end of the pulse when omitted.

    Returns:
        float or np.ndarray: c4 for each k.
    """
    spline, _ = _pair_integrand(p, tau)
    k = np.asarray(k, dtype=float)
    values = 0.25 * np.abs(spline_fourier(spline, k.ravel())) ** 2
    return values.reshape(k.shape) if k.ndim else float(values[0])


def pair_correlation(p, kernel, r_um, theta=0.0, tau=None):
    """
    Pair correlation P(R) = 16 c4(k(R)) / |F(tau)|**4.

    Args:
        p (PulseSpec): Pulse.
        kernel (InteractionKernel): Interaction.
        r_um (float or array_like): Separations in micrometres.
        theta (float): Angle between the separation and the dipole axis.

    Raises:
        UndefinedCorrelationError: If |F(tau)| vanishes.
    """
    _, area = _pair_integrand(p, tau)
    if abs(area) < _AREA_FLOOR:
        raise UndefinedCorrelationError("pair correlation is undefined for zero pulse area")
    k = coupling_at_distance(kernel, p, np.asarray(r_um, dtype=float) * CM_PER_UM, theta)
    return 16.0 * c4(p, k, tau) / abs(area) ** 4


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    """P(R) of one pulse on a grid of separations (micrometres)."""

    label: str
    pulse: PulseSpec
    r_um: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)

    def to_frame(self):
        return pd.DataFrame({"curve": self.label, "R_um": self.r_um, "k": self.k,
                             "P": self.P})


def correlation_scan(p, kernel, r_grid_um=None, tau=None, *, theta=0.0, label=None):
    """
    Evaluates P(R) on ``r_grid_um`` (0.5-20 um, 200 log-spaced points by default).

    Raises:
        ValueError: If the grid is not positive and strictly increasing.
    """
    r = DEFAULT_R_GRID_UM if r_grid_um is None else np.asarray(r_grid_um, dtype=float)
    if r.ndim != 1 or r.size == 0 or np.any(r <= 0.0) or np.any(np.diff(r) <= 0.0):
        raise ValueError("separation grid must be positive and strictly increasing")
    k = coupling_at_distance(kernel, p, r * CM_PER_UM, theta)
    P = pair_correlation(p, kernel, r, theta, tau)
    return CorrelationCurve(label or p.shape.value, p, r, k, P)


def correlation_peak(curve, kernel, *, theta=0.0, tau=None):
    """
    Largest P on ``curve``, refined by a bounded scalar search around the best point.

    Returns:
        tuple: (R in micrometres, P)
    """
    best = int(np.argmax(curve.P))
    lo = curve.r_um[max(best - 1, 0)]
    hi = curve.r_um[min(best + 1, curve.r_um.size - 1)]
    if lo == hi:
        return float(curve.r_um[best]), float(curve.P[best])
    result = optimize.minimize_scalar(
        lambda r: -pair_correlation(curve.pulse, kernel, r, theta, tau),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-6 * hi},
    )
    if -result.fun > curve.P[best]:
        return float(result.x), float(-result.fun)
    return float(curve.r_um[best]), float(curve.P[best])


def has_positive_correlation(curve, threshold=1.0, margin=1e-6):
    """
    True when P exceeds ``threshold`` by more than ``margin`` somewhere on the curve.

    Uncorrelated pairs at large separations sit at P = 1 up to rounding.
    """
    return bool(np.max(curve.P) > threshold + margin)


def chirp_family(base_bandwidth, bandwidths, negative_bandwidths=(),
                 shape=PulseShape.GAUSSIAN):
    """
    Pulses sharing the duration of a ``base_bandwidth`` (Hz) transform-limited pulse,
    chirped positively to each of ``bandwidths`` and negatively to each of
    ``negative_bandwidths``.

    Returns:
        list: (label, PulseSpec) pairs.
    """
    T = transform_limited_bandwidth(shape, 1.0) / base_bandwidth
    base = PulseSpec(shape, T)
    family = []
    for sign, targets in ((1, bandwidths), (-1, negative_bandwidths)):
        for gamma in targets:
            label = f"{gamma / 1e6:g} MHz{' negative chirp' if sign < 0 else ''}"
            family.append((label, with_bandwidth(base, gamma, sign)))
    return family


def detuning_family(pulse, detunings):
    """Copies of ``pulse`` detuned by each of ``detunings`` (Hz)."""
    return [(f"{delta / 1e6:+g} MHz", pulse.with_detuning(delta)) for delta in detunings]


def correlation_family(family, kernel, r_grid_um=None, *, theta=0.0, workers=1):
    """Scans every (label, pulse) of ``family``; the output keeps the input order."""

    def scan(item):
        label, pulse = item
        return correlation_scan(pulse, kernel, r_grid_um, theta=theta, label=label)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        curves = list(pool.map(scan, family))
    for curve in curves:
        _logger.info("Curve %s: max P = %.4f", curve.label, float(np.max(curve.P)))
    return curves
