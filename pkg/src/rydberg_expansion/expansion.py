"""
Expansion Module

Power series of the Rydberg excitation probability of one atom in powers of the
scaled Rabi amplitude omega:

    P_exc = c2 omega**2 - (I41 + I4) omega**4 + O(omega**6)

c2 and I41 describe the isolated atom. I4 collects the pair terms; it vanishes without
interactions and reaches W**4 / 48 per fully blockaded neighbour. Every pair term is
a Fourier integral of the lag profile

    C(u) = int_{tau0}^{tau - u} p(t + u) q(t) dt,
    p = f (F(tau) - 2 F),   q = conj(f F),

    I4 = 1/4 sum_j Re int_0^L (exp(i k_j u) - 1) C(u) du.

Averaged over a uniform gas of density rho the sum becomes

    I4 = rho/4 Re[lambda (|C_s| T)**(3/s) int_0^L u**(3/s) C(u) du],

with lambda a number that only depends on the interaction kernel.

Functions:
    - second_order, i41: Isolated-atom coefficients.
    - lag_profile: Cached tabulated lag profile.
    - i4_finite: Pair term for an explicit list of couplings.
    - lambda_constant: Ensemble constant of an interaction kernel.
    - i4_averaged: Pair term averaged over a uniform gas.
    - i4_montecarlo: Pair term averaged over sampled ensembles.
    - gamma_constant: Dimensionless blockade constant of a pulse shape.
    - pexc_series: Truncated excitation probability against I / I_sat.
    - expand: All coefficients for one scenario.
    - blockade_probability, rabi_probability: Closed forms for real pulses.
"""
import functools
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from tqdm import tqdm

from rydberg_expansion.errors import DivergentIntegralError, EnsembleError
from rydberg_expansion.interactions import (
    AngularForm,
    Geometry,
    couplings_from,
    inscribed_radius,
    region_volume,
    sample_ensemble,
)
from rydberg_expansion.pulse import PulseSpec, pulse_area, tabulate
from rydberg_expansion.quadrature import (
    ComplexSpline,
    quad_complex,
    quad_real,
    spline_fourier,
    spline_power_moment,
)

_logger = logging.getLogger(__name__)

ASYMPTOTIC_COUPLING = 1e6
LAG_POINTS = 1024
LAG_PANELS = 128


class SeriesTruncationWarning(UserWarning):
    """The fourth order term exceeds half of the second order term."""


def _upper(p, tau):
    if tau is None:
        return p.tau_end
    return min(max(float(tau), p.tau0), p.tau_end)


def _running_area(p, tau):
    table = tabulate(p)
    return table.total if tau is None else table.F(_upper(p, tau))


def second_order(p, tau=None):
    """c2 = |F(tau)|**2 / 4."""
    return abs(_running_area(p, tau)) ** 2 / 4.0


def i41(p, tau=None):
    """
    Isolated-atom fourth order term.

    I41 = |F|**4 / 16 - Re[F / 8 int f* F**2], which is W**4 / 48 for a real pulse.
    """
    table = tabulate(p)
    upper = _upper(p, tau)
    area = table.F(upper)
    if upper <= p.tau0:
        return 0.0
    inner, _ = quad_complex(lambda x: np.conj(table.f(x)) * table.F(x) ** 2,
                            p.tau0, upper, limit=400)
    return abs(area) ** 4 / 16.0 - (area / 8.0 * inner).real


class LagProfile:
    """
    Lag profile C(u) on [0, L], L = tau - tau0, as a cubic spline.

    Each sample is a composite Gauss-Legendre rule over the overlap of the pulse with
    its copy shifted by u.
    """

    def __init__(self, pulse, tau=None, *, points=LAG_POINTS, panels=LAG_PANELS,
                 gauss_order=8):
        table = tabulate(pulse)
        upper = _upper(pulse, tau)
        self.length = upper - pulse.tau0
        self._spline = None
        if self.length <= 0.0:
            return

        lags = np.linspace(0.0, self.length, points + 1)
        gauss_x, gauss_w = leggauss(gauss_order)
        edges = np.linspace(0.0, 1.0, panels + 1)
        mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
        unit_nodes = (mid[:, None] + half[:, None] * gauss_x[None, :]).ravel()
        unit_weights = (half[:, None] * gauss_w[None, :]).ravel()
        final_area = table.F(upper)

        values = np.empty(lags.size, dtype=complex)
        for chunk in np.array_split(np.arange(lags.size), max(1, lags.size // 64)):
            u = lags[chunk, None]
            span = self.length - u
            early = pulse.tau0 + span * unit_nodes[None, :]
            late = early + u
            integrand = (table.f(late) * (final_area - 2.0 * table.F(late))
                         * np.conj(table.f(early) * table.F(early)))
            values[chunk] = span[:, 0] * (integrand @ unit_weights)
        self._spline = ComplexSpline(lags, values)

    def __call__(self, u):
        return self._spline(u)

    @property
    def total(self):
        """int_0^L C(u) du."""
        return 0j if self._spline is None else self._spline.integral()

    def fourier(self, k, *, asymptotic_threshold=ASYMPTOTIC_COUPLING):
        """int_0^L (exp(i k u) - 1) C(u) du for each k; exactly 0 where k = 0."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        if self._spline is None:
            return np.zeros(k.shape, dtype=complex)
        out = spline_fourier(self._spline, k, asymptotic_threshold=asymptotic_threshold,
                             subtract=1.0)
        out[k == 0.0] = 0.0
        return out

    def power_moment(self, alpha):
        """int_0^L u**alpha C(u) du."""
        if self._spline is None:
            return 0j
        return spline_power_moment(self._spline, alpha)


@functools.lru_cache(maxsize=16)
def lag_profile(p, tau=None):
    """Cached LagProfile of ``p`` up to ``tau``."""
    return LagProfile(p, tau)


def i4_finite(p, couplings, tau=None, *, asymptotic_threshold=ASYMPTOTIC_COUPLING):
    """
    Pair term I4 for one atom coupled to neighbours with scaled couplings ``couplings``.

    Args:
        p (PulseSpec): Pulse.
        couplings (array_like): k_j, finite reals; an empty list gives 0.
        tau (float): Evaluation time, end of the pulse when omitted.
        asymptotic_threshold (float): |k| above which the endpoint expansion is used.

    Returns:
        float: I4, summed with compensated arithmetic.
    """
    k = np.asarray(couplings, dtype=float).ravel()
    if k.size == 0:
        return 0.0
    if not np.all(np.isfinite(k)):
        raise ValueError("couplings must be finite")
    values = lag_profile(p, tau).fourier(k, asymptotic_threshold=asymptotic_threshold)
    return 0.25 * math.fsum(values.real)


@dataclass(frozen=True)
class InteractionConstant:
    """
    Ensemble constant lambda of a kernel.

    ``imag`` is None when the imaginary part diverges (isotropic s = 3).
    """

    real: float
    imag: float = None

    @property
    def divergent(self):
        return self.imag is None

    @property
    def value(self):
        if self.divergent:
            raise DivergentIntegralError(
                "the imaginary part of lambda diverges for isotropic 1/R**3 couplings; "
                "use the Monte Carlo estimator"
            )
        return complex(self.real, self.imag)


def _radial_integral(mu):
    """
    Real and imaginary parts of int_0^inf y**(mu - 1) (exp(iy) - 1) dy.

    The imaginary part is None for mu <= -1, where it diverges at y -> 0.
    """
    head, _ = quad_real(lambda y: -2.0 * np.sin(0.5 * y) ** 2 * y ** (mu - 1.0), 0.0, 1.0)
    tail, _ = quad_real(lambda y: y ** (mu - 1.0), 1.0, np.inf, weight="cos", wvar=1.0)
    real = head + tail + 1.0 / mu
    if mu <= -1.0:
        return real, None
    head, _ = quad_real(lambda y: np.sinc(y / np.pi), 0.0, 1.0, weight="alg",
                        wvar=(mu, 0.0))
    tail, _ = quad_real(lambda y: y ** (mu - 1.0), 1.0, np.inf, weight="sin", wvar=1.0)
    return real, head + tail


@functools.lru_cache(maxsize=None)
def _lambda_parts(s, angular, sign):
    mu = -3.0 / s
    radial_re, radial_im = _radial_integral(mu)
    prefactor = (2.0 * math.pi) ** (3.0 / s) / s
    if angular is AngularForm.ISOTROPIC:
        real = prefactor * 4.0 * math.pi * radial_re
        imag = None if radial_im is None else sign * prefactor * 4.0 * math.pi * radial_im
        return real, imag

    # 1 - 3 cos**2 changes sign at the magic angle
    magic = [-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)]
    solid, _ = quad_real(lambda c: abs(1.0 - 3.0 * c ** 2), -1.0, 1.0, points=magic)
    real = prefactor * 2.0 * math.pi * solid * radial_re

    def log_weighted(c):
        a = 1.0 - 3.0 * c ** 2
        return -a * math.log(abs(a)) if a != 0.0 else 0.0

    logs, _ = quad_real(log_weighted, -1.0, 1.0, points=magic)
    imag = sign * (2.0 * math.pi) * 2.0 * math.pi * logs / 3.0
    return real, imag


def lambda_constant(kernel):
    """
    Ensemble constant lambda = (2 pi)**(3/s) int d^3x (exp(i sgn(C) A / x**s) - 1).

    Isotropic s = 6 gives -(4 pi**2 / 3)(1 - i sgn C); isotropic s = 3 has
    Re lambda = -4 pi**3 / 3 and a divergent imaginary part. For aligned dipoles the
    angular average of A vanishes and the imaginary part is finite.

    Returns:
        InteractionConstant: Real and (possibly divergent) imaginary part.
    """
    sign = kernel.sign if kernel.is_interacting else 1
    real, imag = _lambda_parts(kernel.s, kernel.angular, sign)
    return InteractionConstant(real, imag)


def lambda_closed_form(s):
    """Gamma-function value of lambda for an isotropic repulsive kernel, s = 6."""
    mu = -3.0 / s
    radial = special.gamma(mu) * np.exp(0.5j * np.pi * mu)
    return (2.0 * np.pi) ** (3.0 / s) * 4.0 * np.pi * radial / s


def i4_averaged(p, kernel, rho, tau=None):
    """
    Pair term averaged over a uniform gas.

    Args:
        p (PulseSpec): Pulse.
        kernel (InteractionKernel): Interaction.
        rho (float): Density, cm**-3.
        tau (float): Evaluation time.

    Returns:
        float: I4 per atom.

    Raises:
        DivergentIntegralError: Isotropic s = 3 with a detuned or chirped pulse, where
                                the average is only conditionally convergent.
    """
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise ValueError(f"density must be non-negative and finite, got {rho}")
    if not kernel.is_interacting or rho == 0.0:
        return 0.0
    alpha = 3.0 / kernel.s
    lam = lambda_constant(kernel)
    moment = lag_profile(p, tau).power_moment(alpha)
    scale = rho * kernel.strength(p.T) ** alpha
    if p.is_real:
        return 0.25 * scale * lam.real * moment.real
    return 0.25 * scale * (lam.value * moment).real


def gamma_constant(shape, kernel, *, pulse=None):
    """
    Blockade constant gamma = 48 I4 / (W**4 rho (|C_s| T)**(3/s)).

    With the matching omega W = pi sqrt(I / I_sat) the truncated series reads
    P = pi**2 x / 4 - pi**4 x**2 (1 + gamma rho (|C_s| T)**(3/s)) / 48.

    Args:
        shape (PulseShape or str): Pulse shape of a resonant pulse.
        kernel (InteractionKernel): Interaction; its magnitude drops out.
        pulse (PulseSpec): Explicit pulse, overriding ``shape``.

    Returns:
        float: gamma.
    """
    if not kernel.is_interacting:
        raise ValueError("gamma is undefined without interactions")
    pulse = PulseSpec(shape, T=1e-8) if pulse is None else pulse
    rho = 1.0
    area = pulse_area(pulse)
    return (48.0 * i4_averaged(pulse, kernel, rho)
            / (area ** 4 * rho * kernel.strength(pulse.T) ** (3.0 / kernel.s)))


def pexc_series(p, kernel, rho, intensity_ratio, tau=None, *, warn=True):
    """
    Truncated excitation probability c2 omega**2 + c4 omega**4 at omega W = pi sqrt(x).

    Args:
        p (PulseSpec): Pulse.
        kernel (InteractionKernel): Interaction.
        rho (float): Density, cm**-3.
        intensity_ratio (float or array_like): x = I / I_sat >= 0.
        warn (bool): Issue SeriesTruncationWarning outside the series' validity.

    Returns:
        float or np.ndarray: P_exc.
    """
    x = np.asarray(intensity_ratio, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("intensity ratios must be non-negative")
    omega = np.pi * np.sqrt(x) / pulse_area(p)
    c2 = second_order(p, tau)
    c4 = -(i41(p, tau) + i4_averaged(p, kernel, rho, tau))
    first, second = c2 * omega ** 2, c4 * omega ** 4
    if warn and np.any(np.abs(second) > 0.5 * np.abs(first)):
        warnings.warn(
            "fourth order term exceeds half of the second order term; "
            "the truncated series is outside its range of validity",
            SeriesTruncationWarning,
            stacklevel=2,
        )
    total = first + second
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class ExpansionResult:
    """Series coefficients of one scenario; ``c4`` = -(I41 + I4)."""

    c2: float
    I41: float
    I4: float
    gamma: float = None
    lambda_real: float = None
    lambda_imag: float = None

    @property
    def c4(self):
        return -(self.I41 + self.I4)

    def to_record(self):
        return {"c2": self.c2, "I41": self.I41, "I4": self.I4, "c4": self.c4,
                "gamma": self.gamma, "lambda_real": self.lambda_real,
                "lambda_imag": self.lambda_imag}


def expand(p, *, kernel=None, rho=None, couplings=None, tau=None):
    """
    Series coefficients for explicit ``couplings`` or for a gas (``kernel``, ``rho``).
    """
    if couplings is not None:
        return ExpansionResult(second_order(p, tau), i41(p, tau),
                               i4_finite(p, couplings, tau))
    if kernel is None or rho is None:
        raise ValueError("either couplings or kernel and rho are required")
    lam = lambda_constant(kernel)
    gamma = gamma_constant(p.shape, kernel, pulse=p) if kernel.is_interacting else None
    return ExpansionResult(second_order(p, tau), i41(p, tau),
                           i4_averaged(p, kernel, rho, tau), gamma, lam.real, lam.imag)


@dataclass(frozen=True, eq=False)
class MonteCarloEstimate:
    """Sample mean and standard error of I4 over random ensembles."""

    mean: float
    stderr: float
    samples: np.ndarray = field(repr=False)
    n_atoms: float
    radius: float

    def to_record(self):
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.samples.size,
                "mean_atoms": self.n_atoms, "radius_cm": self.radius}


def i4_montecarlo(p, kernel, rho, geometry=Geometry.SPHERE, n_samples=200, seed=0, *,
                  n_atoms=None, padding=5.0, min_atoms=500, tau=None, workers=1,
                  progress=False):
    """
    Estimates the gas-averaged I4 by sampling ensembles around a central test atom.

    Each sample draws a fresh ensemble from a child of ``np.random.SeedSequence(seed)``,
    so results do not depend on ``workers``.

    Args:
        p (PulseSpec): Pulse.
        kernel (InteractionKernel): Interaction.
        rho (float): Density, cm**-3.
        geometry (Geometry or str): Sampling region.
        n_samples (int): Number of ensembles, at least 2.
        seed (int): Root seed.
        n_atoms (int): Atoms per ensemble; by default the region spans ``padding``
                       blockade radii and holds at least ``min_atoms`` atoms.
        padding (float): Minimum inscribed radius in blockade radii.
        workers (int): Threads evaluating samples.
        progress (bool): Show a tqdm progress bar.

    Returns:
        MonteCarloEstimate: Mean, standard error and per-sample values.
    """
    geometry = Geometry(geometry)
    if n_samples < 2:
        raise EnsembleError("at least two samples are needed for a standard error")
    if not (rho > 0.0 and math.isfinite(rho)):
        raise EnsembleError(f"density must be positive and finite, got {rho}")

    blockade = kernel.blockade_radius(p.T)
    if n_atoms is None:
        volume = max(region_volume(geometry, padding * blockade), min_atoms / rho)
    else:
        volume = n_atoms / rho
    radius = inscribed_radius(geometry, volume)
    if radius < padding * blockade * (1.0 - 1e-12):
        raise EnsembleError(
            f"sampling region of radius {radius:.3g} cm is smaller than {padding} "
            f"blockade radii ({blockade:.3g} cm); increase the atom number"
        )

    profile = lag_profile(p, tau)
    children = np.random.SeedSequence(seed).spawn(n_samples)

    def one_sample(child):
        ensemble = sample_ensemble(rho, geometry, volume, child)
        k = couplings_from(kernel, p, np.zeros(3), ensemble.positions)
        return 0.25 * math.fsum(profile.fourier(k).real), ensemble.n_atoms

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(tqdm(pool.map(one_sample, children), total=n_samples,
                            desc="ensembles", disable=not progress))

    samples = np.array([value for value, _ in results])
    mean_atoms = float(np.mean([count for _, count in results]))
    mean = math.fsum(samples) / samples.size
    stderr = float(np.std(samples, ddof=1) / math.sqrt(samples.size))
    _logger.info("Monte Carlo I4 = %.6g +- %.2g from %d ensembles of %.0f atoms",
                 mean, stderr, samples.size, mean_atoms)
    return MonteCarloEstimate(mean, stderr, samples, mean_atoms, radius)


def blockade_probability(n_atoms, p, omega, tau=None):
    """
    Per-atom excitation probability of ``n_atoms`` fully blockaded atoms,
    sin**2(sqrt(N) omega |F| / 2) / N, for a real resonant pulse.
    """
    if n_atoms < 1:
        raise ValueError("at least one atom is required")
    if not p.is_real:
        raise ValueError("closed-form blockade dynamics need a resonant, unchirped pulse")
    area = abs(_running_area(p, tau))
    return np.sin(np.sqrt(n_atoms) * np.asarray(omega) * area / 2.0) ** 2 / n_atoms


def rabi_probability(p, omega, tau=None):
    """Excitation probability of an isolated atom driven by a real resonant pulse."""
    return blockade_probability(1, p, omega, tau)
