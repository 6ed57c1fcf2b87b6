"""
Pulse Module

Laser pulses in the scaled time ``tau = t / T``. A pulse is a real envelope ``g``
multiplied by the phase ``exp(i (delta tau + chirp tau**2))``; ``delta`` is the
detuning and ``chirp`` the linear chirp, both in scaled units.

Functions:
    - envelope: Complex pulse f(tau).
    - cumulative: Running pulse area F(tau) by adaptive quadrature.
    - pulse_area: Total pulse area W = |F(tau_end)|.
    - transform_limited_bandwidth: Spectral FWHM of an unchirped pulse of duration T.
    - bandwidth: Spectral FWHM of a pulse, chirp included.
    - duration_from_bandwidth: Builds the pulse that has a requested bandwidth.
    - with_bandwidth: Chirps a pulse of fixed duration up to a requested bandwidth.
    - tabulate: Cached spline table of F(tau) used by the expansion kernels.
    - omega_from_intensity: Scaled Rabi amplitude for a given I/I_sat.

Usage:
    from rydberg_expansion.pulse import PulseSpec, cumulative
    p = PulseSpec("gaussian", T=6.24e-9)
    cumulative(p, 0.0)
"""
import enum
import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from rydberg_expansion.errors import BandwidthError
from rydberg_expansion.quadrature import ComplexSpline, quad_complex

GAUSSIAN_HALF_WINDOW = 4.0
TABLE_PANELS = 2048

# sinc(x)**2 = 1/2, half-power point of a square pulse spectrum
_SQUARE_HALF_POWER = optimize.brentq(lambda x: np.sinc(x / np.pi) ** 2 - 0.5, 1.0, 2.0)


class PulseShape(str, enum.Enum):
    GAUSSIAN = "gaussian"
    SQUARE = "square"


@dataclass(frozen=True)
class PulseSpec:
    """
    A laser pulse in scaled time.

    Attributes:
        shape (PulseShape): ``gaussian`` (g = exp(-tau**2)) or ``square`` (g = 1 on
                            [0, 1]).
        T (float): Duration scale in seconds.
        delta (float): Detuning, 2 pi Delta T.
        chirp (float): Linear chirp coefficient of the tau**2 phase.
        tau0, tau_end (float): Integration window; [-4, 4] for a Gaussian unless
                               given, always [0, 1] for a square pulse.
    """

    shape: PulseShape = PulseShape.GAUSSIAN
    T: float = 1e-8
    delta: float = 0.0
    chirp: float = 0.0
    tau0: float = None
    tau_end: float = None

    def __post_init__(self):
        shape = PulseShape(self.shape)
        object.__setattr__(self, "shape", shape)
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"pulse duration T must be positive and finite, got {self.T}")
        if not (math.isfinite(self.delta) and math.isfinite(self.chirp)):
            raise ValueError("detuning and chirp must be finite")

        if shape is PulseShape.SQUARE:
            tau0 = 0.0 if self.tau0 is None else float(self.tau0)
            tau_end = 1.0 if self.tau_end is None else float(self.tau_end)
            if (tau0, tau_end) != (0.0, 1.0):
                raise ValueError("a square pulse occupies the window [0, 1]")
        else:
            tau0 = -GAUSSIAN_HALF_WINDOW if self.tau0 is None else float(self.tau0)
            tau_end = GAUSSIAN_HALF_WINDOW if self.tau_end is None else float(self.tau_end)
            if not tau0 < tau_end:
                raise ValueError(f"empty pulse window [{tau0}, {tau_end}]")
        object.__setattr__(self, "tau0", tau0)
        object.__setattr__(self, "tau_end", tau_end)

    @property
    def window(self):
        return self.tau0, self.tau_end

    @property
    def is_real(self):
        """True for a resonant, unchirped pulse."""
        return self.delta == 0.0 and self.chirp == 0.0

    def with_detuning(self, detuning_hz):
        """Returns a copy detuned by ``detuning_hz`` (Hz, not angular)."""
        return replace(self, delta=2.0 * math.pi * detuning_hz * self.T)


def envelope(p, tau):
    """
    Evaluates the complex pulse f(tau).

    Args:
        p (PulseSpec): Pulse.
        tau (float or array_like): Scaled times.

    Returns:
        complex or np.ndarray: f(tau); zero outside the pulse window.
    """
    tau = np.asarray(tau, dtype=float)
    if p.shape is PulseShape.GAUSSIAN:
        g = np.exp(-tau ** 2)
    else:
        g = np.ones_like(tau)
    inside = (tau >= p.tau0) & (tau <= p.tau_end)
    f = np.where(inside, g * np.exp(1j * (p.delta * tau + p.chirp * tau ** 2)), 0.0)
    return f if f.ndim else complex(f)


def _clip(p, tau):
    return min(max(float(tau), p.tau0), p.tau_end)


def cumulative(p, tau, *, epsabs=1e-10, epsrel=1e-10):
    """
    Running pulse area F(tau) = int_{tau0}^{tau} f, by adaptive quadrature.

    Args:
        p (PulseSpec): Pulse.
        tau (float or array_like): Upper limits; values past the window saturate.

    Returns:
        complex or np.ndarray: F(tau).

    Note:
        Raises QuadratureError when the quadrature does not reach the requested
        accuracy.
    """
    taus = np.asarray(tau, dtype=float)
    values = np.zeros(taus.shape, dtype=complex)
    for index, t in np.ndenumerate(taus):
        upper = _clip(p, t)
        if upper > p.tau0:
            values[index], _ = quad_complex(lambda x: envelope(p, x), p.tau0, upper,
                                            epsabs=epsabs, epsrel=epsrel)
    return values if values.ndim else complex(values[()])


def pulse_area(p, tau=None):
    """Returns |F(tau)|; the full pulse area W when ``tau`` is omitted."""
    return abs(cumulative(p, p.tau_end if tau is None else tau))


def transform_limited_bandwidth(shape, T):
    """
    Spectral intensity FWHM (Hz) of an unchirped pulse.

    Gaussian: sqrt(2 ln 2) / (pi T), i.e. an intensity FWHM duration
    T_FWHM = 2 ln 2 / (pi Gamma). Square: the sinc**2 half-power width.
    """
    if PulseShape(shape) is PulseShape.GAUSSIAN:
        return math.sqrt(2.0 * math.log(2.0)) / (math.pi * T)
    return 2.0 * _SQUARE_HALF_POWER / (math.pi * T)


def bandwidth(p):
    """Spectral intensity FWHM (Hz) of ``p``; a chirp widens it by sqrt(1 + chirp**2)."""
    base = transform_limited_bandwidth(p.shape, p.T)
    if p.chirp == 0.0:
        return base
    if p.shape is not PulseShape.GAUSSIAN:
        raise BandwidthError("chirped bandwidths are only defined for Gaussian pulses")
    return base * math.sqrt(1.0 + p.chirp ** 2)


def duration_from_bandwidth(shape, gamma, chirp_fraction=0.0, *, tau0=None,
                            tau_end=None):
    """
    Builds a pulse whose spectral FWHM is ``gamma``.

    Args:
        shape (PulseShape or str): Envelope shape.
        gamma (float): Target bandwidth, Hz.
        chirp_fraction (float): Signed share of ``gamma`` produced by the chirp,
                                ``+-(1 - Gamma_0 / gamma)`` with Gamma_0 the
                                transform-limited part. Its sign sets the chirp sign.
        tau0, tau_end (float): Optional Gaussian window.

    Returns:
        PulseSpec: Pulse with T fixed by Gamma_0 and chirp sqrt((gamma/Gamma_0)**2 - 1).

    Raises:
        BandwidthError: Non-positive or infinite ``gamma``, ``|chirp_fraction| >= 1``,
                        or a chirp requested for a square pulse.
    """
    shape = PulseShape(shape)
    if not (math.isfinite(gamma) and gamma > 0):
        raise BandwidthError(f"bandwidth must be positive and finite, got {gamma}")
    if not -1.0 < chirp_fraction < 1.0:
        raise BandwidthError("chirp fraction must lie strictly between -1 and 1")
    if chirp_fraction and shape is not PulseShape.GAUSSIAN:
        raise BandwidthError("only Gaussian pulses can be chirped to a bandwidth")

    base = gamma * (1.0 - abs(chirp_fraction))
    T = transform_limited_bandwidth(shape, 1.0) / base
    ratio = 1.0 / (1.0 - abs(chirp_fraction))
    chirp = math.copysign(math.sqrt(max(ratio ** 2 - 1.0, 0.0)), chirp_fraction)
    return PulseSpec(shape, T, chirp=chirp, tau0=tau0, tau_end=tau_end)


def with_bandwidth(p, gamma, sign=1):
    """
    Chirps ``p`` (duration unchanged) until its bandwidth reaches ``gamma``.

    Raises:
        BandwidthError: If ``gamma`` is below the transform limit of ``p.T``.
    """
    base = transform_limited_bandwidth(p.shape, p.T)
    if gamma < base * (1.0 - 1e-12):
        raise BandwidthError(
            f"requested bandwidth {gamma:.6g} Hz is below the transform limit "
            f"{base:.6g} Hz of a pulse with T = {p.T:.6g} s"
        )
    ratio = gamma / base
    if ratio <= 1.0 + 1e-12:
        return replace(p, chirp=0.0)
    chirp = math.copysign(math.sqrt(ratio ** 2 - 1.0), sign)
    if chirp and p.shape is not PulseShape.GAUSSIAN:
        raise BandwidthError("only Gaussian pulses can be chirped to a bandwidth")
    return replace(p, chirp=chirp)


def omega_from_intensity(p, intensity_ratio):
    """Rabi amplitude with omega W = pi sqrt(I / I_sat)."""
    return np.pi * np.sqrt(np.asarray(intensity_ratio, dtype=float)) / pulse_area(p)


class PulseTable:
    """
    Running pulse area on a uniform grid of the pulse window.

    Panel increments of F are 8-point Gauss-Legendre sums and the table is the cubic
    Hermite interpolant built from them and the exact slopes f.
    """

    def __init__(self, pulse, panels=TABLE_PANELS):
        self.pulse = pulse
        nodes = np.linspace(pulse.tau0, pulse.tau_end, panels + 1)
        gauss_x, gauss_w = leggauss(8)
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        half = 0.5 * np.diff(nodes)
        sample = envelope(pulse, mid[:, None] + half[:, None] * gauss_x[None, :])
        increments = np.sum(half[:, None] * gauss_w[None, :] * sample, axis=1)

        self.nodes = nodes
        self.values = np.concatenate([[0.0], np.cumsum(increments)])
        self._spline = ComplexSpline(nodes, self.values, envelope(pulse, nodes))

    @property
    def total(self):
        """F(tau_end)."""
        return complex(self.values[-1])

    def F(self, tau):
        tau = np.clip(np.asarray(tau, dtype=float), self.pulse.tau0, self.pulse.tau_end)
        values = self._spline(tau)
        return values if np.ndim(values) else complex(values)

    def f(self, tau):
        return envelope(self.pulse, tau)


@functools.lru_cache(maxsize=32)
def tabulate(p):
    """Cached PulseTable for ``p``."""
    return PulseTable(p)
