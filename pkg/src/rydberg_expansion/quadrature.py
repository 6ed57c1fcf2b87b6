"""
Quadrature Helpers Module

This module contains the integration primitives shared by the expansion kernels: an
adaptive wrapper around ``scipy.integrate.quad`` for complex integrands, a cubic
spline for complex samples, and exact integrals of piecewise cubics against
oscillatory (``exp(iku)``) and algebraic (``u**alpha``) weights.

Functions:
    - quad_real: Adaptive quadrature of a real integrand with convergence checks.
    - quad_complex: Adaptive quadrature of a complex integrand.
    - spline_fourier: Integral of a piecewise cubic times exp(iku) for many k at once.
    - spline_power_moment: Integral of u**alpha times a piecewise cubic on [0, L].

Usage:
    from rydberg_expansion.quadrature import ComplexSpline, spline_fourier
    spline = ComplexSpline(u, values)
    spline_fourier(spline, k)
"""
import logging

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, interpolate

from rydberg_expansion.errors import QuadratureError

_logger = logging.getLogger(__name__)

# Truncation of the power series used for the panel moments when |k h| < 1.
_SERIES_TERMS = 22
# Upper bound on the number of (k, panel) pairs held in memory at once.
_CHUNK = 2_000_000
_GAUSS_NODES, _GAUSS_WEIGHTS = leggauss(16)
# |k| L below which the Fourier integral is summed from spline moments
_SERIES_RADIUS = 2.0
_MOMENT_ORDERS = 40
# exact for a cubic times a polynomial of degree _MOMENT_ORDERS
_SERIES_GAUSS = leggauss(24)


def quad_real(func, a, b, *, epsabs=1e-10, epsrel=1e-10, limit=200, tolerance=1e-6,
              **kwargs):
    """
    Integrates a real function with ``scipy.integrate.quad``.

    Args:
        func (callable): Real integrand.
        a, b (float): Integration limits; ``b`` may be ``np.inf`` with Fourier weights.
        epsabs, epsrel (float): Requested absolute and relative accuracy.
        limit (int): Maximum number of subintervals.
        tolerance (float): Largest error estimate accepted when QUADPACK reports a
                           convergence problem.
        **kwargs: Passed to ``quad`` (``points``, ``weight``, ``wvar``).

    Returns:
        tuple: (value, abserr)

    Note:
        Raises QuadratureError when QUADPACK flags non-convergence and the achieved
        error estimate exceeds ``tolerance`` relative to the result.
    """
    out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit,
                         full_output=1, **kwargs)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        if not np.isfinite(value) or abserr > tolerance * max(1.0, abs(value)):
            raise QuadratureError(
                f"quadrature over [{a:.6g}, {b:.6g}] did not converge: {out[3]}", abserr
            )
        _logger.debug("Accepted quadrature with warning (abserr %.3g): %s", abserr,
                      out[3])
    return value, abserr


def quad_complex(func, a, b, **kwargs):
    """
    Integrates a complex function as two real quadratures.

    Returns:
        tuple: (complex value, combined abserr)
    """
    real, err_real = quad_real(lambda x: np.real(func(x)), a, b, **kwargs)
    imag, err_imag = quad_real(lambda x: np.imag(func(x)), a, b, **kwargs)
    return complex(real, imag), err_real + err_imag


class ComplexSpline:
    """
    Cubic spline through complex samples, stored as a two-column real spline.

    With ``derivatives`` the spline is the Hermite interpolant, otherwise a not-a-knot
    cubic spline.
    """

    def __init__(self, x, values, derivatives=None):
        values = np.asarray(values, dtype=complex)
        y = np.column_stack([values.real, values.imag])
        if derivatives is None:
            self._spline = interpolate.CubicSpline(x, y)
        else:
            derivatives = np.asarray(derivatives, dtype=complex)
            dydx = np.column_stack([derivatives.real, derivatives.imag])
            self._spline = interpolate.CubicHermiteSpline(x, y, dydx)

    @property
    def x(self):
        return self._spline.x

    @property
    def coefficients(self):
        """Complex polynomial coefficients, shape (4, panels), highest power first."""
        c = self._spline.c
        return c[..., 0] + 1j * c[..., 1]

    def __call__(self, x, nu=0):
        y = self._spline(x, nu)
        return y[..., 0] + 1j * y[..., 1]

    def integral(self, a=None, b=None):
        a = self.x[0] if a is None else a
        b = self.x[-1] if b is None else b
        y = self._spline.integrate(a, b)
        return complex(y[0], y[1])


def _phase_moments(z, order=3):
    """Returns nu_m(z) = int_0^1 t**m exp(z t) dt for m = 0..order."""
    nu = np.empty((order + 1,) + z.shape, dtype=complex)
    small = np.abs(z) < 1.0

    zs = z[small]
    if zs.size:
        term = np.ones_like(zs)
        acc = np.zeros((order + 1, zs.size), dtype=complex)
        for n in range(_SERIES_TERMS):
            for m in range(order + 1):
                acc[m] += term / (m + n + 1)
            term = term * zs / (n + 1)
        nu[:, small] = acc

    zl = z[~small]
    if zl.size:
        ez = np.exp(zl)
        prev = (ez - 1.0) / zl
        nu[0, ~small] = prev
        for m in range(1, order + 1):
            prev = (ez - m * prev) / zl
            nu[m, ~small] = prev
    return nu


def _fourier_panels(spline, k):
    x = spline.x
    h = np.diff(x)
    # a[m, j] multiplies (u - x_j)**m on panel j
    a = spline.coefficients[::-1] * h ** np.arange(1, 5)[:, None]
    result = np.empty(k.size, dtype=complex)
    step = max(1, _CHUNK // h.size)
    for start in range(0, k.size, step):
        kk = k[start:start + step, None]
        nu = _phase_moments(1j * kk * h[None, :])
        panels = np.einsum("mj,mkj->kj", a, nu)
        result[start:start + step] = np.sum(np.exp(1j * kk * x[None, :-1]) * panels,
                                            axis=1)
    return result


def _fourier_asymptotic(spline, k):
    a, b = spline.x[0], spline.x[-1]
    ik = 1j * k
    total = np.zeros(k.size, dtype=complex)
    for n in range(3):
        edge = spline(b, n) * np.exp(ik * b) - spline(a, n) * np.exp(ik * a)
        total += (-1) ** n * edge / ik ** (n + 1)
    return total


def _scaled_moments(spline, orders):
    """m_n = int S(u) ((u - x0) / L)**n du for n < orders, exact for a cubic S."""
    x = spline.x
    length = x[-1] - x[0]
    nodes, weights = _SERIES_GAUSS
    mid, half = 0.5 * (x[:-1] + x[1:]), 0.5 * np.diff(x)
    u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    acc = (half[:, None] * weights[None, :]).ravel() * spline(u)
    scaled = (u - x[0]) / length
    moments = np.empty(orders, dtype=complex)
    for n in range(orders):
        moments[n] = acc.sum()
        acc = acc * scaled
    return moments


def _fourier_series(spline, k, subtract):
    x0, length = spline.x[0], spline.x[-1] - spline.x[0]
    moments = _scaled_moments(spline, _MOMENT_ORDERS)
    z = 1j * k * length
    term = z.copy()
    total = np.zeros(k.size, dtype=complex)
    for n in range(1, _MOMENT_ORDERS):
        total += term * moments[n]
        term = term * z / (n + 1)
    phase = np.exp(1j * k * x0)
    return phase * total + moments[0] * (phase - subtract)


def spline_fourier(spline, k, *, asymptotic_threshold=1e6, subtract=0.0):
    """
    Integrates ``spline(u) * (exp(i k u) - subtract)`` over the spline's support.

    Each cubic panel is integrated in closed form, so no oscillation has to be
    resolved by sampling. For ``|k| L <= 2`` (L the support length) the integral is
    summed as a power series in ``k`` over exact moments of the spline, and for
    ``|k|`` above ``asymptotic_threshold`` the endpoint expansion in powers of
    ``1/k`` is used.

    Args:
        spline (ComplexSpline): Piecewise cubic integrand.
        k (array_like): Angular frequencies.
        asymptotic_threshold (float): Switch-over to the endpoint expansion.
        subtract (float): Constant removed from the oscillatory weight; with 1 the
                          result vanishes linearly as k -> 0 without cancellation.

    Returns:
        np.ndarray: Complex integrals, one per entry of ``k``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.shape, dtype=complex)
    length = spline.x[-1] - spline.x[0]
    near = np.abs(k) * length <= _SERIES_RADIUS
    far = np.abs(k) > asymptotic_threshold
    middle = ~(near | far)
    if near.any():
        out[near] = _fourier_series(spline, k[near], subtract)
    if far.any() or middle.any():
        offset = subtract * spline.integral() if subtract else 0.0
        if far.any():
            out[far] = _fourier_asymptotic(spline, k[far]) - offset
        if middle.any():
            out[middle] = _fourier_panels(spline, k[middle]) - offset
    return out


def spline_power_moment(spline, alpha):
    """
    Integrates ``u**alpha * spline(u)`` over ``[0, L]`` for ``alpha > -1``.

    The first panel, where ``u**alpha`` is not smooth, is integrated exactly; the
    remaining panels use 16-point Gauss-Legendre rules.
    """
    if alpha <= -1:
        raise ValueError("alpha must exceed -1 for an integrable power weight")
    x = spline.x
    if x[0] != 0.0:
        raise ValueError("power moments need a spline starting at u = 0")
    c = spline.coefficients
    h0 = x[1]
    total = sum(c[3 - m, 0] * h0 ** (alpha + m + 1) / (alpha + m + 1)
                for m in range(4))
    if x.size > 2:
        lo, hi = x[1:-1], x[2:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        u = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        total += np.sum(half[:, None] * _GAUSS_WEIGHTS[None, :] * u ** alpha
                        * spline(u))
    return complex(total)
