import math

import numpy as np
import pytest

from rydberg_expansion.errors import BandwidthError
from rydberg_expansion.pulse import (
    PulseShape,
    PulseSpec,
    bandwidth,
    cumulative,
    duration_from_bandwidth,
    envelope,
    omega_from_intensity,
    pulse_area,
    tabulate,
    transform_limited_bandwidth,
    with_bandwidth,
)


def test_pulse_areas(square, gaussian):
    assert pulse_area(square) == pytest.approx(1.0, rel=1e-12)
    # the [-4, 4] window cuts off erfc(4) of the Gaussian
    assert pulse_area(gaussian) == pytest.approx(math.sqrt(math.pi), rel=1e-7)


def test_cumulative_square(square):
    assert cumulative(square, 0.25) == pytest.approx(0.25, abs=1e-12)
    np.testing.assert_allclose(cumulative(square, [-1.0, 0.5, 2.0]), [0.0, 0.5, 1.0],
                               atol=1e-12)


def test_envelope_vanishes_outside_window(gaussian):
    values = envelope(gaussian, [-5.0, 0.0, 5.0])
    assert values[0] == 0.0 and values[2] == 0.0
    assert values[1] == pytest.approx(1.0)


def test_detuned_envelope_phase(square):
    p = square.with_detuning(10e6)
    assert p.delta == pytest.approx(2.0 * math.pi * 10e6 * 1e-8)
    assert envelope(p, 0.5) == pytest.approx(np.exp(0.5j * p.delta))
    assert not p.is_real


def test_table_matches_adaptive_quadrature():
    p = PulseSpec("gaussian", T=5e-9, delta=1.3, chirp=-0.7)
    table = tabulate(p)
    taus = np.array([-3.0, -0.4, 0.0, 1.1, 4.0])
    np.testing.assert_allclose(table.F(taus), cumulative(p, taus), atol=1e-9)
    assert table.total == pytest.approx(cumulative(p, p.tau_end), abs=1e-9)


def test_square_window_is_fixed():
    with pytest.raises(ValueError):
        PulseSpec("square", T=1e-8, tau0=-1.0)


@pytest.mark.parametrize("T", [0.0, -1e-9, math.inf])
def test_invalid_duration(T):
    with pytest.raises(ValueError):
        PulseSpec("gaussian", T=T)


def test_transform_limited_bandwidth():
    T = 4e-9
    assert transform_limited_bandwidth("gaussian", T) == pytest.approx(
        math.sqrt(2.0 * math.log(2.0)) / (math.pi * T))
    # sinc**2 half-power point of a square pulse
    gamma = transform_limited_bandwidth(PulseShape.SQUARE, T)
    x = 0.5 * math.pi * gamma * T
    assert (math.sin(x) / x) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_chirp_widens_bandwidth(gaussian):
    chirped = PulseSpec("gaussian", T=gaussian.T, chirp=math.sqrt(3.0))
    assert bandwidth(chirped) == pytest.approx(2.0 * bandwidth(gaussian), rel=1e-12)


def test_chirped_square_has_no_bandwidth():
    with pytest.raises(BandwidthError):
        bandwidth(PulseSpec("square", T=1e-8, chirp=1.0))


def test_duration_from_bandwidth_120mhz():
    p = duration_from_bandwidth("gaussian", 120e6)
    assert p.T == pytest.approx(3.123e-9, rel=1e-3)
    assert p.chirp == 0.0
    assert bandwidth(p) == pytest.approx(120e6, rel=1e-12)


@pytest.mark.parametrize("fraction", [0.5, -0.25])
def test_duration_from_bandwidth_with_chirp(fraction):
    p = duration_from_bandwidth("gaussian", 100e6, fraction)
    assert bandwidth(p) == pytest.approx(100e6, rel=1e-12)
    assert math.copysign(1.0, p.chirp) == math.copysign(1.0, fraction)
    assert transform_limited_bandwidth(p.shape, p.T) == pytest.approx(
        100e6 * (1.0 - abs(fraction)), rel=1e-12)


@pytest.mark.parametrize("gamma, fraction, shape", [
    (0.0, 0.0, "gaussian"),
    (-1e6, 0.0, "gaussian"),
    (math.inf, 0.0, "gaussian"),
    (1e8, 1.0, "gaussian"),
    (1e8, 0.3, "square"),
])
def test_duration_from_bandwidth_rejects(gamma, fraction, shape):
    with pytest.raises(BandwidthError):
        duration_from_bandwidth(shape, gamma, fraction)


def test_with_bandwidth():
    base = duration_from_bandwidth("gaussian", 60e6)
    chirped = with_bandwidth(base, 120e6, sign=-1)
    assert chirped.T == base.T
    assert chirped.chirp == pytest.approx(-math.sqrt(3.0))
    with pytest.raises(BandwidthError):
        with_bandwidth(base, 50e6)


def test_omega_from_intensity_is_a_pi_pulse_at_saturation(gaussian):
    assert omega_from_intensity(gaussian, 1.0) * pulse_area(gaussian) == pytest.approx(
        math.pi)
