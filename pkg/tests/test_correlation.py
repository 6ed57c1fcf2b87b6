import numpy as np
import pytest

from rydberg_expansion.config import resolve
from rydberg_expansion.correlation import (
    DEFAULT_R_GRID_UM,
    c4,
    chirp_family,
    correlation_family,
    correlation_peak,
    correlation_scan,
    detuning_family,
    has_positive_correlation,
    pair_correlation,
)
from rydberg_expansion.errors import UndefinedCorrelationError
from rydberg_expansion.pulse import PulseSpec, bandwidth, duration_from_bandwidth, tabulate


@pytest.fixture
def pulse_60mhz():
    return duration_from_bandwidth("gaussian", 60e6)


def test_c4_without_interactions_is_uncorrelated():
    for p in (PulseSpec("square", T=1e-8), PulseSpec("gaussian", T=1e-8, chirp=0.8,
                                                      delta=-0.4)):
        area = abs(tabulate(p).total)
        assert 16.0 * c4(p, 0.0) / area ** 4 == pytest.approx(1.0, abs=1e-9)


def test_c4_is_vectorised(square):
    k = np.array([[0.0, 1.0], [10.0, 1e7]])
    values = c4(square, k)
    assert values.shape == (2, 2)
    assert values[0, 1] == pytest.approx(c4(square, 1.0))
    assert values[1, 1] < 1e-12


def test_limits_of_the_attractive_correlation(pulse_60mhz, attractive_c6):
    P = pair_correlation(pulse_60mhz, attractive_c6, [0.5, 20.0])
    assert P[0] == pytest.approx(0.0, abs=1e-3)
    assert P[1] == pytest.approx(1.0, abs=1e-3)


def test_zero_area_correlation_is_undefined(attractive_c6):
    # a full detuning cycle over a square pulse cancels the area
    p = PulseSpec("square", T=1e-8, delta=2.0 * np.pi)
    with pytest.raises(UndefinedCorrelationError):
        pair_correlation(p, attractive_c6, 5.0)


def test_scan_uses_default_grid(pulse_60mhz, attractive_c6):
    curve = correlation_scan(pulse_60mhz, attractive_c6)
    np.testing.assert_array_equal(curve.r_um, DEFAULT_R_GRID_UM)
    assert curve.r_um.size == 200
    assert np.all(curve.k < 0.0)
    frame = curve.to_frame()
    assert list(frame.columns) == ["curve", "R_um", "k", "P"]
    assert not has_positive_correlation(curve)


@pytest.mark.parametrize("grid", [[], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0]])
def test_scan_rejects_bad_grids(pulse_60mhz, attractive_c6, grid):
    with pytest.raises(ValueError):
        correlation_scan(pulse_60mhz, attractive_c6, grid)


def test_positive_detuning_correlates_attractive_atoms(pulse_60mhz, attractive_c6):
    up = correlation_scan(pulse_60mhz.with_detuning(10e6), attractive_c6)
    down = correlation_scan(pulse_60mhz.with_detuning(-10e6), attractive_c6)
    assert has_positive_correlation(up)
    assert not has_positive_correlation(down)


def test_positive_chirp_correlates_attractive_atoms(attractive_c6):
    family = dict(chirp_family(60e6, [120e6], [120e6]))
    up = correlation_scan(family["120 MHz"], attractive_c6)
    down = correlation_scan(family["120 MHz negative chirp"], attractive_c6)
    assert has_positive_correlation(up)
    assert not has_positive_correlation(down)


def test_peak_refines_the_grid(pulse_60mhz, attractive_c6):
    curve = correlation_scan(pulse_60mhz.with_detuning(10e6), attractive_c6,
                             np.geomspace(0.5, 20.0, 40))
    r_peak, p_peak = correlation_peak(curve, attractive_c6)
    assert p_peak >= curve.P.max()
    assert curve.r_um[0] <= r_peak <= curve.r_um[-1]
    assert p_peak == pytest.approx(
        float(pair_correlation(curve.pulse, attractive_c6, r_peak)), rel=1e-12)


def test_chirp_family():
    family = chirp_family(60e6, [60e6, 100e6], [120e6])
    labels = [label for label, _ in family]
    assert labels == ["60 MHz", "100 MHz", "120 MHz negative chirp"]
    durations = {p.T for _, p in family}
    assert len(durations) == 1
    for (_, p), target in zip(family, (60e6, 100e6, 120e6)):
        assert bandwidth(p) == pytest.approx(target, rel=1e-12)
    assert family[0][1].chirp == 0.0
    assert family[2][1].chirp < 0.0


def test_detuning_family(pulse_60mhz):
    family = detuning_family(pulse_60mhz, [-20e6, 0.0, 10e6])
    assert [label for label, _ in family] == ["-20 MHz", "+0 MHz", "+10 MHz"]
    assert family[1][1] == pulse_60mhz


def test_family_keeps_input_order(pulse_60mhz, attractive_c6):
    family = detuning_family(pulse_60mhz, [20e6, -20e6, 0.0])
    grid = np.geomspace(1.0, 10.0, 12)
    curves = correlation_family(family, attractive_c6, grid, workers=3)
    assert [curve.label for curve in curves] == ["+20 MHz", "-20 MHz", "+0 MHz"]
    serial = correlation_scan(family[0][1], attractive_c6, grid)
    np.testing.assert_array_equal(curves[0].P, serial.P)


def test_preset_families_resolve():
    fig3a = resolve("correlation", preset="fig3a")
    assert fig3a["correlation.bandwidths_mhz"] == (60.0, 80.0, 100.0, 120.0)
    fig3b = resolve("correlation", preset="fig3b")
    assert len(fig3b["correlation.detunings_mhz"]) == 5


def test_negative_detuning_suppresses_chirped_correlation(attractive_c6):
    chirped = dict(chirp_family(60e6, [120e6]))["120 MHz"]
    peaks = [correlation_scan(chirped.with_detuning(delta), attractive_c6).P.max()
             for delta in (0.0, -5e6, -10e6, -20e6)]
    assert peaks[0] > 1.0
    assert np.all(np.diff(peaks) < 0.0)
