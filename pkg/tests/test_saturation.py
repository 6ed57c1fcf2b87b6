import math

import numpy as np
import pytest

from rydberg_expansion.config import resolve
from rydberg_expansion.expansion import gamma_constant, pexc_series
from rydberg_expansion.interactions import InteractionKernel
from rydberg_expansion.saturation import (
    SaturationModel,
    density_sweep,
    excitation_curve,
    intensity_sweep,
    p0_truncated,
    saturated_fraction,
    saturation_intensity,
    suppression_factor,
)


def preset_model(name, command):
    cfg = resolve(command, preset=name)
    pulse, kernel = cfg.pulse(), cfg.kernel()
    gamma = gamma_constant(pulse.shape, kernel, pulse=pulse)
    return SaturationModel.from_inputs(gamma, cfg["rho"], kernel, pulse.T)


def test_suppression_factor(repulsive_c6):
    assert suppression_factor(10.0, 0.0, repulsive_c6, 1e-8) == 1.0
    n_d = suppression_factor(10.0, 1e9, repulsive_c6, 1e-8)
    assert n_d == pytest.approx(1.0 + 10.0 * 1e9 * math.sqrt(repulsive_c6.strength(1e-8)))
    assert saturated_fraction(10.0, 1e9, repulsive_c6, 1e-8) == pytest.approx(1.0 / n_d)
    assert saturation_intensity(10.0, 1e9, repulsive_c6, 1e-8) == pytest.approx(1.0 / n_d)
    assert p0_truncated(10.0, 1e9, repulsive_c6, 1e-8) == pytest.approx(0.75 / n_d)


def test_suppression_factor_for_dipoles():
    kernel = InteractionKernel(3, 2.0)
    expected = 1.0 + 5.0 * 1e10 * kernel.strength(1e-7)
    assert suppression_factor(5.0, 1e10, kernel, 1e-7) == pytest.approx(expected)


@pytest.mark.parametrize("gamma, rho", [(0.0, 1e9), (-1.0, 1e9), (1.0, -1.0),
                                        (1.0, math.inf)])
def test_suppression_factor_rejects(repulsive_c6, gamma, rho):
    with pytest.raises(ValueError):
        suppression_factor(gamma, rho, repulsive_c6, 1e-8)


def test_isolated_curve_is_rabi():
    x = np.linspace(0.0, 0.99, 12)
    np.testing.assert_allclose(excitation_curve(1.0, x), np.sin(0.5 * np.pi * np.sqrt(x))
                               ** 2, atol=1e-15)


def test_curve_is_continuous_at_saturation():
    n_d = 4.0
    assert excitation_curve(n_d, 1.0 / n_d) == pytest.approx(0.25)
    assert excitation_curve(n_d, 1.0 / n_d - 1e-9) == pytest.approx(0.25, abs=1e-8)
    assert excitation_curve(n_d, 3.0) == 0.25
    with pytest.raises(ValueError):
        excitation_curve(n_d, -0.5)


def test_truncated_series_peaks_at_three_quarters_of_saturation(square, repulsive_c6):
    rho = 3e9
    gamma = gamma_constant(square.shape, repulsive_c6, pulse=square)
    model = SaturationModel.from_inputs(gamma, rho, repulsive_c6, square.T)
    x_peak = 6.0 / (math.pi ** 2 * model.n_d)
    peak = pexc_series(square, repulsive_c6, rho, x_peak, warn=False)
    assert peak == pytest.approx(model.P0_truncated, rel=1e-9)
    for x in (0.999 * x_peak, 1.001 * x_peak):
        assert pexc_series(square, repulsive_c6, rho, x, warn=False) < peak


def test_fig1_saturation():
    model = preset_model("fig1", "pexc")
    assert model.kernel.sign == -1
    assert 0.033 <= model.P0 <= 0.041


def test_singer_parameters_saturation():
    model = preset_model("singer-params", "saturation")
    assert 0.074 <= model.P0 <= 0.090
    record = model.to_record()
    assert record["P0"] == pytest.approx(1.0 / record["N_d"])
    assert record["I0_over_Isat"] == pytest.approx(record["P0"])


def test_density_sweep(repulsive_c6):
    frame = density_sweep(10.0, repulsive_c6, 1e-8, np.linspace(0.0, 1e10, 11))
    assert list(frame.columns) == ["rho", "N_d", "P0", "P0_truncated"]
    assert frame["P0"].iloc[0] == 1.0
    assert np.all(np.diff(frame["P0"]) < 0.0)
    np.testing.assert_allclose(frame["P0_truncated"], 0.75 * frame["P0"])
    with pytest.raises(ValueError):
        density_sweep(10.0, repulsive_c6, 1e-8, [1e9, 1e8])


def test_intensity_sweep(repulsive_c6):
    model = SaturationModel.from_inputs(10.0, 1e9, repulsive_c6, 1e-8)
    frame = intensity_sweep(model, np.linspace(0.0, 1.0, 21))
    assert list(frame.columns) == ["I_over_Isat", "P", "P_isolated"]
    assert frame["P"].iloc[-1] == pytest.approx(model.P0)
    assert frame["P_isolated"].iloc[-1] == pytest.approx(1.0)
    assert np.all(frame["P"] <= frame["P_isolated"] + 1e-15)


def test_saturated_fraction_falls_with_interaction_and_duration():
    by_strength = [saturated_fraction(10.0, 1e9, InteractionKernel(6, sign * c), 1e-8)
                   for c in (1e20, 1e21, 1e22) for sign in (1.0, -1.0)]
    assert by_strength[0::2] == by_strength[1::2]
    assert np.all(np.diff(by_strength[0::2]) < 0.0)
    by_duration = [saturated_fraction(10.0, 1e9, InteractionKernel(6, 1e21), T)
                   for T in (1e-9, 1e-8, 1e-7)]
    assert np.all(np.diff(by_duration) < 0.0)
