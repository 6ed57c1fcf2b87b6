"""
Presets Module

Named parameter sets reproducing published results. Each preset fixes the command it
belongs to and a subset of configuration keys; everything else keeps its default.
"""

# C6 of the 70s state of Rb, atomic units
RB70S_C6_AU = 2.64e22 * 7.0 / 60.0

PRESETS = {
    # blockade constant gamma for two pulse shapes and three kernels
    "table1": {
        "command": "gamma-table",
    },
    # excitation fraction against intensity, 120 MHz Gaussian pulse
    "fig1": {
        "command": "pexc",
        "pulse.shape": "gaussian",
        "pulse.bandwidth_mhz": 120.0,
        "kernel.s": 6,
        "kernel.c_au": -RB70S_C6_AU,
        "rho": 6.5e10,
        "intensity.max": 1.0,
        "intensity.points": 201,
    },
    # saturated fraction against density
    "fig2": {
        "command": "density-sweep",
        "pulse.shape": "gaussian",
        "pulse.bandwidth_mhz": 120.0,
        "kernel.s": 6,
        "kernel.c_au": -RB70S_C6_AU,
        "rho": 6.5e10,
        "density.points": 101,
    },
    # pair correlation of chirped pulses sharing the duration of a 60 MHz pulse
    "fig3a": {
        "command": "correlation",
        "pulse.shape": "gaussian",
        "pulse.bandwidth_mhz": 60.0,
        "kernel.s": 6,
        "kernel.c_au": -RB70S_C6_AU,
        "correlation.bandwidths_mhz": "60,80,100,120",
        "correlation.negative_bandwidths_mhz": "120",
    },
    # pair correlation of detuned 60 MHz pulses
    "fig3b": {
        "command": "correlation",
        "pulse.shape": "gaussian",
        "pulse.bandwidth_mhz": 60.0,
        "kernel.s": 6,
        "kernel.c_au": -RB70S_C6_AU,
        "correlation.detunings_mhz": "-20,-10,0,10,20",
    },
    # 37.5 ns Gaussian excitation of a cold gas at 2e9 cm^-3
    "singer-params": {
        "command": "saturation",
        "pulse.shape": "gaussian",
        "pulse.T": 37.5e-9,
        "kernel.s": 6,
        "kernel.c_au": 4.97e22,
        "rho": 2e9,
    },
}


def preset_names():
    return sorted(PRESETS)
