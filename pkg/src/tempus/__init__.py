"""Time-reversal toolkit: conjugation-circuit synthesis, anti-unitary reversal,
impurity-scattering experiments with gate noise, and wave-packet reversal."""

__version__ = "0.1.0"
