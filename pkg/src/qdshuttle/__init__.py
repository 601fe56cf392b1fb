"""Exact dynamics of an electron in a non-adiabatically shuttled spin-orbit quantum dot."""

from .classical import (ClassicalTrajectory, ResidualAmplitude, residual_amplitude,
                        residual_closed_form, solve_trajectory, trajectory_on)
from .core import DomainError, SystemParams, display_params, sigma_from_display_convention
from .driving import DrivingProfile, Kind, evaluate, spin_flip_profile, spin_flip_schedule
from .observables import (energy, ground_probability, occupations, pseudo_spin,
                          pseudo_spin_ground, spin_expectation, wavefunction)

__version__ = "0.1.0"

__all__ = [
    "ClassicalTrajectory", "DomainError", "DrivingProfile", "Kind", "ResidualAmplitude",
    "SystemParams", "display_params", "energy", "evaluate", "ground_probability",
    "occupations", "pseudo_spin", "pseudo_spin_ground", "residual_amplitude",
    "residual_closed_form", "sigma_from_display_convention", "solve_trajectory",
    "spin_expectation", "spin_flip_profile", "spin_flip_schedule", "trajectory_on",
    "wavefunction",
]
