"""Gaussian-state interferometry: QFI, photocurrent sensitivities and optimal input states."""

__version__ = "0.1.0"

from .core import (GaussianState, NumberMoments, SymplecticMap, apply, beam_splitter, coherent,
                   displaced_squeezed, displacement, loss_channel, number_moments, omega, phase_shift,
                   single_mode_squeezer, tensor, thermal, two_mode_squeezer, uniform_loss, vacuum)
from .detection import (ActiveStage, DetectorPair, PassiveStage, PhotocurrentStats, difference_current,
                        fisher_gaussian_approx, loss_compensation_factor, sensitivity, sensitivity_exact,
                        sum_current, sum_current_after_opa)
from .errors import *  # noqa: F401,F403
from .interferometers import (ActiveInputParams, Configuration, PassiveInputParams, build_output_state,
                              make_configuration, qfi_of, recover_physical_params, s1_aa_closed, s1_aa_optimal,
                              s1_pp_closed, s_eta_ap_closed, s_eta_pp_high_energy, s_eta_pp_low_energy,
                              sensitivity_of)
from .optimizer import (OptimizerSettings, SearchBox, SweepResult, minimize, ratio_to_heisenberg,
                        scaling_exponent, sweep)
from .qfi import (SldOperator, StateDerivative, SymplecticSpectrum, cramer_rao, phase_family_derivative,
                  phase_qfi, qfi, qfi_active_closed, qfi_passive_closed, qfi_passive_max, sld, williamson)
