"""Antenna impedance estimation over correlated Rayleigh-fading MISO links.

Estimates the bilinear load-switching parameter F (equivalently the antenna
impedance Z_A) and the channel gain variance from training observations,
with maximum-likelihood and method-of-moments estimators, Cramér-Rao bounds,
MMSE channel estimation, and ergodic-capacity evaluation under adaptive
conjugate matching.
"""

from .bounds import (BoundReport, CapacityPoint, bayesian_crb_H, capacity_lb,
                     capacity_scenario, capacity_tau_form, crb, fim_multi,
                     gamma_eff, j1_mmse)
from .estimators import (EstimateReport, FastFadingML, MethodOfMoments,
                         MMSEChannel, MultiPacketML, SinglePacketML, build_T,
                         ml_fast_fading, ml_multi_packet, ml_single_packet,
                         mm_estimator, mmse_channel, mp_log_likelihood)
from .exceptions import (BadBracket, ConfigError, Degenerate, DomainError,
                         ImpedanceLabError, IndefiniteMatrix,
                         InfeasibleTraining, NonHermitian, NonPassive,
                         OptimizerFailure, ShapeMismatch, SingularCircuit,
                         SingularFIM, SingularInversion, SingularSystem)
from .fading import (ChannelSpec, FadingDraw, clarke_correlation, doppler_hz,
                     sample_H, sos_sequence)
from .frontend import (ImpedanceSet, LinkBudget, compute_F, conjugate_match,
                       effective_sigma2, find_mismatched_load, mismatch_loss,
                       recover_ZA, sigma_h2_from_gain)
from .harness import (ExperimentConfig, SweepRow, capacity_csv, load_config,
                      run_capacity, run_sweep, sweep_csv)
from .numerics import (EigSys2, bessel_j0, check_hermitian, crandn,
                       expint_en, expint_en_scaled, herm_eig2, herm_eig_n,
                       maximize_scalar)
from .signalpath import (Observations, SufficientStats, TrainingSpec, Truth,
                         dft_training, sufficient_stats, synthesize)

__version__ = "0.1.0"
