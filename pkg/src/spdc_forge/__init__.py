"""Numerical engine for spatial biphoton states from engineered SPDC crystals."""

__version__ = "0.1.0"

from .optics import (OpticalConfig, TransverseMomentum, BeamParameter,
                     make_config, delta_kz, xi_from_waist, waist_from_xi)
from .profiles import (Constant, GaussianApodized, CosineSeries, DomainSequence,
                       PhaseMatchCurve, evaluate_chi2, phase_matching,
                       phase_matching_curve, residual_response)
from .pump import (PumpSpec, CollectionMode, gaussian_pump, gaussian_amplitude,
                   lg_amplitude, pump_amplitude)
from .state import (SubspaceBounds, CoincidenceMatrix, mode_function_value,
                    decompose, reduced_density)
from .metrics import (MetricsReport, purity_from_matrix, purity_z_kernel,
                      pair_collection_smf, heralding_efficiency, total_rate,
                      compute_metrics)
from .optimize import (CrystalOptResult, PumpOptResult, ScanTable,
                       optimize_crystal, optimize_pump, optimize_collection,
                       scan)
from .poling import (PolingTarget, DomainPlan, cosine_target, synthesize,
                     verify_plan)

# reference cosine-series coefficients for the order-7 optimized crystal
COSINE_COEFFS_ORDER7 = (-0.2904, 0.6799, -0.4851, 0.3903,
                        -0.2195, 0.1242, -0.0440, 0.01487)
