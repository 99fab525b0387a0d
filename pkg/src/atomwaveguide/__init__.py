"""Subwavelength atomic arrays as optical waveguides: dispersion, impurity
coupling rates, non-Hermitian spin dynamics, and figure-level scenarios."""

from .dispersion import (
    OutOfBandError,
    band_edges,
    dispersion_table,
    find_k1d,
    group_velocity,
    omega_of_kz,
    omega_of_kz_sum,
)
from .dynamics import (
    EffectiveModel,
    PureState1,
    PureState2,
    TrajectoryRecord,
    build_model,
    chirality,
    ensemble_average,
    lindblad_reference,
    propagate_no_jump,
    sample_trajectory,
)
from .fits import FitError, fit_lorentzian, fit_power_law
from .geometry import (
    K0,
    ChainGeometry,
    CoincidentEmittersError,
    ImpurityQubit,
    coincident_greens_imag,
    greens_free,
    interaction_matrices,
)
from .guided import (
    GuidedRates,
    coherent_shift,
    find_magic_point,
    gamma_free_space,
    gamma_guided,
    mode_u,
    mode_v,
    scan_decay_rates,
)
from .results import ResultTable
from .scenarios import (
    SCENARIOS,
    ScenarioError,
    init_spin_wave,
    init_two_photon,
    run_scenario,
    scenario_names,
    validate_config,
)
from .specfun import SingularityError, hankel1, polylog

try:
    from importlib.metadata import version as _pkg_version

    __version__ = _pkg_version("atomwaveguide")
except Exception:  # pragma: no cover - not installed
    __version__ = "0.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
