"""Seeded path generators and ensembles."""

from .ensemble import BLOCK, ProcessSpec, ensemble_path, process_spec, run_ensemble
from .paths import Ensemble, EventTimes, SamplePath, check_grid
from .processes import (
    first_passage,
    make_rng,
    ml_waiting_times,
    sibuya,
    sim_fpp,
    sim_gamma,
    sim_gfnbp,
    sim_inverse_stable,
    sim_ml_levy,
    sim_nh_stfnbp,
    sim_sfgnbp,
    sim_sfpp,
    sim_stable,
    stable_unit,
)
