"""Closed-form and quadrature distributional layer."""

from .counting import (
    compound_sibuya,
    fnbp_pmf_series,
    fpp_pmf,
    fpp_pmf_vector,
    gfnbp_pmf,
    gfnbp_pmf_series,
    gfnbp_pmf_table,
    gfnbp_pmf_wright,
    nb_pmf,
    nh_stfnbp_pmf,
    nh_stfnbp_pmf_series,
    nh_stfnbp_pmf_table,
    poisson_pmf,
    sfgnbp_pmf,
    sfgnbp_pmf_table,
    sfpp_pmf,
    sfpp_pmf_table,
    sibuya_pmf,
    sibuya_powers,
)
from .levy import (
    ml_levy_cdf,
    ml_levy_laplace,
    ml_levy_levy_density,
    ml_levy_log_moment,
    ml_levy_moment,
    ml_levy_pdf,
    ml_levy_pdf_array,
)
from .moments import (
    gfnbp_cov_asymptotic,
    gfnbp_mean,
    gfnbp_mean_asymptotic,
    gfnbp_variance,
    lrd_exponent,
)
from .params import GfnbpParams, PmfTable, SpaceTimeParams
from .transforms import (
    gfnbp_laplace,
    fnbp_transform_series,
    gfnbp_laplace_wright,
    gfnbp_pgf,
    sfgnbp_laplace,
    sfgnbp_laplace_exponent,
    sfgnbp_laplace_paper,
    sfgnbp_levy_density,
    sfgnbp_levy_weights,
)
