"""Interpolatory cubature on finite designs via vanishing ideals written
over orthogonal polynomials."""

__version__ = "0.1.0"

from .errors import (
    CubalgError,
    DegenerateNodesError,
    DimensionMismatchError,
    InputError,
    InvalidDesignError,
    InvalidFractionError,
    NumericError,
    OrderError,
)
from .ortho import (
    CHEBYSHEV,
    HERMITE,
    LEGENDRE,
    QuadratureRule,
    RecurrenceSystem,
    UniPoly,
    cd_kernel,
    eval_pi,
    gauss_rule,
    get_system,
    monomial_to_ortho,
    nodes,
    norm_sq,
    ortho_to_monomial,
    quadrature_error_1d,
)
from .hermite import HermiteExpansion, aliasing_nf, aliasing_symbolic, product_expand, weighing_polynomial
from .polyspace import DEGLEX, DEGREVLEX, LEX, MonoPoly, OrthoPoly, TermOrder, eval_multi, mono_to_ortho_multi, ortho_to_mono_multi
from .vanishing import Design, OrthoGBasis, StandardSet, bm_ortho, indicator, interpolate, product_design, weights
from .cubature import (
    CubatureFormula,
    DesignFraction,
    cubature_degree,
    cubature_value,
    exact_expectation,
    fraction_error,
    fraction_weights,
    product_grid_expectation,
    s_orthogonality,
    zero_mean_check,
)
