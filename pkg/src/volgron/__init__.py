"""volgron: iterated kernels, resolvents, Gronwall bounds and certified
Picard iteration on ordered domains.

The package is organised around one substrate and four computational
layers:

* ``extreal``, ``domains``, ``measures``, ``quadrature`` -- extended
  nonnegative reals, ordered integration domains, measures and panel
  quadrature with two-level error estimates;
* ``specfun`` -- gamma-family functions and a generalised Mittag-Leffler
  series with certified truncation;
* ``kernels`` -- parameterised kernel families (separable, fractional,
  sums, products, void-ordered, multiplicative);
* ``resolvent`` -- iterated-kernel tables, resolvent series, the series
  function behind the tractable kernel class, sum and product
  decompositions;
* ``gronwall`` / ``fixpoint`` -- certified bound curves for
  Gronwall-type inequalities, and a Picard engine with per-iterate error
  certificates.

Everything is pure-functional over immutable inputs with fixed summation
orders, so results are reproducible bit-for-bit.
"""

from .domains import (
    Interval1D,
    OutsideDomainError,
    ProductBox,
    QuadratureGrid,
    VoidSet,
    lower_set,
)
from .extreal import INF, ExtReal
from .fixpoint import (
    DivergentBoundError,
    EvolutionOperatorSpec,
    PicardCertificate,
    error_bound,
    lipschitz_profile,
    picard_solve,
    uniqueness_certificate,
)
from .config import (
    ConfigError,
    ProblemConfig,
    domain_to_json,
    load_problem_config,
    measure_to_json,
    parse_domain,
    parse_kernel,
    parse_measure,
)
from .gronwall import (
    BoundCurve,
    GronwallInput,
    check_vanishing,
    fractional_box_sup_bound,
    gronwall_bound,
    gronwall_curve,
    gronwall_sequence_bound,
    induction_check,
    resolvent_bound,
)
from .kernels import (
    AlphaBetaBounds,
    CallableKernel,
    FractionalKernel,
    Kernel,
    MultiplicativeKernel,
    PreorderError,
    ProductKernel,
    SeparableKernel,
    SumKernel,
    TransformedFractionalKernel,
    VoidKernel,
    check_monotone,
    constant_kernel,
    submultiplicative_defect,
)
from .measures import (
    DiscreteMeasure,
    Lebesgue,
    ProductMeasure,
    WeightedLebesgue,
)
from .quadrature import IntegralResult, integrate, integrate_singular
from .resolvent import (
    ComponentBudgetError,
    FractionalResolventParams,
    MaskedEntryError,
    ResolventTable,
    compose_layers,
    fractional_f,
    fractional_f_bound,
    fractional_inequality_constant,
    iterated_kernels,
    product_bound,
    resolvent_series,
    series_function_I,
    sum_decomposition,
    volterra_residual,
)
from .specfun import (
    MLParams,
    SeriesValue,
    beta,
    digamma,
    gamma_min_point,
    ln_gamma,
    mittag_leffler,
)

__version__ = "0.1.0"
