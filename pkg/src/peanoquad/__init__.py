"""Newton-Cotes quadrature with certified Peano-like error bounds.

Simpson, 3/8 Simpson and Boole rules are bounded through two-sided
enclosures ``gamma <= f'' <= Gamma`` computed automatically from a parsed
expression with interval jets.
"""

__version__ = "0.1.0"

from .adaptive import (
    composite_apply,
    integrate_adaptive,
    integrate_uniform,
    uniform_panel_count,
)
from .errors import (
    BudgetExhausted,
    CertificationError,
    DomainError,
    EvaluationError,
    ParseError,
    PeanoQuadError,
    PreconditionError,
    UnknownIdentifierError,
)
from .expr import eval_jet, eval_real, parse, second_derivative_enclosure, to_infix, to_sexpr
from .interval import Interval, Jet2
from .kernels import (
    KernelId,
    kernel_abs_integral,
    kernel_abs_integral_oracle,
    kernel_eval,
    kernel_zeros,
    lemma1_residual,
    p_eval,
    q_eval,
)
from .rules import (
    BoundComparison,
    CertifiedResult,
    Panel,
    RuleId,
    apply_rule,
    certify_panel,
    compare_bounds,
    peano_bound,
    peano_like_bound,
)
