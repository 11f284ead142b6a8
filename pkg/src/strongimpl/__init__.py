"""Exact deciders for weak and strong implementability of social choice
functions with payments, over finite Bayesian type spaces."""

from __future__ import annotations

from .augment import AugmentationResult, augment_from_mechanism
from .errors import BudgetExceeded, InputError, ResourceExceeded, StrongImplError
from .instance import Beliefs, Instance, conditional_beliefs, load_instance, marginal, validate_instance
from .lp import (
    Infeasible,
    LinearConstraint,
    LinearSystem,
    StrictlyFeasible,
    check_point,
    solve_mixed_system,
    validate_refutation,
)
from .mechanism import (
    Mechanism,
    enumerate_equilibria,
    expected_utility,
    is_equilibrium,
    is_incentive_compatible,
    verify_strong_implementation,
)
from .strong_general import (
    Limits,
    StrongCertificate,
    StrongResult,
    build_system,
    decide_strong,
    selectively_eliminable,
    verify_certificate,
)
from .strong_single import decide_strong_single
from .weak import decide_weak

__version__ = "0.1.0"

__all__ = [
    "AugmentationResult",
    "Beliefs",
    "BudgetExceeded",
    "Infeasible",
    "InputError",
    "Instance",
    "Limits",
    "LinearConstraint",
    "LinearSystem",
    "Mechanism",
    "ResourceExceeded",
    "StrictlyFeasible",
    "StrongCertificate",
    "StrongImplError",
    "StrongResult",
    "augment_from_mechanism",
    "build_system",
    "check_point",
    "conditional_beliefs",
    "decide_strong",
    "decide_strong_single",
    "decide_weak",
    "enumerate_equilibria",
    "expected_utility",
    "is_equilibrium",
    "is_incentive_compatible",
    "load_instance",
    "marginal",
    "selectively_eliminable",
    "solve_mixed_system",
    "validate_instance",
    "validate_refutation",
    "verify_certificate",
    "verify_strong_implementation",
]
