"""Dense simulator of the quantum order-finding routine with resource meters.

The package evolves the two-register state through every circuit stage,
computes coherence and entanglement quantifiers on the simulated states,
evaluates the matching closed forms independently, cross-validates the two,
and finishes the classical factoring post-processing.
"""

from shormeter.numtheory import (
    ShorInstance,
    extract_factors,
    find_order_bruteforce,
    make_instance,
    recover_order,
    register_sizes,
)
from shormeter.statevec import (
    PureState,
    RegisterLayout,
    run_order_finding_circuit,
)

__version__ = "0.1.0"

__all__ = [
    "PureState",
    "RegisterLayout",
    "ShorInstance",
    "extract_factors",
    "find_order_bruteforce",
    "make_instance",
    "recover_order",
    "register_sizes",
    "run_order_finding_circuit",
]
