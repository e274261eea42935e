"""Polycyclic collection, Engel-group analysis and group-based protocols."""

from engelkit.errors import (
    BudgetExhausted,
    CollectionBudgetExceeded,
    EngelKitError,
    InfiniteGroupError,
    PresentationError,
    PresentationMismatch,
    ProtocolError,
    WireError,
)
from engelkit.pc import (
    INFINITY,
    FreeWord,
    GroupElement,
    PcPresentation,
    collect,
    commutator,
    element_order,
    engel_commutator,
    enumerate_elements,
    inverse,
    multiply,
    power,
    random_element,
)
from engelkit.catalog import (
    GroupHom,
    HolomorphElement,
    build,
    build_burnside3,
    build_classic,
    build_exponent_quotient,
    build_free_nilpotent,
    build_hom,
    hom_is_invertible,
)

__version__ = "0.1.0"
