"""Theta series, p-neighbors and class enumeration for ternary lattice cosets aL + nu."""

from .cosets import (
    AmbientSpace,
    ConductorMismatch,
    Coset,
    Lattice,
    canonical_key,
    coset,
    discriminant,
    level,
    make_coset,
    scale_shift,
)
from .decomposition import (
    DecompositionReport,
    UnaryTheta,
    decompose,
    fit_unary,
    hecke_T_p2,
    mass,
    support_check,
    theta_average,
    verify_eichler,
    verify_genus_eigen,
)
from .enumeration import QSeries, default_precision, short_vectors, theta_series
from .isometry import ClassIndex, Isometry, o_plus, proper_automorphisms, proper_isometry
from .linalg import hnf, invariant_factors, kronecker, mod_inverse
from .neighbors import (
    ClassList,
    InvalidPrime,
    NeighborSet,
    NotInZp,
    enumerate_classes,
    enumerate_genus,
    neighbors,
    pi_closed_form,
    pi_count,
    validate,
    zp_chain,
)

__version__ = "0.1.0"
