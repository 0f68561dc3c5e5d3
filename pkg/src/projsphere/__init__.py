"""Projective transformations of S^n and its quotient by the deck matrix B.

Numerical certificates for the dimension n^2 - 2n + 2 of the group of
projective transformations of the quotient, plus Randers-metric geodesics.
"""

from .errors import (
    BlockFormError,
    DegenerateInputError,
    EnergyDriftError,
    FinslerConditionError,
    InvalidInputError,
    ProjSphereError,
    RankAmbiguityError,
    RankDisagreementError,
)
from .liealg import (
    build_deck_matrix,
    centralizer,
    classify_block_form,
    dimension_report,
    sylvester_operator,
)
from .quotient import QuotientSpace, canonical_representative, descends, same_quotient_map, verify_free_action
from .randers import RandersData, curves_projectively_equal, evaluate_F, integrate_geodesic, validate_finsler
from .sphere import (
    GreatCircle,
    ProjectiveMap,
    ProjectiveVectorField,
    apply,
    flow,
    map_great_circle,
    projective_maps_equal,
    vector_field_at,
)

__version__ = "0.1.0"
