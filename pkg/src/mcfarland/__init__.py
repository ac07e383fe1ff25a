"""Abelian difference sets with parameters (2^(2m+1)(2^(m-1)+1), 2^m(2^m+1), 2^m)
and the building sets they decompose into."""

from .characters import (
    Character,
    CycloValue,
    char_sum,
    character,
    enumerate_characters,
    restrict_extend,
)
from .designs import (
    BuildingSetFamily,
    SpreadFamily,
    assemble_difference_set,
    construct_building_sets,
    decompose_difference_set,
    gf2m_spread,
    quotient_building_sets,
    sum_identity_check,
    verify_building_sets,
)
from .errors import *  # noqa: F401,F403
from .group_ring import (
    GroupRingElement,
    dset_character_criterion,
    has_half_modulus_property,
    is_difference_set,
    mcfarland_params,
)
from .groups import (
    ElementSet,
    FinAbGroup,
    Subgroup,
    frattini_and_socle,
    is_transversal,
    make_group,
    quotient,
    stabilizer,
    subgroups_of_order,
)
from .search import SearchReport, ei_ej_sweep, oracle_size, oracle_size_curated, oracle_z43
from .transversals import (
    ClassificationReport,
    classify_transversal,
    cong_restrict,
    cz43_check,
    eg_find_order2,
    extract_coset_E2,
    spread_orthogonality_check,
    typeI_structure_report,
)

__version__ = "0.1.0"
