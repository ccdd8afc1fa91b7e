"""Exact computations around Kummer log flat cohomology.

Finitely generated abelian groups and integer Smith forms, group cohomology of
finite abelian groups and its profinite colimits, Cech complexes of Kummer
covers, higher direct images, and cohomology tables over traits and Dedekind
bases.
"""

from .abelian import (
    FgAbGroup,
    ChainComplex,
    Homomorphism,
    ScalarComplex,
    direct_sum,
    exterior_power,
    group_from_presentation,
    hom,
    n_torsion,
    tensor,
    torsion_decompose,
)
from .calculators import (
    CohomologyTable,
    DedekindReport,
    ExtensionProblem,
    GradedModule,
    check_les_exactness,
    dedekind_calculator,
    dvr_calculator,
    leray_two_row,
    zhat_cohomology,
)
from .coefficients import (
    CoeffAtom,
    SymbolicModule,
    ZhatModule,
    frobenius_kernel_cokernel,
    parse_module,
    prime_to_p_sym,
    tensor_sym,
    twist,
)
from .direct_images import (
    BaseDescription,
    BasePoint,
    DirectImageExpr,
    SheafSpec,
    higher_direct_image,
    stalk_on_strict_site,
    vanishing_degree,
)
from .errors import *  # noqa: F401,F403
from .groupcoh import (
    FiniteAbelianGroup,
    GroupMap,
    cohomology_bruteforce,
    cohomology_cyclic_closed,
    cohomology_rational,
    inflation,
    profinite_closed_form,
    profinite_colimit_bruteforce,
    profinite_colimit_report,
    standard_complex,
)
from .kernels import BACKEND
from .kummer import (
    KummerCover,
    LogPointModel,
    cech_cohomology,
    cech_cohomology_tower_map,
    cech_colimit,
    cech_complex,
    kummer_group,
)
from .matrix import IntMatrix, elementary_divisors, smith_normal_form, snf

__version__ = "0.1.0"
