"""Order dimension, local dimension and Boolean dimension of finite posets,
with the Kelly constructions, the height-2 core, product Ramsey tools and a
stage adversary against low-multiplicity local realizers."""

from .constructions import (
    CoreOrder,
    abstract_core,
    embed_core,
    kelly,
    kelly_rec,
    prop1_less,
    standard_example,
    structural_core_points,
)
from .errors import OrdimError
from .poset import Label, Poset, antichain, chain, dual, poset_from_covers, random_poset, subposet
from .realizers import (
    BooleanRealizer,
    kelly_boolean_realizer,
    kelly_local_realizer,
    verify_boolean_realizer,
    verify_local_realizer,
    verify_realizer,
)
from .solvers import Budget, bdim_decide, bdim_exact, critical_pairs, dim_exact, is_reversible, ldim_exact

__version__ = "0.1.0"
