"""Exact symbolic tensor calculus for torsionfree holomorphic affine
connections: curvature, Ricci and trace curvatures, the dimension-3 Weyl
projective tensor, projective equivalence with explicit witnesses, volume
normalization, flatness classification of parametric families, and a numeric
geodesic cross-check.  All symbolic arithmetic is exact over Q(i)."""

from .rational import GaussianRational, as_gaussian
from .symbols import Symbol, SymbolTable, coordinate, function, parameter
from .poly import DiffPoly, as_poly
from .parser import parse_constant, parse_expr
from .tensor import Tensor, contract, symmetry_check, tensor_from_json, tensor_to_json
from .connection import (
    Connection,
    VectorFieldPoly,
    bianchi_check,
    curvature,
    equiaffine_check,
    flat_connection,
    from_named_table,
    from_table,
    lie_derivative,
    ricci,
    totally_geodesic_restrict,
    trace_r,
    weyl3,
)
from .projective import (
    OneForm,
    ThetaField,
    divergence,
    flatness_conditions,
    inject,
    is_projectively_flat,
    projective_equiv,
    theta_between,
    theta_of,
    trace_free_project,
    volume_normalize,
    with_one_form,
    zero_one_form,
)
from .families import (
    ActionMap,
    GroupElement,
    WeightedCoefficient,
    action_map,
    invariance_check,
    kuga_shimura,
    kuga_shimura_coefficients,
    kuga_shimura_theta,
    torus3,
    torus_n,
    transported_values,
)
from .geodesic import GeodesicPath, NumericConnection, integrate, unparametrized_match

__version__ = "0.1.0"
