"""Torsionfree affine connections as symmetric Christoffel tables.

Component conventions, fixed once and pinned by the golden tests:

    R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik}
                + sum_m (G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik})

    Ricci_{jk} = sum_i R^i_{ijk}        (trace over the first argument)
    TrR_{ij}   = sum_k R^k_{ijk}        (trace of Z -> R(X,Y)Z)

so R(X,Y)Z has components R^l_{XYZ}, TrR(X,Y) = Ricci(Y,X) - Ricci(X,Y)
holds identically, and a connection is equiaffine exactly when Ricci is
symmetric.  The dimension-3 Weyl projective tensor is evaluated in both of
its published shapes (the TrR form and the Ricci-only form) and the two are
cross-checked symbolically on every call.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .errors import (
    ConstructionError,
    DimensionError,
    NotTotallyGeodesicError,
    ShapeError,
)
from .poly import DiffPoly, ZERO_POLY, as_poly
from .symbols import COORDINATE, FUNCTION, Symbol
from .tensor import DOWN, Tensor, UP, contract


class VectorFieldPoly:
    """Holomorphic vector field with polynomial components."""

    __slots__ = ("components",)

    def __init__(self, components):
        object.__setattr__(
            self, "components", tuple(as_poly(c) for c in components)
        )

    def __setattr__(self, name, value):
        raise AttributeError("VectorFieldPoly is immutable")

    @property
    def dim(self):
        return len(self.components)

    def __getitem__(self, k) -> DiffPoly:
        return self.components[k]

    def __eq__(self, other):
        if not isinstance(other, VectorFieldPoly):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)


class Connection:
    """Dimension, ordered coordinates, and the symmetric table G^k_{ij}."""

    __slots__ = ("coords", "gamma")

    def __init__(self, coords, gamma):
        coords = tuple(coords)
        for c in coords:
            if c.kind != COORDINATE:
                raise ConstructionError(f"{c!r} is not a coordinate symbol")
        n = len(coords)
        gamma = tuple(
            tuple(tuple(as_poly(g) for g in row) for row in plane) for plane in gamma
        )
        if len(gamma) != n or any(
            len(plane) != n or any(len(row) != n for row in plane) for plane in gamma
        ):
            raise ConstructionError("Christoffel table must be n x n x n")
        for k, i, j in product(range(n), repeat=3):
            if gamma[k][i][j] != gamma[k][j][i]:
                raise ConstructionError(
                    "Christoffel table not symmetric in its lower indices"
                )
        declared = {c.name for c in coords}
        for plane in gamma:
            for row in plane:
                for entry in row:
                    for sym in entry.symbols():
                        if sym.kind == COORDINATE and sym.name not in declared:
                            raise ConstructionError(
                                f"entry mentions undeclared coordinate {sym.name!r}"
                            )
                        if sym.kind == FUNCTION and not set(sym.depends_on) <= declared:
                            raise ConstructionError(
                                f"function {sym.name!r} depends on coordinates "
                                "outside this chart"
                            )
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "gamma", gamma)

    def __setattr__(self, name, value):
        raise AttributeError("Connection is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def coord_names(self):
        return [c.name for c in self.coords]

    def coord_index(self, name: str) -> int:
        for i, c in enumerate(self.coords):
            if c.name == name:
                return i
        raise ShapeError(f"unknown coordinate {name!r}")

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.coords == other.coords and self.gamma == other.gamma

    def __hash__(self):
        return hash((self.coords, self.gamma))

    def nonzero_entries(self):
        """Nonzero (k, i, j) entries with i <= j."""
        n = self.dim
        for k, i in product(range(n), repeat=2):
            for j in range(i, n):
                g = self.gamma[k][i][j]
                if not g.is_zero():
                    yield (k, i, j), g


def flat_connection(coords) -> Connection:
    """The standard connection: all Christoffel symbols zero."""
    coords = tuple(coords)
    n = len(coords)
    zero_table = tuple(
        tuple(tuple(ZERO_POLY for _ in range(n)) for _ in range(n)) for _ in range(n)
    )
    return Connection(coords, zero_table)


def from_table(coords, entries) -> Connection:
    """Build a connection from a partial table keyed by (k, i, j) indices.

    Missing entries are zero; an entry may be given in either lower-index
    order but conflicting values for (i, j) and (j, i) are rejected.
    """
    coords = tuple(coords)
    n = len(coords)
    table = [[[None] * n for _ in range(n)] for _ in range(n)]
    for (k, i, j), value in entries.items():
        value = as_poly(value)
        for a, b in ((i, j), (j, i)):
            cur = table[k][a][b]
            if cur is not None and cur != value:
                raise ConstructionError(
                    f"conflicting symmetric entries for ({k}, {i}, {j})"
                )
            table[k][a][b] = value
    gamma = tuple(
        tuple(
            tuple(table[k][i][j] if table[k][i][j] is not None else ZERO_POLY
                  for j in range(n))
            for i in range(n)
        )
        for k in range(n)
    )
    return Connection(coords, gamma)


def from_named_table(coords, entries) -> Connection:
    """Same as from_table with 'k.i.j' coordinate-name keys."""
    coords = tuple(coords)
    index = {c.name: pos for pos, c in enumerate(coords)}
    resolved = {}
    for key, value in entries.items():
        parts = key.split(".")
        if len(parts) != 3:
            raise ConstructionError(f"gamma key {key!r} must look like k.i.j")
        try:
            k, i, j = (index[p] for p in parts)
        except KeyError:
            raise ConstructionError(f"unknown coordinate in gamma key {key!r}") from None
        if (k, i, j) in resolved and resolved[(k, i, j)] != as_poly(value):
            raise ConstructionError(f"duplicate gamma key {key!r}")
        resolved[(k, i, j)] = as_poly(value)
    return from_table(coords, resolved)


def curvature(c: Connection) -> Tensor:
    """Curvature tensor R^l_{ijk}, antisymmetric in (i, j)."""
    n = c.dim
    g = c.gamma

    def entry(idx):
        l, i, j, k = idx
        value = g[l][j][k].diff(c.coords[i]) - g[l][i][k].diff(c.coords[j])
        for m in range(n):
            value = value + g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k]
        return value

    return Tensor.from_function(n, (UP, DOWN, DOWN, DOWN), entry)


def ricci(c: Connection) -> Tensor:
    """Ricci_{jk}: trace of xi -> R(xi, eta) nu."""
    return contract(curvature(c), 0, 1)


def trace_r(c: Connection) -> Tensor:
    """TrR_{ij}: trace of xi -> R(eta, nu) xi."""
    return contract(curvature(c), 0, 3)


def _weyl3_from(r: Tensor, ric: Tensor, trr: Tensor) -> Tensor:
    n = r.dim

    def entry(idx):
        l, i, j, k = idx
        value = r[idx]
        if l == k:
            value = value - trr[i, j] * Fraction(1, 4)
        if l == i:
            value = value - ric[j, k] * Fraction(1, 2) - trr[j, k] * Fraction(1, 8)
        if l == j:
            value = value + ric[i, k] * Fraction(1, 2) + trr[i, k] * Fraction(1, 8)
        return value

    return Tensor.from_function(n, (UP, DOWN, DOWN, DOWN), entry)


def _weyl3_ricci_only(r: Tensor, ric: Tensor) -> Tensor:
    n = r.dim

    def entry(idx):
        l, i, j, k = idx
        value = r[idx]
        if l == k:
            value = value + (ric[i, j] - ric[j, i]) * Fraction(1, 4)
        if l == j:
            value = value + (ric[i, k] * 3 + ric[k, i]) * Fraction(1, 8)
        if l == i:
            value = value - (ric[j, k] * 3 + ric[k, j]) * Fraction(1, 8)
        return value

    return Tensor.from_function(n, (UP, DOWN, DOWN, DOWN), entry)


def weyl3(c: Connection) -> Tensor:
    """Weyl projective tensor in dimension three.

    Both published shapes are evaluated and must agree; transcription slips
    in either one would otherwise go unnoticed.
    """
    if c.dim != 3:
        raise DimensionError("the Weyl projective formula here is dimension 3 only")
    r = curvature(c)
    ric = contract(r, 0, 1)
    trr = contract(r, 0, 3)
    w = _weyl3_from(r, ric, trr)
    w_alt = _weyl3_ricci_only(r, ric)
    if w != w_alt:
        raise AssertionError("the two Weyl tensor forms disagree; formula bug")
    return w


def bianchi_check(t: Tensor) -> bool:
    """First Bianchi identity: cyclic sum over the three arguments is zero."""
    if t.arity != 4:
        raise ShapeError("Bianchi check needs a (1,3) tensor")
    for l, i, j, k in t.indices():
        total = t[l, i, j, k] + t[l, j, k, i] + t[l, k, i, j]
        if not total.is_zero():
            return False
    return True


def equiaffine_check(c: Connection) -> bool:
    """True when Ricci is symmetric, i.e. TrR vanishes."""
    ric = ricci(c)
    for i, j in ric.indices():
        if ric[i, j] != ric[j, i]:
            return False
    return True


def lie_derivative(c: Connection, field: VectorFieldPoly) -> Tensor:
    """Lie derivative of the connection along a vector field.

    Standard coordinate formula:

        (L_X G)^k_{ij} = d_i d_j X^k + X^m d_m G^k_{ij}
                         + G^k_{mj} d_i X^m + G^k_{im} d_j X^m
                         - G^m_{ij} d_m X^k

    It vanishes exactly when the field is an affine Killing field.
    """
    if field.dim != c.dim:
        raise ShapeError("vector field dimension mismatch")
    n = c.dim
    g = c.gamma
    coords = c.coords
    dX = [
        [field[m].diff(coords[i]) for m in range(n)] for i in range(n)
    ]  # dX[i][m] = d_i X^m

    def entry(idx):
        k, i, j = idx
        value = field[k].diff(coords[j]).diff(coords[i])
        for m in range(n):
            value = value + field[m] * g[k][i][j].diff(coords[m])
            value = value + g[k][m][j] * dX[i][m] + g[k][i][m] * dX[j][m]
            value = value - g[m][i][j] * dX[m][k]
        return value

    return Tensor.from_function(n, (UP, DOWN, DOWN), entry)


def is_affine_killing(c: Connection, field: VectorFieldPoly) -> bool:
    return lie_derivative(c, field).is_zero()


def totally_geodesic_restrict(c: Connection, keep) -> Connection:
    """Induced connection on a totally geodesic coordinate subspace.

    Requires G^k_{ij} = 0 for tangential i, j and normal k, and kept entries
    free of the dropped coordinates (including through function symbols).
    """
    keep_names = [s.name if isinstance(s, Symbol) else s for s in keep]
    kept = [c.coord_index(name) for name in keep_names]
    order = sorted(kept)
    dropped = [i for i in range(c.dim) if i not in kept]
    dropped_names = {c.coords[i].name for i in dropped}
    for i, j in product(order, repeat=2):
        for k in dropped:
            if not c.gamma[k][i][j].is_zero():
                raise NotTotallyGeodesicError(
                    f"G^{c.coords[k].name}_{{{c.coords[i].name},{c.coords[j].name}}}"
                    " is nonzero"
                )
    for k in order:
        for i, j in product(order, repeat=2):
            for sym in c.gamma[k][i][j].symbols():
                if sym.kind == COORDINATE and sym.name in dropped_names:
                    raise NotTotallyGeodesicError(
                        f"kept entry depends on dropped coordinate {sym.name!r}"
                    )
                if sym.kind == FUNCTION and dropped_names & set(sym.depends_on):
                    raise NotTotallyGeodesicError(
                        f"kept entry depends on dropped coordinates through {sym.name!r}"
                    )
    coords = tuple(c.coords[i] for i in order)
    gamma = tuple(
        tuple(tuple(c.gamma[k][i][j] for j in order) for i in order) for k in order
    )
    return Connection(coords, gamma)
