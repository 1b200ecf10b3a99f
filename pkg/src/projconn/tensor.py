"""Dense multi-index tensors of polynomials with variance-aware contraction.

Entries are stored row-major over index tuples in {0..n-1}^arity; reports
and the JSON form use coordinate names instead of numbers.  Dimensions stay
small (n <= 6) so dense storage wins over any sparse scheme.
"""

from __future__ import annotations

from itertools import product

from .errors import ShapeError
from .poly import DiffPoly, ZERO_POLY, as_poly

UP = "up"
DOWN = "down"


def _flat(dim, idx):
    flat = 0
    for i in idx:
        flat = flat * dim + i
    return flat


class Tensor:
    """Immutable dense tensor; variance lists one 'up'/'down' per slot."""

    __slots__ = ("dim", "variance", "entries")

    def __init__(self, dim, variance, entries):
        variance = tuple(variance)
        for slot in variance:
            if slot not in (UP, DOWN):
                raise ShapeError(f"bad variance slot {slot!r}")
        entries = tuple(as_poly(e) for e in entries)
        if len(entries) != dim ** len(variance):
            raise ShapeError(
                f"expected {dim ** len(variance)} entries, got {len(entries)}"
            )
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "variance", variance)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("Tensor is immutable")

    @classmethod
    def from_function(cls, dim, variance, fn) -> "Tensor":
        variance = tuple(variance)
        entries = [fn(idx) for idx in product(range(dim), repeat=len(variance))]
        return cls(dim, variance, entries)

    @classmethod
    def zero(cls, dim, variance) -> "Tensor":
        return cls(dim, variance, [ZERO_POLY] * dim ** len(tuple(variance)))

    @property
    def arity(self) -> int:
        return len(self.variance)

    def __getitem__(self, idx) -> DiffPoly:
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != self.arity:
            raise ShapeError(f"expected {self.arity} indices, got {len(idx)}")
        return self.entries[_flat(self.dim, idx)]

    def indices(self):
        return product(range(self.dim), repeat=self.arity)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.variance == other.variance
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.dim, self.variance, self.entries))

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def map(self, fn) -> "Tensor":
        return Tensor(self.dim, self.variance, [fn(e) for e in self.entries])

    def __add__(self, other):
        if self.dim != other.dim or self.variance != other.variance:
            raise ShapeError("tensor shape mismatch in addition")
        return Tensor(
            self.dim,
            self.variance,
            [a + b for a, b in zip(self.entries, other.entries)],
        )

    def __sub__(self, other):
        return self + other.map(lambda e: -e)

    def __mul__(self, scalar):
        return self.map(lambda e: e * scalar)

    __rmul__ = __mul__

    def swap_slots(self, s1, s2) -> "Tensor":
        """Transpose two index positions."""

        def entry(idx):
            swapped = list(idx)
            swapped[s1], swapped[s2] = swapped[s2], swapped[s1]
            return self[tuple(swapped)]

        return Tensor.from_function(self.dim, self.variance, entry)


def contract(t: Tensor, up: int, down: int) -> Tensor:
    """Trace one contravariant slot against one covariant slot."""
    if up == down:
        raise ShapeError("cannot contract a slot with itself")
    if t.variance[up] != UP:
        raise ShapeError(f"slot {up} is not contravariant")
    if t.variance[down] != DOWN:
        raise ShapeError(f"slot {down} is not covariant")
    keep = [s for s in range(t.arity) if s not in (up, down)]
    variance = tuple(t.variance[s] for s in keep)

    def entry(idx):
        total = ZERO_POLY
        for k in range(t.dim):
            full = [0] * t.arity
            for slot, value in zip(keep, idx):
                full[slot] = value
            full[up] = k
            full[down] = k
            total = total + t[tuple(full)]
        return total

    return Tensor.from_function(t.dim, variance, entry)


def symmetry_check(t: Tensor, slots, mode: str) -> bool:
    """True when swapping the two slots gives +t (symmetric) or -t."""
    s1, s2 = slots
    if t.variance[s1] != t.variance[s2]:
        raise ShapeError("symmetry slots must share variance")
    if mode not in ("symmetric", "antisymmetric"):
        raise ShapeError(f"unknown symmetry mode {mode!r}")
    swapped = t.swap_slots(s1, s2)
    if mode == "symmetric":
        return swapped == t
    return swapped == t.map(lambda e: -e)


def is_zero(t: Tensor) -> bool:
    return t.is_zero()


def tensor_to_json(t: Tensor, coord_names) -> dict:
    """JSON form with zero entries omitted; keys join coordinate names by '.'."""
    coord_names = list(coord_names)
    if len(coord_names) != t.dim:
        raise ShapeError("coordinate names must match the dimension")
    entries = {}
    for idx in t.indices():
        value = t[idx]
        if value.is_zero():
            continue
        entries[".".join(coord_names[i] for i in idx)] = str(value)
    return {"variance": list(t.variance), "entries": entries}


def tensor_from_json(data: dict, coord_names, table) -> Tensor:
    """Inverse of tensor_to_json; expressions parsed against the table."""
    from .parser import parse_expr

    coord_names = list(coord_names)
    dim = len(coord_names)
    variance = tuple(data["variance"])
    lookup = {name: i for i, name in enumerate(coord_names)}
    entries = {}
    for key, text in data.get("entries", {}).items():
        parts = key.split(".")
        if len(parts) != len(variance):
            raise ShapeError(f"entry key {key!r} does not match the variance")
        try:
            idx = tuple(lookup[p] for p in parts)
        except KeyError as exc:
            raise ShapeError(f"unknown coordinate in key {key!r}") from exc
        entries[idx] = parse_expr(text, table)

    return Tensor.from_function(
        dim, variance, lambda idx: entries.get(idx, ZERO_POLY)
    )
