"""Shared random generators for the property tests.

Everything is seeded explicitly by the caller; no global randomness.
"""

from fractions import Fraction

from projconn.connection import Connection, from_table
from projconn.poly import DiffPoly, as_poly
from projconn.projective import OneForm
from projconn.rational import GaussianRational
from projconn.symbols import SymbolTable


def rand_fraction(rng, span=5, max_den=4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def rand_gaussian(rng, span=5, imaginary=True) -> GaussianRational:
    im = rand_fraction(rng, span) if imaginary and rng.random() < 0.4 else 0
    return GaussianRational(rand_fraction(rng, span), im)


def rand_monomial(rng, symbols, max_factors=2, max_exp=2):
    chosen = rng.sample(symbols, k=rng.randint(0, min(max_factors, len(symbols))))
    return {s: rng.randint(1, max_exp) for s in chosen}


def rand_poly(rng, symbols, max_terms=3, max_exp=2) -> DiffPoly:
    total = as_poly(0)
    for _ in range(rng.randint(0, max_terms)):
        term = as_poly(rand_gaussian(rng))
        for sym, exp in rand_monomial(rng, symbols, max_exp=max_exp).items():
            term = term * as_poly(sym) ** exp
        total = total + term
    return total


def coords_named(*names):
    table = SymbolTable()
    return tuple(table.coordinate(n) for n in names)


def rand_torsionfree(rng, coords, symbols=None, max_terms=2, max_exp=2) -> Connection:
    """Random symmetric Christoffel table with polynomial entries."""
    n = len(coords)
    pool = list(symbols if symbols is not None else coords)
    entries = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                if rng.random() < 0.5:
                    entries[(k, i, j)] = rand_poly(rng, pool, max_terms, max_exp)
    return from_table(coords, entries)


def rand_one_form(rng, coords, symbols=None, max_terms=2, max_exp=2) -> OneForm:
    pool = list(symbols if symbols is not None else coords)
    return OneForm(coords, [rand_poly(rng, pool, max_terms, max_exp) for _ in coords])
