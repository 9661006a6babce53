"""Characteristic-p Frobenius machinery.

Bracket powers, Frobenius roots over polynomial rings (by decomposition over
the monomial basis of the Frobenius pushforward), pushforward bases, and the
substitution model of base rings A^{1/q^n} for polynomial bases A = F_p[t].

p^{-e}-linear maps are represented throughout by a single multiplier
element u: the map sends z^{1/q} to trace(u*z)^{1/q}, and the image of an
ideal J is computed as the Frobenius root of u*J.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groebner import Ideal
from .polycore import DomainError, Polynomial, _is_prime
from .triples import PresentationError, RingPresentation


@dataclass(frozen=True)
class FrobeniusPower:
    """q = p^e for the ambient characteristic p."""

    p: int
    e: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.e < 0:
            raise DomainError("Frobenius exponent must be >= 0")

    @property
    def q(self) -> int:
        return self.p ** self.e


@dataclass(frozen=True)
class BaseExtension:
    """Base change data: the ring B_n = R tensor_A A^{1/q^n}."""

    base_variables: tuple
    level: int
    power: FrobeniusPower

    def __post_init__(self):
        if self.level < 0:
            raise DomainError("extension level must be >= 0")


def _check_char(obj, p: int):
    if obj.domain.characteristic != p:
        raise DomainError(
            f"expected characteristic {p}, got {obj.domain.characteristic}")


def bracket_power(I: Ideal, power: FrobeniusPower) -> Ideal:
    """a^[q]: the ideal generated by q-th powers of the generators."""
    _check_char(I, power.p)
    q = power.q
    result = Ideal(I.domain, I.nvars, [g.frobenius_power(q) for g in I.gens])
    # a reduced GB powers up to a reduced GB of the bracket ideal
    for token, gb in I._gb_cache.items():
        result._gb_cache[token] = tuple(g.frobenius_power(q) for g in gb)
    return result


def decompose(f: Polynomial, q: int, root_indices=None) -> dict:
    """Write f = sum_r (g_r)^q * x^r over the pushforward basis.

    Returns {residue monomial r: g_r}.  Only the variables in
    ``root_indices`` (default: all) are rooted; the others stay in the
    coefficient polynomials untouched, which realizes relative Frobenius
    roots over a polynomial base.
    """
    n = f.nvars
    idx = set(range(n)) if root_indices is None else set(root_indices)
    pieces: dict = {}
    for m, c in f.terms.items():
        residue = tuple(m[i] % q if i in idx else 0 for i in range(n))
        quotient = tuple((m[i] - residue[i]) // q if i in idx else m[i]
                         for i in range(n))
        bucket = pieces.setdefault(residue, {})
        bucket[quotient] = c  # c^{1/q} = c over F_p
    return {r: Polynomial(f.domain, n, terms, _clean=True)
            for r, terms in pieces.items()}


def frobenius_root(I: Ideal, power: FrobeniusPower, root_indices=None) -> Ideal:
    """I^[1/q]: smallest J with I subseteq J^[q] (polynomial ambient only)."""
    _check_char(I, power.p)
    q = power.q
    gens = []
    for g in I.gens:
        gens.extend(decompose(g, q, root_indices).values())
    return Ideal(I.domain, I.nvars, gens)


def pushforward_basis(num_vars: int, power: FrobeniusPower):
    """The q^num_vars monomials with exponents in [0, q-1], in lex order."""
    from itertools import product

    return list(product(range(power.q), repeat=num_vars))


def base_extend(R: RingPresentation, ext: BaseExtension) -> RingPresentation:
    """Present B_n = R tensor_A A^{1/q^n} by substituting t_j -> s_j^{q^n}.

    The returned presentation reuses the base-variable slots for the new
    root variables s_j; the embedding R -> B_n sends t_j to s_j^{q^n} and
    fixes the fiber variables, which is exactly ``embed_to_level``.
    """
    if R.domain.characteristic != ext.power.p:
        raise DomainError("base extension requires the ambient characteristic")
    if tuple(ext.base_variables) != tuple(R.base_vars):
        raise PresentationError("extension base variables differ from the ring's")
    base = set(R.base_vars)
    if ext.level == 0:
        return R
    qn = ext.power.q ** ext.level
    scaled = [g.scale_exponents(base, qn) for g in R.relations.gens]
    return RingPresentation(
        R.var_names, R.domain,
        Ideal(R.domain, R.nvars, scaled),
        R.base_vars, R.base_level + ext.level)


def embed_to_level(f: Polynomial, base_indices, power: FrobeniusPower,
                   levels: int) -> Polynomial:
    """Image of a level-i element in level i+levels coordinates."""
    if levels < 0:
        raise DomainError("cannot embed downward")
    if levels == 0:
        return f
    return f.scale_exponents(base_indices, power.q ** levels)


def embed_ideal_to_level(I: Ideal, base_indices, power: FrobeniusPower,
                         levels: int) -> Ideal:
    return Ideal(I.domain, I.nvars,
                 [embed_to_level(g, base_indices, power, levels)
                  for g in I.gens])
