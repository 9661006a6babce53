"""Exact sparse multivariate polynomial arithmetic over Q and F_p.

Polynomials are immutable term maps (exponent tuple -> nonzero coefficient).
Coefficients are ``fractions.Fraction`` over the rationals and canonical
residues in ``[0, p-1]`` over a prime field.  Variables are positional;
names are display metadata supplied by callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping


class PolyError(Exception):
    """Base class for polynomial-layer errors."""


class ParseError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(PolyError):
    """Domain mismatch or invalid coefficient domain."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class CoefficientDomain:
    """Either the rationals (p is None) or the prime field F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise DomainError(f"modulus {self.p} is not prime")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def zero(self):
        return Fraction(0) if self.p is None else 0

    def one(self):
        return Fraction(1) if self.p is None else 1

    def from_fraction(self, value: Fraction):
        """Canonical image of a rational number in this domain."""
        value = Fraction(value)
        if self.p is None:
            return value
        if value.denominator % self.p == 0:
            raise DomainError(
                f"denominator {value.denominator} is not a unit modulo {self.p}")
        num = value.numerator % self.p
        den = value.denominator % self.p
        return (num * pow(den, -1, self.p)) % self.p

    def normalize(self, c):
        if self.p is None:
            return Fraction(c)
        if isinstance(c, Fraction):
            return self.from_fraction(c)
        return int(c) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if self.p is None:
            if a == 0:
                raise DomainError("division by zero")
            return Fraction(1) / a
        if a % self.p == 0:
            raise DomainError(f"{a} is not a unit modulo {self.p}")
        return pow(a, -1, self.p)

    def __str__(self):
        return "Q" if self.p is None else f"F_{self.p}"


RATIONALS = CoefficientDomain(None)


def prime_field(p: int) -> CoefficientDomain:
    return CoefficientDomain(p)


# ---------------------------------------------------------------------------
# Monomials: plain exponent tuples with helper functions.

Monomial = tuple

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b, assuming b divides a."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


@dataclass(frozen=True)
class MonomialOrder:
    """Total order on monomials compatible with multiplication.

    kind is one of "lex", "grevlex", "elim"; for "elim" the first
    ``block`` variables dominate (block order, grevlex inside each block),
    so a Groebner basis eliminates the leading block.
    """

    kind: str = "grevlex"
    block: int = 0

    def key(self, m: Monomial):
        if self.kind == "lex":
            return m
        if self.kind == "grevlex":
            return _grevlex_key(m)
        if self.kind == "elim":
            return (_grevlex_key(m[: self.block]), _grevlex_key(m[self.block:]))
        raise ValueError(f"unknown order kind {self.kind!r}")

    def heap_key(self, m: Monomial):
        """A key that sorts ascending exactly when the monomial sorts
        descending; lets min-heaps pop leading monomials cheaply."""
        if self.kind == "lex":
            return tuple(-e for e in m)
        if self.kind == "grevlex":
            return (-sum(m), m[::-1])
        if self.kind == "elim":
            head, tail = m[: self.block], m[self.block:]
            return (-sum(head), head[::-1], -sum(tail), tail[::-1])
        raise ValueError(f"unknown order kind {self.kind!r}")

    def cache_token(self):
        return (self.kind, self.block)


def _grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def elimination_order(block: int) -> MonomialOrder:
    return MonomialOrder("elim", block)


# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable sparse polynomial in a fixed number of variables."""

    __slots__ = ("domain", "nvars", "terms")

    def __init__(self, domain: CoefficientDomain, nvars: int,
                 terms: Mapping[Monomial, object] | Iterable = (), *,
                 _clean: bool = False):
        self.domain = domain
        self.nvars = nvars
        if _clean:
            self.terms = dict(terms)
            return
        clean: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise PolyError(f"bad exponent vector {mono} for {nvars} variables")
            c = domain.normalize(coeff)
            if mono in clean:
                c = domain.add(clean[mono], c)
            if c == 0:
                clean.pop(mono, None)
            else:
                clean[mono] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, domain, nvars):
        return cls(domain, nvars, {}, _clean=True)

    @classmethod
    def constant(cls, domain, nvars, value):
        c = domain.normalize(value)
        if c == 0:
            return cls.zero(domain, nvars)
        return cls(domain, nvars, {(0,) * nvars: c}, _clean=True)

    @classmethod
    def variable(cls, domain, nvars, index, exponent: int = 1):
        if not 0 <= index < nvars:
            raise PolyError(f"variable index {index} out of range")
        mono = tuple(exponent if i == index else 0 for i in range(nvars))
        return cls(domain, nvars, {mono: domain.one()}, _clean=True)

    @classmethod
    def monomial(cls, domain, nvars, mono, coeff=1):
        return cls(domain, nvars, {tuple(mono): coeff})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.nvars: self.domain.one()}

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.domain.zero())

    # -- ring operations ---------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.domain != other.domain or self.nvars != other.nvars:
            raise DomainError("polynomials live in different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.domain, self.nvars, other)
        self._check_compatible(other)
        dom = self.domain
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = dom.add(res.get(m, dom.zero()), c)
            if s == 0:
                res.pop(m, None)
            else:
                res[m] = s
        return Polynomial(dom, self.nvars, res, _clean=True)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        dom = self.domain
        return Polynomial(dom, self.nvars,
                          {m: dom.neg(c) for m, c in self.terms.items()},
                          _clean=True)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.domain, self.nvars, other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.domain.normalize(other)
            if c == 0:
                return Polynomial.zero(self.domain, self.nvars)
            dom = self.domain
            return Polynomial(dom, self.nvars,
                              {m: dom.mul(v, c) for m, v in self.terms.items()},
                              _clean=True)
        self._check_compatible(other)
        dom = self.domain
        res: dict = {}
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                s = dom.add(res.get(m, dom.zero()), dom.mul(c1, c2))
                if s == 0:
                    res.pop(m, None)
                else:
                    res[m] = s
        return Polynomial(dom, self.nvars, res, _clean=True)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise PolyError("negative exponent")
        result = Polynomial.constant(self.domain, self.nvars, 1)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def frobenius_power(self, q: int) -> "Polynomial":
        """q-th power in characteristic p (q a power of p): termwise."""
        p = self.domain.characteristic
        if p == 0 or q % p != 0:
            raise DomainError("frobenius_power requires q a power of the characteristic")
        # c^q = c for c in F_p, so only exponents scale.
        return Polynomial(self.domain, self.nvars,
                          {tuple(e * q for e in m): c for m, c in self.terms.items()},
                          _clean=True)

    # -- structure ---------------------------------------------------------

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def weighted_degree(self, weights) -> int:
        return max((sum(w * e for w, e in zip(weights, m)) for m in self.terms),
                   default=0)

    def is_homogeneous(self, weights=None) -> bool:
        if not self.terms:
            return True
        if weights is None:
            weights = (1,) * self.nvars
        degs = {sum(w * e for w, e in zip(weights, m)) for m in self.terms}
        return len(degs) == 1

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Monomial:
        if not self.terms:
            raise PolyError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder = GREVLEX):
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        inv = self.domain.inv(self.leading_coefficient(order))
        return self * inv

    def coefficient(self, mono: Monomial):
        return self.terms.get(tuple(mono), self.domain.zero())

    def monomials(self) -> Iterator[Monomial]:
        return iter(self.terms)

    # -- substitutions -----------------------------------------------------

    def scale_exponents(self, indices, factor: int) -> "Polynomial":
        """Multiply the exponents of the given variables by ``factor``."""
        idx = set(indices)
        return Polynomial(self.domain, self.nvars,
                          {tuple(e * factor if i in idx else e
                                 for i, e in enumerate(m)): c
                           for m, c in self.terms.items()}, _clean=True)

    def substitute(self, images: dict) -> "Polynomial":
        """Substitute polynomials for variables (index -> Polynomial).

        Unmapped variables stay as themselves; all images must live in a
        common target ring, which also hosts the result.
        """
        target = None
        for img in images.values():
            target = img
            break
        if target is None:
            return self
        dom, nvars = target.domain, target.nvars
        if dom != self.domain:
            raise DomainError("substitution images live in a different domain")
        result = Polynomial.zero(dom, nvars)
        pow_cache: dict = {}
        for m, c in self.terms.items():
            term = Polynomial.constant(dom, nvars, c)
            for i, e in enumerate(m):
                if e == 0:
                    continue
                if i in images:
                    key = (i, e)
                    if key not in pow_cache:
                        pow_cache[key] = images[i] ** e
                    term = term * pow_cache[key]
                else:
                    if i >= nvars:
                        raise PolyError("unmapped variable outside target ring")
                    term = term * Polynomial.variable(dom, nvars, i, e)
            result = result + term
        return result

    def evaluate_partial(self, values: dict) -> "Polynomial":
        """Substitute constants for some variables (index -> coefficient)."""
        dom = self.domain
        res: dict = {}
        for m, c in self.terms.items():
            coeff = c
            new_m = list(m)
            for i, v in values.items():
                e = m[i]
                if e:
                    coeff = dom.mul(coeff, dom.normalize(v) ** e if dom.is_rational
                                    else pow(dom.normalize(v), e, dom.p))
                new_m[i] = 0
            if coeff == 0:
                continue
            key = tuple(new_m)
            s = dom.add(res.get(key, dom.zero()), coeff)
            if s == 0:
                res.pop(key, None)
            else:
                res[key] = s
        return Polynomial(dom, self.nvars, res, _clean=True)

    def drop_variables(self, indices) -> "Polynomial":
        """Remove variables (which must not occur) from the ring."""
        idx = sorted(set(indices), reverse=True)
        terms = {}
        for m, c in self.terms.items():
            m = list(m)
            for i in idx:
                if m[i] != 0:
                    raise PolyError("cannot drop a variable that occurs")
                del m[i]
            terms[tuple(m)] = c
        return Polynomial(self.domain, self.nvars - len(idx), terms, _clean=True)

    # -- comparisons / hashing ---------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if self.is_constant():
                try:
                    return self.constant_term() == self.domain.normalize(other)
                except (DomainError, TypeError, ValueError):
                    return NotImplemented
            return NotImplemented
        return (self.domain == other.domain and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.domain, self.nvars, frozenset(self.terms.items())))

    def sort_key(self):
        """Deterministic total sort key (grevlex on the term list)."""
        items = sorted(self.terms.items(), key=lambda t: _grevlex_key(t[0]))
        return tuple((m, str(c)) for m, c in items)

    # -- printing ----------------------------------------------------------

    def to_string(self, var_names=None) -> str:
        if not self.terms:
            return "0"
        if var_names is None:
            var_names = default_variable_names(self.nvars)
        parts = []
        for mono in sorted(self.terms, key=_grevlex_key, reverse=True):
            coeff = self.terms[mono]
            factors = [f"{var_names[i]}^{e}" if e > 1 else var_names[i]
                       for i, e in enumerate(mono) if e > 0]
            negative = self.domain.is_rational and coeff < 0
            mag = -coeff if negative else coeff
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{mag}*{body}"
            else:
                body = str(mag)
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(parts)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Polynomial({self.domain}, {self.to_string()})"


def default_variable_names(nvars: int):
    if nvars <= 3:
        return ("x", "y", "z")[:nvars]
    return tuple(f"x{i}" for i in range(nvars))


# ---------------------------------------------------------------------------
# Parser for the expression grammar:
#   expr     := sign? term (('+'|'-') term)*
#   term     := factor ('*' factor)*
#   factor   := base ('^' nat)?
#   base     := name | rational | '(' expr ')'
#   rational := int ('/' nat)?
# Whitespace is insignificant; implicit multiplication is a syntax error.


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        t = self.text
        i = self.pos
        while i < len(t) and t[i].isspace():
            i += 1
        self.pos = i
        if i >= len(t):
            return ("end", "", i)
        ch = t[i]
        if ch.isdigit():
            j = i
            while j < len(t) and t[j].isdigit():
                j += 1
            return ("int", t[i:j], i)
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(t) and (t[j].isalnum() or t[j] == "_"):
                j += 1
            return ("name", t[i:j], i)
        if ch in "+-*/^()":
            return (ch, ch, i)
        raise ParseError(f"unexpected character {ch!r}", i)

    def next(self):
        kind, value, pos = self.peek()
        self.pos = pos + len(value)
        return kind, value, pos


def parse_polynomial(text: str, variables, domain: CoefficientDomain) -> Polynomial:
    """Parse ``text`` into a canonical Polynomial in the given variables."""
    names = list(variables)
    index = {n: i for i, n in enumerate(names)}
    nvars = len(names)
    tok = _Tokenizer(text)

    def parse_expr() -> Polynomial:
        kind, _, _ = tok.peek()
        sign = 1
        if kind in ("+", "-"):
            tok.next()
            sign = -1 if kind == "-" else 1
        result = parse_term()
        if sign < 0:
            result = -result
        while True:
            kind, _, _ = tok.peek()
            if kind == "+":
                tok.next()
                result = result + parse_term()
            elif kind == "-":
                tok.next()
                result = result - parse_term()
            else:
                return result

    def parse_term() -> Polynomial:
        result = parse_factor()
        while True:
            kind, _, _ = tok.peek()
            if kind == "*":
                tok.next()
                result = result * parse_factor()
            else:
                return result

    def parse_factor() -> Polynomial:
        base = parse_base()
        kind, _, _ = tok.peek()
        if kind == "^":
            tok.next()
            k, v, pos = tok.next()
            if k != "int":
                raise ParseError("expected a natural number after '^'", pos)
            return base ** int(v)
        return base

    def parse_base() -> Polynomial:
        kind, value, pos = tok.next()
        if kind == "name":
            if value not in index:
                raise ParseError(f"unknown identifier {value!r}", pos)
            return Polynomial.variable(domain, nvars, index[value])
        if kind == "int":
            num = int(value)
            k, _, _ = tok.peek()
            if k == "/":
                tok.next()
                k2, v2, pos2 = tok.next()
                if k2 != "int":
                    raise ParseError("expected a natural number after '/'", pos2)
                den = int(v2)
                if den == 0:
                    raise ParseError("division by zero", pos2)
                try:
                    return Polynomial.constant(domain, nvars, Fraction(num, den))
                except DomainError as exc:
                    raise ParseError(str(exc), pos2) from exc
            return Polynomial.constant(domain, nvars, num)
        if kind == "(":
            inner = parse_expr()
            k, _, pos2 = tok.next()
            if k != ")":
                raise ParseError("expected ')'", pos2)
            return inner
        raise ParseError(f"unexpected token {value!r}", pos)

    result = parse_expr()
    kind, value, pos = tok.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing token {value!r}", pos)
    return result


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Exact ring operation; op is one of add, sub, mul."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_power(f: Polynomial, n: int) -> Polynomial:
    """n-th power by binary exponentiation (n >= 0)."""
    return f ** n
