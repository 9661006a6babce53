"""Test ideals via truncated Frobenius sums, absolute and relative.

The absolute test ideal of (Spec R, gamma, a^lambda) with respect to I is
the ascending sum over i of the images of (a^{ceil(q^i lambda)} I) under the
i-th iterate of the p^{-e}-linear map gamma.  With gamma represented by a
multiplier u, the i-th summand is the Frobenius root of
u^{(i)} * a^{ceil(q^i lambda)} * I at q^i, where u^{(i)} = u^{1+q+...+q^{i-1}}.

The relative theory works over a polynomial base A = F_p[t_1..t_m]: roots
are taken in the fiber variables only (coefficients in A^{1/q^i} untouched),
and level-i summands are pushed into B_n = R tensor_A A^{1/q^n} by scaling
base exponents by q^{n-i}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .groebner import Budget, Ideal, buchberger, ideal_power, ideal_product
from .polycore import DomainError, Polynomial
from .frobenius import FrobeniusPower, embed_ideal_to_level, frobenius_root
from .triples import DivisorData, PresentationError, RingPresentation


class TestIdealError(Exception):
    pass


def _ceil_frac(x) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class PLinearMap:
    """A p^{-e}-linear map gamma: R^{1/q} -> R given by a multiplier u.

    gamma sends z^{1/q} to trace(u z)^{1/q}; images of ideals are Frobenius
    roots of u-multiples.  The ambient ring must be a polynomial ring.
    """

    power: FrobeniusPower
    multiplier: Polynomial

    def __post_init__(self):
        if self.multiplier.is_zero():
            raise TestIdealError("multiplier must be nonzero")
        if self.multiplier.domain.characteristic != self.power.p:
            raise DomainError("multiplier characteristic mismatch")

    def iterated_multiplier(self, i: int) -> Polynomial:
        """u^{(i)} = u^{1+q+...+q^{i-1}}, computed by u^{(i)} = u^{(i-1)}^q * u."""
        u = self.multiplier
        acc = Polynomial.constant(u.domain, u.nvars, 1)
        for _ in range(i):
            acc = acc.frobenius_power(self.power.q) * u
        return acc


@dataclass(frozen=True)
class TauResult:
    ideal: Ideal
    truncation_level: int
    stabilized: bool
    stabilization_level: int | None = None
    guarantee: str = "empirical"  # "proposition" | "empirical" | "none"

    def generators(self):
        return self.ideal.gens


def _interreduce(gens, budget=None) -> Ideal:
    if not gens:
        raise TestIdealError("empty generator list")
    dom, nvars = gens[0].domain, gens[0].nvars
    return Ideal(dom, nvars, buchberger(gens, budget=budget))


def _power_with_cache(a: Ideal, n: int, cache: dict) -> Ideal:
    if n not in cache:
        if "base" not in cache:
            # power the reduced basis: same ideal, smaller generators
            gb = a.groebner_basis()
            cache["base"] = Ideal(a.domain, a.nvars, gb) if gb else a
        cache[n] = ideal_power(cache["base"], n)
    return cache[n]


def _tau_summand(gamma: PLinearMap, I: Ideal, a: Ideal, lam: Fraction, i: int,
                 apow_cache: dict, fiber_indices=None) -> Ideal:
    """frobenius_root(u^{(i)} a^{ceil(q^i lam)} I, q^i), relative if asked."""
    q = gamma.power.q
    n_a = _ceil_frac(Fraction(lam) * q ** i)
    J = ideal_product(_power_with_cache(a, n_a, apow_cache), I)
    ui = gamma.iterated_multiplier(i)
    J = Ideal(J.domain, J.nvars, [ui * g for g in J.gens])
    if i == 0:
        return J
    level_power = FrobeniusPower(gamma.power.p, gamma.power.e * i)
    return frobenius_root(J, level_power, fiber_indices)


def tau_absolute(gamma: PLinearMap, I: Ideal, a: Ideal, lam,
                 n_max: int, budget: Budget | None = None) -> TauResult:
    """Truncated absolute test ideal sum, with ascending-chain stabilization.

    Stabilization is declared once two consecutive partial sums agree and
    the next summand is contained; per the ascending-chain convention the
    reported level is the first n with equal consecutive partial sums.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise TestIdealError("lambda must be positive")
    if I.is_zero() or a.is_zero():
        raise TestIdealError("I and a must be nonzero")
    apow: dict = {}
    partial = _interreduce(list(_tau_summand(gamma, I, a, lam, 0, apow).gens),
                           budget)
    history = [partial]
    stabilization_level = None
    for i in range(1, n_max + 1):
        summand = _tau_summand(gamma, I, a, lam, i, apow)
        if all(partial.contains(g, budget) for g in summand.gens):
            nxt = partial
        else:
            nxt = _interreduce(list(partial.gens) + list(summand.gens), budget)
        history.append(nxt)
        if stabilization_level is None and nxt.equals(partial, budget):
            stabilization_level = i
        partial = nxt
    stabilized = False
    if stabilization_level is not None and stabilization_level <= n_max:
        # re-verify: adding the next summand does not change the ideal
        extra = _tau_summand(gamma, I, a, lam, n_max + 1, apow)
        stabilized = all(partial.contains(g, budget) for g in extra.gens)
        if not stabilized:
            stabilization_level = None
    return TauResult(partial, n_max, stabilized, stabilization_level)


def pair_multiplier(R: RingPresentation, delta: DivisorData,
                    e_cap: int = 24) -> tuple:
    """(q, u, I) realizing the pair (R, Delta) as a multiplier map.

    Picks the least e with (p^e - 1) * c_i integral for all components,
    sets u = prod g_i^{c_i (q-1)} and I = (prod g_i^{ceil c_i}), a test
    element ideal inside tau(R, Delta).
    """
    p = R.domain.characteristic
    if p == 0:
        raise DomainError("pairs need positive characteristic")
    if not R.is_regular_ambient:
        raise PresentationError("pair test ideals need a regular ambient ring")
    den = delta.index_denominator()
    if den % p == 0:
        raise TestIdealError(
            f"divisor index {den} is divisible by p = {p}; no valid q exists")
    e = 1
    while (p ** e - 1) % den != 0:
        e += 1
        if e > e_cap:
            raise TestIdealError(f"no q = p^e with e <= {e_cap} makes (q-1)Delta integral")
    q = p ** e
    u = R.constant(1)
    test = R.constant(1)
    for g, c in delta.components:
        u = u * g ** int(c * (q - 1))
        test = test * g ** _ceil_frac(c)
    return FrobeniusPower(p, e), u, Ideal(R.domain, R.nvars, [test])


def tau_pair_divisor(R: RingPresentation, delta: DivisorData, a: Ideal,
                     lam, n_max: int, budget: Budget | None = None) -> TauResult:
    """tau(X, Delta, a^lambda) through the divisor-to-multiplier construction."""
    power, u, I = pair_multiplier(R, delta)
    gamma = PLinearMap(power, u)
    return tau_absolute(gamma, I, a, lam, n_max, budget)


# ---------------------------------------------------------------------------
# Relative limiting test ideals over a polynomial base.


@dataclass(frozen=True)
class RelativeSetup:
    """Data of (X/V, phi, I, a^lambda) with X = Spec A[x], A = F_p[t..]."""

    ring: RingPresentation          # regular ambient with designated base vars
    phi: PLinearMap                 # relative map via multiplier
    I: Ideal
    a: Ideal
    lam: Fraction
    pair_divisor: DivisorData | None = None  # optional pair provenance

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        if not self.ring.is_regular_ambient:
            raise PresentationError("relative setups need a regular ambient ring")
        # an empty base block means V = Spec F_p: the absolute case
        if self.I.is_zero() or self.a.is_zero():
            raise TestIdealError("I and a must be nonzero")
        # side condition: lambda (q-1) q^l integral for some l
        den = self.lam.denominator
        q = self.phi.power.q
        p = self.phi.power.p
        rem = den
        for _ in range(64):
            g = gcd(rem, p)
            if g == 1:
                break
            rem //= g
        if (q - 1) % rem != 0:
            raise TestIdealError(
                "lambda denominator does not divide (q-1) p^l; side condition fails")

    @property
    def fiber_indices(self):
        return self.ring.fiber_vars

    def mu_a(self) -> int:
        """Minimal homogeneous generator count when graded, else len(gens)."""
        gens = list(self.a.gens)
        if all(g.is_homogeneous() for g in gens):
            kept = []
            for i, g in enumerate(gens):
                others = kept + gens[i + 1:]
                if others and Ideal(self.a.domain, self.a.nvars, others).contains(g):
                    continue
                kept.append(g)
            return max(len(kept), 1)
        return max(len(gens), 1)

    def skoda_guaranteed(self) -> bool:
        q = self.phi.power.q
        return (self.lam > self.mu_a() - 1
                and (Fraction(self.lam) * (q - 1)).denominator == 1)


def tau_relative(setup: RelativeSetup, n: int,
                 budget: Budget | None = None) -> TauResult:
    """The n-th limiting relative test ideal, as an ideal of B_n.

    Returned generators live in level-n coordinates: a base exponent b on
    t_j stands for t_j^{b/q^n}.
    """
    if n < 0:
        raise TestIdealError("level must be >= 0")
    base = setup.ring.base_vars
    fiber = setup.fiber_indices
    power = setup.phi.power
    apow: dict = {}
    gens = []
    for i in range(n + 1):
        summand = _tau_summand(setup.phi, setup.I, setup.a, setup.lam, i,
                               apow, fiber_indices=fiber)
        lifted = embed_ideal_to_level(summand, base, power, n - i)
        gens.extend(lifted.gens)
    ideal = _interreduce(gens, budget)
    return TauResult(ideal, n, False, None,
                     "proposition" if setup.skoda_guaranteed() else "none")


def _lift_result(result: Ideal, base, power: FrobeniusPower, levels: int) -> Ideal:
    return embed_ideal_to_level(result, base, power, levels)


def stabilization_scan(setup: RelativeSetup, n_max: int,
                       budget: Budget | None = None) -> TauResult:
    """First n with tau_{n-1} B_n = tau_n, re-verified at the next level."""
    base = setup.ring.base_vars
    power = setup.phi.power
    guarantee = "proposition" if setup.skoda_guaranteed() else "no guarantee"
    prev = tau_relative(setup, 0, budget)
    found = None
    current = prev
    for n in range(1, n_max + 1):
        current = tau_relative(setup, n, budget)
        lifted_prev = _lift_result(prev.ideal, base, power, 1)
        if current.ideal.equals(lifted_prev, budget):
            found = n
            break
        prev = current
    if found is None:
        return TauResult(current.ideal, n_max, False, None, guarantee)
    return TauResult(current.ideal, found, True, found, guarantee)


def base_change_check(setup: RelativeSetup, substitution, new_ring: RingPresentation,
                      n: int, budget: Budget | None = None) -> bool:
    """Check tau_n(X'/V') = tau_n(X/V) B'_n for a base change t_j -> A'.

    ``substitution`` maps each base variable index of the original ring to a
    polynomial of ``new_ring`` in the new base variables; fiber variables
    must map to themselves (same names, any position).
    """
    fiber_names = [setup.ring.var_names[i] for i in setup.fiber_indices]
    name_to_new = {nm: i for i, nm in enumerate(new_ring.var_names)}
    images = {}
    for i in setup.ring.base_vars:
        images[i] = substitution[i]
    for i, nm in zip(setup.fiber_indices, fiber_names):
        images[i] = Polynomial.variable(new_ring.domain, new_ring.nvars,
                                        name_to_new[nm])

    def push(f: Polynomial) -> Polynomial:
        return f.substitute(images)

    new_setup = RelativeSetup(
        new_ring,
        PLinearMap(setup.phi.power, push(setup.phi.multiplier)),
        Ideal(new_ring.domain, new_ring.nvars, [push(g) for g in setup.I.gens]),
        Ideal(new_ring.domain, new_ring.nvars, [push(g) for g in setup.a.gens]),
        setup.lam)
    lhs = tau_relative(new_setup, n, budget).ideal
    # rhs: tau_n(X/V) pushed into B'_n; base substitution commutes with the
    # level-n coordinates because F_p is perfect.
    rhs_gens = [push(g) for g in tau_relative(setup, n, budget).ideal.gens]
    rhs = Ideal(new_ring.domain, new_ring.nvars, rhs_gens)
    return lhs.equals(rhs, budget)


@dataclass(frozen=True)
class FiberCompareResult:
    status: str  # "equal" | "not_equal" | "bad_fiber"
    relative_ideal: Ideal | None = None
    fiber_ideal: Ideal | None = None

    def __bool__(self):
        return self.status == "equal"


def fiber_compare(setup: RelativeSetup, n: int, point,
                  n_max_fiber: int | None = None,
                  budget: Budget | None = None) -> FiberCompareResult:
    """Specialize tau_n at a perfect point of V and compare with the
    absolute test ideal of the fiber.

    ``point`` maps base variable index -> F_p value.  Over F_p the q-th
    root of a scalar is itself, so level-n base coordinates specialize to
    the same value.
    """
    base = list(setup.ring.base_vars)
    fiber = list(setup.fiber_indices)
    if set(point) != set(base):
        raise TestIdealError("point must assign exactly the base variables")

    def specialize(f: Polynomial) -> Polynomial:
        return f.evaluate_partial(point).drop_variables(base)

    u_f = specialize(setup.phi.multiplier)
    I_f = [specialize(g) for g in setup.I.gens]
    a_f = [specialize(g) for g in setup.a.gens]
    degenerate = u_f.is_zero() or all(g.is_zero() for g in I_f) \
        or all(g.is_zero() for g in a_f)
    if setup.pair_divisor is not None:
        for g, _ in setup.pair_divisor.components:
            if specialize(g).is_zero():
                degenerate = True
    if degenerate:
        return FiberCompareResult("bad_fiber")

    dom = setup.ring.domain
    nf = len(fiber)
    fiber_I = Ideal(dom, nf, [g for g in I_f if not g.is_zero()])
    fiber_a = Ideal(dom, nf, [g for g in a_f if not g.is_zero()])
    gamma = PLinearMap(setup.phi.power, u_f)
    if n_max_fiber is None:
        n_max_fiber = max(n, 3)
    absolute = tau_absolute(gamma, fiber_I, fiber_a, setup.lam, n_max_fiber,
                            budget)

    rel = tau_relative(setup, n, budget)
    specialized = [specialize(g) for g in rel.ideal.gens]
    rel_fiber = Ideal(dom, nf, [g for g in specialized if not g.is_zero()])
    equal = rel_fiber.equals(absolute.ideal, budget)
    return FiberCompareResult("equal" if equal else "not_equal",
                              rel_fiber, absolute.ideal)


# ---------------------------------------------------------------------------
# Relative pair fixtures and the sum-decomposition check.


def relative_pair_setup(R: RingPresentation, delta: DivisorData, a: Ideal,
                        lam, n_tau: int = 4,
                        budget: Budget | None = None) -> RelativeSetup:
    """Build the relative setup attached to a pair (X, Delta) over V.

    The multiplier is u = prod g_i^{c_i(q-1)}; I is the absolute test ideal
    tau(X, Delta) of the total space (computable since the ambient is a
    polynomial ring over F_p), the canonical test-element ideal.
    """
    power, u, seed = pair_multiplier(R, delta)
    gamma = PLinearMap(power, u)
    unit_a = Ideal(R.domain, R.nvars, [R.constant(1)])
    total = tau_absolute(gamma, seed, unit_a, Fraction(1), n_tau, budget)
    return RelativeSetup(R, gamma, total.ideal, a, Fraction(lam), delta)


@dataclass(frozen=True)
class SumDecompositionReport:
    sampled_in_tau: bool            # every sampled summand inside tau (exact)
    tau_in_sampled: bool            # tau inside the sum of sampled summands
    samples: int
    note: str = ""


def _tau_multi(R: RingPresentation, delta: DivisorData, pairs, n_max: int,
               budget: Budget | None = None) -> Ideal:
    """tau(X, Delta, prod a_j^{lam_j}) via the multiplier construction."""
    power, u, I = pair_multiplier(R, delta)
    gamma = PLinearMap(power, u)
    q = gamma.power.q
    apows: list = [dict() for _ in pairs]
    gens = []
    partial = None
    for i in range(n_max + 1):
        J = I
        for (aj, lj), cache in zip(pairs, apows):
            J = ideal_product(J, _power_with_cache(aj, _ceil_frac(Fraction(lj) * q ** i), cache))
        ui = gamma.iterated_multiplier(i)
        J = Ideal(J.domain, J.nvars, [ui * g for g in J.gens])
        if i:
            J = frobenius_root(J, FrobeniusPower(power.p, power.e * i))
        gens.extend(J.gens)
        partial = _interreduce(gens, budget)
        gens = list(partial.gens)
    return partial


def sum_decomposition_check(R: RingPresentation, delta: DivisorData,
                            a_list, lambda_list, sample_budget: int,
                            n_max: int = 4,
                            budget: Budget | None = None) -> SumDecompositionReport:
    """Sampled two-sided check of the sum-over-divisors decomposition.

    For sampled m_i and f_i in a_i^{ceil(m_i lam_i)}, each pair test ideal
    tau(X, Delta + sum div(f_i)/m_i) must sit inside tau(X, Delta,
    prod a_i^{lam_i}) (exact); the reverse containment is attempted against
    the sum of sampled summands and may fail for a small budget, which is
    reported distinctly.
    """
    p = R.domain.characteristic
    pairs = list(zip(a_list, [Fraction(x) for x in lambda_list]))
    tau_triple = _tau_multi(R, delta, pairs, n_max, budget)

    sampled_gens = []
    samples = 0
    sampled_ok = True
    ms = [m for m in range(1, sample_budget + 1) if m % p != 0]
    for m in ms:
        if samples >= sample_budget:
            break
        # f_i: products of generators of a_i of total weight ceil(m lam_i)
        fs = []
        for aj, lj in pairs:
            k = _ceil_frac(Fraction(lj) * m)
            f = R.constant(1)
            for t, g in enumerate(aj.gens):
                share = k // len(aj.gens) + (1 if t < k % len(aj.gens) else 0)
                f = f * g ** share
            fs.append(f)
        extra = [(f, Fraction(1, m)) for f in fs if not f.is_constant()]
        try:
            summand = tau_pair_divisor(
                R, DivisorData(tuple(delta.components) + tuple(extra)),
                Ideal(R.domain, R.nvars, [R.constant(1)]), Fraction(1),
                n_max, budget)
        except TestIdealError:
            continue  # p divides the sampled index; skip this m
        samples += 1
        sampled_gens.extend(summand.ideal.gens)
        if not all(tau_triple.contains(g, budget) for g in summand.ideal.gens):
            sampled_ok = False
    if not sampled_gens:
        return SumDecompositionReport(True, False, 0, "no admissible samples")
    sampled_sum = _interreduce(sampled_gens, budget)
    reverse = all(sampled_sum.contains(g, budget) for g in tau_triple.gens)
    note = "" if reverse else "budget too small for the reverse containment"
    return SumDecompositionReport(sampled_ok, reverse, samples, note)


def skoda_check(setup: RelativeSetup, n: int, budget: Budget | None = None) -> bool:
    """tau_n(phi I, a^lambda) * a == tau_n(phi I, a^{lambda+1}), exactly."""
    lhs_tau = tau_relative(setup, n, budget)
    lhs = ideal_product(lhs_tau.ideal,
                        embed_ideal_to_level(setup.a, setup.ring.base_vars,
                                             setup.phi.power, n))
    bumped = RelativeSetup(setup.ring, setup.phi, setup.I, setup.a,
                           setup.lam + 1, setup.pair_divisor)
    rhs = tau_relative(bumped, n, budget)
    return lhs.equals(rhs.ideal, budget)
