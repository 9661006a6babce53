"""Independent witness re-verification from certificate data alone.

Deliberately imports only the polynomial layer and the Groebner kernel, so a
certificate can be re-checked in a separate process without trusting any of
the criteria code.  Checks performed:

  1. the witness element factors exactly as recorded (product of the listed
     factors times the colon element);
  2. the factor exponents meet the splitting requirements: each divisor
     component g appears with exponent >= ceil(c (q-1)) and the a-generator
     factors have total weight >= ceil(lambda (q-1));
  3. the colon element h satisfies h * I subseteq I^[q];
  4. the witness element escapes m^[q] (a monomial with all exponents < q).

Together these re-prove the splitting at exponent e by the colon criterion.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

from .groebner import Ideal
from .polycore import Polynomial, parse_polynomial, prime_field


def _ceil_frac(x) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def verify_witness_data(data: dict) -> bool:
    p = int(data["p"])
    e = int(data["e"])
    q = int(data["q"])
    if q != p ** e:
        return False
    dom = prime_field(p)
    names = list(data["variables"])
    nvars = len(names)

    def parse(s: str) -> Polynomial:
        return parse_polynomial(s, names, dom)

    relations = [parse(s) for s in data.get("relations", [])]
    colon_element = parse(data["colon_element"])
    witness = parse(data["witness_element"])
    factors = [(parse(f["poly"]), int(f["exponent"]), f["source"])
               for f in data.get("witness_factors", [])]

    # 1. factorization check
    product = colon_element
    for poly, exponent, _source in factors:
        product = product * poly ** exponent
    if product != witness:
        return False

    # 2. exponent requirements
    lam = Fraction(data.get("lambda", "1"))
    delta = [(parse(item["g"]), Fraction(item["c"]))
             for item in data.get("delta", [])]
    recorded = {}
    for poly, exponent, source in factors:
        recorded[(source, poly)] = recorded.get((source, poly), 0) + exponent
    for g, c in delta:
        needed = _ceil_frac(c * (q - 1))
        if needed and recorded.get(("divisor", g), 0) < needed:
            return False
    a_gens = [parse(s) for s in data.get("a", [])]
    a_trivial = not a_gens or any(g.is_constant() and not g.is_zero()
                                  for g in a_gens)
    if not a_trivial:
        needed = _ceil_frac(lam * (q - 1))
        weight = sum(exp for (source, _), exp in recorded.items()
                     if source == "ideal_a")
        # factors must actually be generators of a
        for poly, exponent, source in factors:
            if source == "ideal_a" and poly not in a_gens:
                return False
        if weight < needed:
            return False

    # 3. colon membership: h * I subseteq I^[q]
    if relations:
        bracket = Ideal(dom, nvars, [g.frobenius_power(q) for g in relations])
        for g in relations:
            if not bracket.contains(colon_element * g):
                return False

    # 4. escape from m^[q]
    if not any(all(exp < q for exp in mono) for mono in witness.terms):
        return False
    return True


def verify_certificate_file(path: str) -> bool:
    with open(path, "r", encoding="utf-8") as fh:
        cert = json.load(fh)
    if "certificate" in cert and "status" not in cert:
        cert = cert["certificate"]
    if cert.get("status") != "certified":
        print("certificate is not a positive certificate; nothing to verify")
        return True
    data = cert.get("verification")
    if data is None:
        print("certificate carries no verification block")
        return False
    try:
        return verify_witness_data(data)
    except Exception as exc:  # malformed data must fail closed, not crash
        print(f"verification data unusable: {type(exc).__name__}: {exc}")
        return False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if len(argv) != 1:
        print("usage: python -m fsing.verify CERTIFICATE.json", file=sys.stderr)
        return 2
    ok = verify_certificate_file(argv[0])
    print("witness verification:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
