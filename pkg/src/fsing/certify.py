"""Certification engine: applies single-prime reduction arguments to checker
outputs and emits machine-readable certificates.

Conclusions are only ever positive ("log_canonical", "klt", ...) or
"inconclusive": splitting failures at finitely many exponents or primes
prove nothing.  Every positive certificate embeds a witness that is
re-verified at emission time and can be re-checked independently from the
certificate alone (see fsing.verify).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .arithmodels import (
    ArithmeticModel,
    PerfectionLevel,
    ReductionError,
    geometric_sfr_check,
    perfection_model,
    reduce_mod_p,
    spread_out,
    suggest_primes,
)
from .fcriteria import (
    FPurityWitness,
    nu_value,
    sharply_fpure,
    strongly_fregular,
)
from .groebner import Budget, BudgetExceededError, Ideal
from .polycore import RATIONALS, Polynomial, prime_field, parse_polynomial
from .testideals import tau_pair_divisor
from .triples import (
    DivisorData,
    RingPresentation,
    TripleSpec,
    polynomial_ring,
    quotient_ring,
)

CERT_VERSION = "cert_v1"

THEOREM_TAGS = {
    "lc": "lc-from-sharp-f-purity-at-one-prime",
    "klt": "klt-from-strong-f-regularity-at-one-prime",
    "sfr": "strong-f-regularity-glassbrenner-witness",
    "gsfr": "geometric-sfr-from-perfected-base",
    "deform": "sfr-deformation-consistency",
}


class CertifyError(Exception):
    pass


@dataclass
class JobSpec:
    """One certification job: an input triple plus policy knobs."""

    spec: TripleSpec
    mode: str                       # lc | klt | sfr | gsfr | deform | fpt | tau
    prime: int | None = None
    e_max: int = 2
    gb_budget: int = 10**7
    test_element: Polynomial | None = None
    assert_q_gorenstein: bool = False
    level: int = 0                  # gsfr perfection level
    h: Polynomial | None = None     # deform slice element
    n_max: int = 4                  # tau truncation
    name: str = "job"

    def budget(self) -> Budget:
        return Budget(self.gb_budget)


@dataclass
class Certificate:
    conclusion: str          # log_canonical | klt | strongly_F_regular |
                             # geometrically_strongly_F_regular |
                             # deformation_consistent | inconclusive
    theorem_tag: str
    prime: int | None
    exponent_witness: int | None
    witness_element: str | None
    assumptions: list
    status: str              # certified | inconclusive
    tool_version: str = __version__
    cert_version: str = CERT_VERSION
    timestamp: str = ""
    verification: dict | None = None   # self-contained re-check data
    primes_tried: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> dict:
        out = {
            "cert_version": self.cert_version,
            "conclusion": self.conclusion,
            "theorem_tag": self.theorem_tag,
            "prime": self.prime,
            "exponent_witness": self.exponent_witness,
            "witness_element": self.witness_element,
            "assumptions": sorted(self.assumptions),
            "status": self.status,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "primes_tried": self.primes_tried,
            "details": self.details,
        }
        if self.verification is not None:
            out["verification"] = self.verification
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _witness_verification(ring: RingPresentation, spec: TripleSpec,
                          witness: FPurityWitness,
                          escape_indices=None) -> dict:
    """Self-contained data for independent re-verification.

    The verifier re-checks, with only polynomial arithmetic and Groebner
    membership: the witness factorization, membership of the colon factor in
    (I^[q] : I) via h * I subseteq I^[q], the required factor exponents, and
    the escape of the product from m^[q].  ``escape_indices`` restricts the
    escape test to the listed variables (function-field semantics, where the
    base variables are units of the coefficient field).
    """
    names = list(ring.var_names)
    out = {
        "p": ring.domain.p,
        "e": witness.e,
        "q": witness.q,
        "variables": names,
        "relations": [g.to_string(names) for g in ring.relations.gens],
        "lambda": _frac_str(spec.lam),
        "delta": [{"g": g.to_string(names), "c": _frac_str(c)}
                  for g, c in spec.delta.components],
        "a": [g.to_string(names) for g in spec.a.gens],
        "witness_factors": [
            {"poly": f.poly.to_string(names), "exponent": f.exponent,
             "source": f.source}
            for f in witness.factors],
        "colon_element": witness.colon_element.to_string(names),
        "witness_element": witness.product.to_string(names),
        "escaping_monomial": list(witness.monomial),
    }
    if escape_indices is not None:
        out["escape_indices"] = sorted(escape_indices)
    return out


def _reverify(verification: dict) -> bool:
    """Emission-time soundness gate; the same check fsing.verify re-runs."""
    from .verify import verify_witness_data

    return verify_witness_data(verification)


def _emit(conclusion: str, tag: str, prime, witness: FPurityWitness | None,
          spec_p: TripleSpec | None, spec: TripleSpec, assumptions,
          primes_tried, details=None, escape_indices=None) -> Certificate:
    ver = None
    exponent = None
    element = None
    if witness is not None:
        assert spec_p is not None
        ver = _witness_verification(spec_p.ring, spec_p, witness,
                                    escape_indices)
        if not _reverify(ver):
            raise CertifyError("soundness gate: witness failed re-verification")
        exponent = witness.e
        element = witness.product.to_string(spec_p.ring.var_names)
    status = "inconclusive" if conclusion == "inconclusive" else "certified"
    return Certificate(conclusion, tag, prime, exponent, element,
                       list(assumptions), status, verification=ver,
                       primes_tried=list(primes_tried),
                       details=dict(details or {}))


def _base_assumptions(job: JobSpec, machine_checked_qgor: bool) -> list:
    out = ["model flat and fibers normal at the chosen prime (user-asserted)"]
    if machine_checked_qgor:
        out.append("log Q-Gorenstein: machine-checked (hypersurface ambient, "
                   "principal divisor components)")
    elif job.assert_q_gorenstein:
        out.append("log Q-Gorenstein at the point (user-asserted)")
    else:
        out.append("log Q-Gorenstein NOT asserted: conclusion transfer "
                   "requires it")
    return out


def _qgor_machine_checked(spec: TripleSpec) -> bool:
    """Gorenstein ambient heuristic: hypersurface (or regular) presentation
    with every divisor component principal (which our DivisorData ensures)."""
    return len(spec.ring.relations.gens) <= 1


def _prime_plan(job: JobSpec, model: ArithmeticModel):
    if job.prime is not None:
        return [job.prime]
    return suggest_primes(model)


def _index_ok(spec: TripleSpec, p: int) -> bool:
    return spec.index_denominator() % p != 0


def certify_log_canonical(job: JobSpec) -> Certificate:
    """Spread out, reduce at one good prime, test sharp F-purity, certify."""
    if job.spec.ring.domain.characteristic != 0:
        raise CertifyError("lc mode expects a Q-defined input")
    model = spread_out(job.spec)
    budget = job.budget()
    tried = []
    machine_qgor = _qgor_machine_checked(job.spec)
    assumptions = _base_assumptions(job, machine_qgor)
    for p in _prime_plan(job, model):
        if not _index_ok(job.spec, p):
            tried.append({"prime": p, "status": "rejected_index_divisible"})
            continue
        try:
            spec_p = reduce_mod_p(model, p)
        except ReductionError as exc:
            tried.append({"prime": p, "status": f"degenerate: {exc}"})
            continue
        for e in range(1, job.e_max + 1):
            try:
                result = sharply_fpure(spec_p, e, budget)
            except BudgetExceededError:
                tried.append({"prime": p, "status": "budget_exceeded"})
                break
            if result.holds:
                tried.append({"prime": p, "status": f"sharply F-pure at e={e}"})
                return _emit("log_canonical", THEOREM_TAGS["lc"], p,
                             result.witness, spec_p, job.spec, assumptions,
                             tried)
        else:
            tried.append({"prime": p,
                          "status": f"no splitting found for e <= {job.e_max}"})
    return _emit("inconclusive", THEOREM_TAGS["lc"], None, None, None,
                 job.spec, assumptions, tried)


def certify_klt(job: JobSpec) -> Certificate:
    """Strong F-regularity at one good prime certifies klt for Q input
    (or strong F-regularity itself for an F_p-native input)."""
    budget = job.budget()
    if job.test_element is None:
        raise CertifyError("klt/sfr modes need a test element "
                           "(suggest_test_elements can propose candidates)")
    machine_qgor = _qgor_machine_checked(job.spec)
    assumptions = _base_assumptions(job, machine_qgor)
    assumptions.append("test element vanishes on the non-regular locus "
                       "(user-asserted)")

    if job.spec.ring.domain.characteristic != 0:
        # F_p-native: certify strong F-regularity directly
        p = job.spec.ring.domain.p
        result = strongly_fregular(job.spec, job.test_element, job.e_max, budget)
        tried = [{"prime": p, "status": result.status}]
        if result.certified:
            return _emit("strongly_F_regular", THEOREM_TAGS["sfr"], p,
                         result.witness, job.spec, job.spec, assumptions, tried)
        return _emit("inconclusive", THEOREM_TAGS["sfr"], p, None, None,
                     job.spec, assumptions, tried)

    model = spread_out(job.spec)
    tried = []
    for p in _prime_plan(job, model):
        if not _index_ok(job.spec, p):
            tried.append({"prime": p, "status": "rejected_index_divisible"})
            continue
        try:
            spec_p = reduce_mod_p(model, p)
            c_p, cprimes = _reduce_test_element(job.test_element, p)
        except ReductionError as exc:
            tried.append({"prime": p, "status": f"degenerate: {exc}"})
            continue
        if cprimes and p in cprimes:
            tried.append({"prime": p, "status": "test element denominator"})
            continue
        try:
            result = strongly_fregular(spec_p, c_p, job.e_max, budget)
        except BudgetExceededError:
            tried.append({"prime": p, "status": "budget_exceeded"})
            continue
        tried.append({"prime": p, "status": result.status})
        if result.certified:
            return _emit("klt", THEOREM_TAGS["klt"], p, result.witness,
                         spec_p, job.spec, assumptions, tried)
    return _emit("inconclusive", THEOREM_TAGS["klt"], None, None, None,
                 job.spec, assumptions, tried)


def _reduce_test_element(c: Polynomial, p: int):
    from .arithmodels import clear_denominators, _reduce_poly

    if c.domain.is_rational:
        cleared, primes = clear_denominators(c)
        return _reduce_poly(cleared, p), primes
    return c, set()


def certify_gsfr(job: JobSpec) -> Certificate:
    """Geometric strong F-regularity over a function-field base."""
    if job.spec.ring.domain.characteristic == 0:
        raise CertifyError("gsfr mode expects an F_p input with base variables")
    if job.test_element is None:
        raise CertifyError("gsfr mode needs a test element")
    assumptions = [
        "base field presented as F_p(t..) via the designated base variables",
        "geometric normality of the fibers (user-asserted)",
        "test element vanishes on the non-regular locus (user-asserted)",
    ]
    p = job.spec.ring.domain.p
    model = perfection_model(job.spec, PerfectionLevel(job.level))
    result = geometric_sfr_check(job.spec, PerfectionLevel(job.level),
                                 job.test_element, job.e_max, job.budget())
    tried = [{"prime": p, "status": result.status, "level": job.level}]
    if result.certified:
        return _emit("geometrically_strongly_F_regular", THEOREM_TAGS["gsfr"],
                     p, result.witness, model, job.spec, assumptions, tried,
                     details={"level": job.level},
                     escape_indices=job.spec.ring.fiber_vars)
    return _emit("inconclusive", THEOREM_TAGS["gsfr"], p, None, None,
                 job.spec, assumptions, tried, details={"level": job.level})


@dataclass
class DeformationReport:
    slice_result: object
    total_result: object
    certificate: Certificate
    theorem_violation_candidate: bool = False


def verify_deformation_sfr(ring: RingPresentation, h: Polynomial,
                           c_slice: Polynomial, c_total: Polynomial,
                           e_max: int, budget: Budget | None = None,
                           _job_name: str = "deform") -> DeformationReport:
    """Certify S = R/(h) and R strongly F-regular independently.

    Emits deformation_consistent when both certify.  If the slice certifies
    while the total space provably fails F-purity at e = 1 (a definitive
    graded refutation of strong F-regularity), the report raises the
    theorem-violation flag for bug triage; the deformation statement says
    this cannot happen on the Q-Gorenstein locus.
    """
    if budget is None:
        budget = Budget()
    dom = ring.domain
    slice_ring = quotient_ring(ring.var_names, dom,
                               list(ring.relations.gens) + [h],
                               ring.base_vars)
    slice_spec = TripleSpec(slice_ring)
    total_spec = TripleSpec(ring)
    slice_result = strongly_fregular(slice_spec, c_slice, e_max, budget)
    total_result = strongly_fregular(total_spec, c_total, e_max, budget)

    assumptions = [
        "S = R/(h) normal (user-asserted)",
        "test elements valid for both rings (user-asserted)",
    ]
    violation = False
    if slice_result.certified and not total_result.certified:
        purity = sharply_fpure(total_spec, 1, budget)
        if purity.status == "fails":
            violation = True

    p = dom.p
    if slice_result.certified and total_result.certified:
        cert = _emit("deformation_consistent", THEOREM_TAGS["deform"], p,
                     total_result.witness, total_spec, total_spec,
                     assumptions,
                     [{"prime": p,
                       "status": f"slice certified at e={slice_result.e}, "
                                 f"total at e={total_result.e}"}],
                     details={
                         "slice_exponent": slice_result.e,
                         "total_exponent": total_result.e,
                     })
    else:
        failed = []
        if not slice_result.certified:
            failed.append("hypothesis not established: slice inconclusive")
        if not total_result.certified:
            failed.append("total space inconclusive")
        cert = _emit("inconclusive", THEOREM_TAGS["deform"], p, None, None,
                     total_spec, assumptions,
                     [{"prime": p, "status": "; ".join(failed)}],
                     details={"theorem_violation_candidate": violation})
    return DeformationReport(slice_result, total_result, cert, violation)


# ---------------------------------------------------------------------------
# Job parsing and the corpus runner.


def parse_input(data: dict) -> TripleSpec:
    """Build a TripleSpec from the JSON input schema."""
    names = list(data["variables"])
    base_names = list(data.get("base_variables", []))
    coeff = data.get("coefficient", "Q")
    if coeff == "Q":
        dom = RATIONALS
    elif coeff == "Fp":
        dom = prime_field(int(data["p"]))
    else:
        raise CertifyError(f"unknown coefficient domain {coeff!r}")
    base_vars = tuple(names.index(b) for b in base_names)
    rel = [parse_polynomial(s, names, dom) for s in data.get("relations", [])]
    if rel:
        ring = quotient_ring(names, dom, rel, base_vars)
    else:
        ring = polynomial_ring(names, dom, base_vars)
    comps = []
    for item in data.get("delta", []):
        comps.append((parse_polynomial(item["g"], names, dom),
                      Fraction(item["c"])))
    a_gens = [parse_polynomial(s, names, dom) for s in data.get("a", [])]
    a = Ideal(dom, len(names), a_gens) if a_gens else None
    lam = Fraction(data.get("lambda", "1"))
    return TripleSpec(ring, DivisorData(tuple(comps)), a, lam)


def parse_job(data: dict, mode: str | None = None, **overrides) -> JobSpec:
    spec = parse_input(data)
    job = JobSpec(
        spec,
        mode or data.get("mode", "lc"),
        prime=data.get("prime"),
        e_max=int(data.get("e_max", 2)),
        gb_budget=int(data.get("gb_budget", 10**7)),
        assert_q_gorenstein=bool(data.get("assert_q_gorenstein", False)),
        level=int(data.get("level", 0)),
        n_max=int(data.get("n_max", 4)),
        name=data.get("name", "job"),
    )
    if "test_element" in data:
        job.test_element = parse_polynomial(data["test_element"],
                                            list(data["variables"]),
                                            spec.ring.domain)
    if "h" in data:
        job.h = parse_polynomial(data["h"], list(data["variables"]),
                                 spec.ring.domain)
    for key, value in overrides.items():
        if value is not None:
            setattr(job, key, value)
    return job


def run_job(job: JobSpec) -> dict:
    """Dispatch one job; returns a JSON-ready result record."""
    if job.mode == "lc":
        return {"certificate": certify_log_canonical(job).to_dict()}
    if job.mode in ("klt", "sfr"):
        return {"certificate": certify_klt(job).to_dict()}
    if job.mode == "gsfr":
        return {"certificate": certify_gsfr(job).to_dict()}
    if job.mode == "deform":
        if job.h is None:
            raise CertifyError("deform mode needs the slice element h")
        if job.test_element is None:
            raise CertifyError("deform mode needs a test element (used for "
                               "both rings unless test_element_slice given)")
        report = verify_deformation_sfr(job.spec.ring, job.h,
                                        job.test_element, job.test_element,
                                        job.e_max, job.budget())
        out = {"certificate": report.certificate.to_dict(),
               "theorem_violation_candidate": report.theorem_violation_candidate}
        return out
    if job.mode == "fpt":
        if job.spec.delta.components:
            f = job.spec.delta.components[0][0]
        elif not job.spec.a_is_trivial:
            f = job.spec.a.gens[0]
        else:
            raise CertifyError("fpt mode needs a divisor component or ideal")
        spec_p = job.spec
        if job.spec.ring.domain.characteristic == 0:
            model = spread_out(job.spec)
            p = job.prime or suggest_primes(model)[0]
            spec_p = reduce_mod_p(model, p)
            f = spec_p.delta.components[0][0] if spec_p.delta.components \
                else spec_p.a.gens[0]
        names = spec_p.ring.var_names
        values = []
        for e in range(1, job.e_max + 1):
            nu = nu_value(f, e)
            values.append({"e": e, "nu": nu,
                           "fpt_lower_bound": _frac_str(
                               Fraction(nu, spec_p.ring.domain.p ** e))})
        return {"fpt": {"f": f.to_string(names),
                        "p": spec_p.ring.domain.p, "values": values}}
    if job.mode == "tau":
        spec_p = job.spec
        if job.spec.ring.domain.characteristic == 0:
            model = spread_out(job.spec)
            p = job.prime or suggest_primes(model)[0]
            if not _index_ok(job.spec, p):
                raise CertifyError(f"prime {p} divides the index denominators")
            spec_p = reduce_mod_p(model, p)
        result = tau_pair_divisor(spec_p.ring, spec_p.delta, spec_p.a,
                                  spec_p.lam, job.n_max, job.budget())
        names = spec_p.ring.var_names
        return {"tau": {
            "p": spec_p.ring.domain.p,
            "generators": [g.to_string(names) for g in result.ideal.gens],
            "truncation_level": result.truncation_level,
            "stabilized": result.stabilized,
            "stabilization_level": result.stabilization_level,
        }}
    raise CertifyError(f"unknown mode {job.mode!r}")


def _matches(expected, got) -> bool:
    """Subset match: every expected key/value appears in the result."""
    if isinstance(expected, dict):
        if not isinstance(got, dict):
            return False
        return all(k in got and _matches(v, got[k]) for k, v in expected.items())
    if isinstance(expected, list):
        return expected == got
    return expected == got


def run_corpus(path: str, out_path: str | None = None) -> dict:
    """Execute all corpus jobs; report matches; exit code via 'all_pass'."""
    with open(path, "r", encoding="utf-8") as fh:
        corpus = json.load(fh)
    results = []
    all_pass = True
    for entry in corpus.get("jobs", []):
        name = entry.get("name", f"job{len(results)}")
        record = {"name": name}
        try:
            job = parse_job(entry["input"], entry.get("mode"))
            job.name = name
            got = run_job(job)
            expected = entry.get("expect", {})
            ok = _matches(expected, got)
            record.update({"expected": expected, "got": got, "pass": ok})
        except Exception as exc:  # report, do not crash the runner
            record.update({"error": f"{type(exc).__name__}: {exc}",
                           "pass": False})
        if not record["pass"]:
            all_pass = False
        results.append(record)
    report = {
        "corpus": path,
        "tool_version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "results": results,
        "all_pass": all_pass,
    }
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report
