"""Hypertranscendence certificates for Mahler systems and equations.

A certificate is an ordered chain of rule applications.  Each step records
the rule, the statement it relies on, a digest of its inputs, the solver
bounds it used and its outcome, so that the chain can be replayed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .algebra import RatFun, is_monomial, mahler_substitute, theta_derive
from .errors import AssumptionMissing, InternalInconsistency, InvalidArgument, InvalidEquation, RadixMismatch, ZeroInput
from .linalg import mat_det
from .solvers import Found, SolveBounds, solve_integrability, solve_multiplicative, solve_telescoper
from .systems import MahlerSystem


class AssumptionKind(str, Enum):
    GALOIS_CONTAINS_SL = "GaloisContainsSL"
    GALOIS_EQUALS = "GaloisEquals"


class Verdict(str, Enum):
    HYPERTRANSCENDENTAL = "Hypertranscendental"
    HYPERALGEBRAIC_ORDER1 = "HyperalgebraicOrder1"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ScalarMahlerEq:
    """a_n y(z^(p^n)) + ... + a_1 y(z^p) + a_0 y(z) = 0."""

    coeffs: tuple
    p: int

    def __post_init__(self):
        coeffs = tuple(RatFun.coerce(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise InvalidEquation("a Mahler equation needs coefficients a_0, ..., a_n with n >= 1")
        if coeffs[0].is_zero() or coeffs[-1].is_zero():
            raise InvalidEquation("a_0 and a_n must be nonzero")
        if not isinstance(self.p, int) or self.p < 2:
            raise InvalidArgument(f"radix p must be an integer >= 2, got {self.p!r}")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class Assumption:
    """An externally established fact about the classical Galois group.

    ``blocks`` is set for a product-group hypothesis on a block-diagonal
    system: the group contains the product of SL_{n_i}(C) over the blocks.
    """

    kind: AssumptionKind
    statement: str
    provenance: str
    blocks: tuple | None = None

    def as_dict(self):
        out = {"kind": AssumptionKind(self.kind).value, "statement": self.statement, "provenance": self.provenance}
        if self.blocks is not None:
            out["blocks"] = list(self.blocks)
        return out


def sl_assumption(provenance: str, n: int | None = None, blocks=None, kind=AssumptionKind.GALOIS_CONTAINS_SL):
    """Convenience constructor for the SL_n-containment hypothesis."""
    if blocks:
        group = " x ".join(f"SL_{b}(C)" for b in blocks)
    else:
        group = f"SL_{n}(C)" if n else "SL_n(C)"
    statement = f"the difference Galois group of phi(Y) = A Y over K contains {group}"
    return Assumption(AssumptionKind(kind), statement, provenance, tuple(blocks) if blocks else None)


@dataclass(frozen=True)
class Step:
    rule_id: str
    anchor: str
    inputs_digest: str
    bounds_used: dict | None
    outcome: str

    def as_dict(self):
        return {
            "rule_id": self.rule_id,
            "anchor": self.anchor,
            "inputs_digest": self.inputs_digest,
            "bounds_used": self.bounds_used,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    group_bounds: str
    assumptions: tuple
    steps: tuple
    branch: str = ""
    reason: str = ""
    conclusion: str = ""
    witness: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "verdict": Verdict(self.verdict).value,
            "branch": self.branch,
            "group_bounds": self.group_bounds,
            "conclusion": self.conclusion,
            "reason": self.reason,
            "assumptions": [a.as_dict() for a in self.assumptions],
            "steps": [s.as_dict() for s in self.steps],
            "witness": self.witness,
        }

    def to_json(self, compact: bool = False) -> str:
        if compact:
            return json.dumps(self.as_dict(), separators=(",", ":"), ensure_ascii=False)
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)


# Statements each rule relies on, written as formulas over K = union of Q(z^(1/j)).
ANCHORS = {
    "assumption": "hypothesis H: SL_n(C) <= classical difference Galois group G of phi(Y) = A Y over K (supplied, not computed)",
    "reducibility-gate": "if a constant permutation makes A block-triangular over K, G fixes a proper subspace and cannot contain SL_n(C)",
    "block-structure": "a product hypothesis needs A = diag(A_1, ..., A_r) with blocks of the declared sizes",
    "determinant": "det U of a fundamental matrix U satisfies phi(y) = det(A) y",
    "order1-classifier": "phi(y) = a y: y hyperalgebraic <=> a = c z^m phi(f)/f (f in C(z)) <=> theta(a)/a = p phi(d) - d (d in C(z))",
    "order1-system": "n = 1: the solution u of phi(u) = a u is hyperalgebraic exactly when a passes the order-one classifier",
    "hyperalgebraic-determinant": "H + det hyperalgebraic => SL_n(~C) <= G^delta <= C^x SL_n(~C); entries of a nonzero C((z)) solution and all their derivatives are algebraically independent over C(z)",
    "traceless-integrability": "H + det hypertranscendental: G^delta = GL_n(~C) iff p phi(B) = A B A^-1 + theta(A) A^-1 - (1/n) theta(det A) det(A)^-1 I_n has no solution B over K",
    "hypertranscendental-determinant": "H + det hypertranscendental: some entry of any nonzero solution over C((z^(1/k))) is hypertranscendental",
    "product-group": "product hypothesis: G^delta contains the product of the SL_{n_i}(~C) of the blocks",
    "companion-reduction": "(f, phi(f), ..., phi^(n-1)(f)) solves the companion system; det = (-1)^n a_0/a_n",
}

HYPERALG_BOUNDS = "SL_{n}(~C) <= G <= C^x SL_{n}(~C)"
HYPERTRANS_BOUNDS = "G = GL_{n}(~C), conditional on bounds"


def _digest(*parts) -> str:
    text = "\x1f".join(str(p) for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _matrix_text(A) -> str:
    return "[" + ",".join("[" + ",".join(str(e) for e in row) + "]" for row in A) + "]"


def _bounds_key(bounds: SolveBounds) -> str:
    return json.dumps(bounds.as_dict(), sort_keys=True)


# -- order one -----------------------------------------------------------------

@dataclass(frozen=True)
class Hyperalgebraic:
    c: Fraction
    m: int
    f: RatFun
    d: RatFun

    hyperalgebraic = True

    def __str__(self):
        return f"Hyperalgebraic(c={self.c}, m={self.m}, f={self.f})"


@dataclass(frozen=True)
class NotHyperalgebraicWithin:
    bounds: SolveBounds

    hyperalgebraic = False

    def __str__(self):
        b = self.bounds
        return f"NotHyperalgebraicWithin(num<={b.max_num_degree}, den<={b.max_den_degree})"


def classify_order1(a, p: int, bounds: SolveBounds | None = None):
    """Decide the multiplicative criterion for phi(y) = a y, cross-checked
    against the telescoper criterion on theta(a)/a."""
    a = RatFun.coerce(a)
    if a.is_zero():
        raise ZeroInput("classify_order1 needs a nonzero a")
    bounds = bounds or SolveBounds.default_for(a)
    mult = solve_multiplicative(a, p, bounds)
    tele = solve_telescoper(theta_derive(a) / a, p, p, bounds)
    if mult.found != tele.found:
        raise InternalInconsistency(
            f"multiplicative criterion {'found' if mult.found else 'not found'} but telescoper "
            f"{'found' if tele.found else 'not found'} for a = {a}, p = {p}"
        )
    if not mult.found:
        return NotHyperalgebraicWithin(bounds)
    w = mult.witness
    expected_d = Fraction(w.m, p - 1) + theta_derive(w.f) / w.f
    if expected_d != tele.witness:
        raise InternalInconsistency(f"telescoper witness {tele.witness} differs from m/(p-1) + theta(f)/f = {expected_d}")
    return Hyperalgebraic(w.c, w.m, w.f, tele.witness)


# -- constructions ----------------------------------------------------------------

def companion_matrix(eq: ScalarMahlerEq) -> MahlerSystem:
    n = eq.order
    an = eq.coeffs[-1]
    rows = []
    for i in range(n - 1):
        rows.append(tuple(RatFun.coerce(1 if j == i + 1 else 0) for j in range(n)))
    rows.append(tuple(-c / an for c in eq.coeffs[:-1]))
    return MahlerSystem(tuple(rows), eq.p)


def direct_sum(s1: MahlerSystem, s2: MahlerSystem) -> MahlerSystem:
    if s1.p != s2.p:
        raise RadixMismatch(f"cannot sum systems with radix {s1.p} and {s2.p}")
    n1, n2 = s1.n, s2.n
    zero = RatFun()
    rows = [tuple(row) + (zero,) * n2 for row in s1.A]
    rows += [(zero,) * n1 + tuple(row) for row in s2.A]
    return MahlerSystem(tuple(rows), s1.p)


def _strongly_connected(A) -> bool:
    """Zero pattern of A is irreducible (no permutation makes it block triangular)."""
    n = len(A)
    if n == 1:
        return True

    def reach(adj):
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j not in seen and adj(i, j):
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    return reach(lambda i, j: not A[i][j].is_zero()) and reach(lambda i, j: not A[j][i].is_zero())


def _sub_block(A, start, size):
    return tuple(tuple(A[i][start:start + size]) for i in range(start, start + size))


# -- the certification chain ---------------------------------------------------------

def _operation_table():
    return {
        "assumption": sl_assumption,
        "reducibility-gate": _strongly_connected,
        "block-structure": _sub_block,
        "determinant": mat_det,
        "order1-classifier": classify_order1,
        "order1-system": classify_order1,
        "hyperalgebraic-determinant": is_monomial,
        "traceless-integrability": solve_integrability,
        "hypertranscendental-determinant": solve_integrability,
        "product-group": direct_sum,
        "companion-reduction": companion_matrix,
    }


class _Chain:
    def __init__(self):
        self.steps = []

    def add(self, rule_id, digest, outcome, bounds=None):
        if rule_id not in ANCHORS:
            raise InternalInconsistency(f"unknown rule {rule_id}")
        self.steps.append(Step(rule_id, ANCHORS[rule_id], digest, bounds.as_dict() if bounds else None, outcome))


def _block_chain(chain: _Chain, A, p: int, bounds: SolveBounds, label: str):
    """Run gate -> determinant -> classifier -> branch for one block.
    Returns (verdict, group_bounds, branch, reason, witness)."""
    n = len(A)
    mtext = _matrix_text(A)
    if not _strongly_connected(A):
        chain.add("reducibility-gate", _digest(label, mtext), "reducible zero pattern: AssumptionImplausible")
        return Verdict.INCONCLUSIVE, "", "", "AssumptionImplausible", {}
    chain.add("reducibility-gate", _digest(label, mtext), "irreducible zero pattern")
    system = MahlerSystem(A, p)
    det = system.det
    chain.add("determinant", _digest(label, mtext, p), f"det A = {det}")
    cls = classify_order1(det, p, bounds)
    chain.add("order1-classifier", _digest(label, det, p, _bounds_key(bounds)), str(cls), bounds)
    if n == 1:
        if cls.hyperalgebraic:
            chain.add("order1-system", _digest(label, det, p), "solutions hyperalgebraic")
            return Verdict.HYPERALGEBRAIC_ORDER1, "G <= C^x", "order one", "", {}
        chain.add("order1-system", _digest(label, det, p), "solutions hypertranscendental, conditional on bounds")
        return Verdict.HYPERTRANSCENDENTAL, "G = ~C^x, conditional on bounds", "order one", "", {}
    if cls.hyperalgebraic:
        branch = "monomial determinant" if is_monomial(det) else "hyperalgebraic determinant"
        chain.add("hyperalgebraic-determinant", _digest(label, det, n), branch)
        return Verdict.HYPERTRANSCENDENTAL, HYPERALG_BOUNDS.format(n=n), branch, "", {}
    res = solve_integrability(system, traceless=True, bounds=bounds)
    digest = _digest(label, mtext, p, "traceless", _bounds_key(bounds))
    if isinstance(res, Found):
        B = _matrix_text(res.witness)
        chain.add("traceless-integrability", digest, f"Found B = {B}", bounds)
        return Verdict.INCONCLUSIVE, "", "hypertranscendental determinant", "IntegrabilitySolutionFound", {"B": B}
    chain.add("traceless-integrability", digest, "NotFoundWithin", bounds)
    chain.add("hypertranscendental-determinant", _digest(label, det, n), "GL_n branch")
    return Verdict.HYPERTRANSCENDENTAL, HYPERTRANS_BOUNDS.format(n=n), "hypertranscendental determinant", "", {}


def certify(system: MahlerSystem, assumption: Assumption | None, bounds: SolveBounds | None = None) -> Certificate:
    """Certificate for phi(Y) = A Y under an SL_n-containment hypothesis."""
    if assumption is None or not str(assumption.provenance).strip():
        raise AssumptionMissing("certify needs an SL_n-containment assumption with nonempty provenance")
    bounds = bounds or SolveBounds.default_for(system)
    n, p = system.n, system.p
    chain = _Chain()
    chain.add("assumption", _digest(assumption.kind, assumption.statement, assumption.provenance, assumption.blocks), "accepted")
    blocks = tuple(assumption.blocks) if assumption.blocks else (n,)
    A = system.A
    if sum(blocks) != n or any(b < 1 for b in blocks):
        raise InvalidArgument(f"assumption blocks {blocks} do not partition size {n}")
    if len(blocks) > 1:
        start = 0
        ok = True
        for b in blocks:
            for i in range(start, start + b):
                for j in range(n):
                    if not (start <= j < start + b) and not A[i][j].is_zero():
                        ok = False
            start += b
        if not ok:
            chain.add("block-structure", _digest(_matrix_text(A), blocks), "not block diagonal: AssumptionImplausible")
            return Certificate(Verdict.INCONCLUSIVE, "", (assumption,), tuple(chain.steps), reason="AssumptionImplausible")
        chain.add("block-structure", _digest(_matrix_text(A), blocks), "block diagonal")
    results = []
    start = 0
    for k, b in enumerate(blocks):
        label = f"block{k}" if len(blocks) > 1 else "system"
        results.append(_block_chain(chain, _sub_block(A, start, b), p, bounds, label))
        start += b
        if results[-1][0] == Verdict.INCONCLUSIVE:
            break
    verdicts = [r[0] for r in results]
    if Verdict.INCONCLUSIVE in verdicts:
        bad = next(r for r in results if r[0] == Verdict.INCONCLUSIVE)
        return Certificate(Verdict.INCONCLUSIVE, "", (assumption,), tuple(chain.steps), branch=bad[2], reason=bad[3], witness=bad[4])
    if len(results) == 1:
        verdict, group_bounds, branch, _, _ = results[0]
    else:
        chain.add("product-group", _digest(blocks, *(r[1] for r in results)), "per-block bounds combined")
        verdict = Verdict.HYPERTRANSCENDENTAL if all(v == Verdict.HYPERTRANSCENDENTAL for v in verdicts) else Verdict.INCONCLUSIVE
        group_bounds = " x ".join(f"({r[1]})" for r in results)
        branch = " + ".join(r[2] for r in results)
    if verdict == Verdict.HYPERTRANSCENDENTAL and "conditional" not in group_bounds and n > 1:
        conclusion = "the entries of any nonzero solution in C((z))^n and all their derivatives are algebraically independent over C(z)"
    elif verdict == Verdict.HYPERTRANSCENDENTAL:
        conclusion = "hypertranscendence conditional on the recorded solver bounds"
    else:
        conclusion = "solutions are hyperalgebraic"
    return Certificate(verdict, group_bounds, (assumption,), tuple(chain.steps), branch=branch, conclusion=conclusion)


def certify_equation(eq: ScalarMahlerEq, assumption: Assumption | None, bounds: SolveBounds | None = None) -> Certificate:
    system = companion_matrix(eq)
    cert = certify(system, assumption, bounds)
    ratio = eq.coeffs[-1] / eq.coeffs[0]
    step = Step(
        "companion-reduction",
        ANCHORS["companion-reduction"],
        _digest(*eq.coeffs, eq.p),
        None,
        f"a_n/a_0 = {ratio}; monomial: {is_monomial(ratio)}",
    )
    conclusion = cert.conclusion
    if cert.verdict == Verdict.HYPERTRANSCENDENTAL and "conditional" not in cert.group_bounds:
        powers = ", ".join(["f(z)"] + [f"f(z^{eq.p ** i})" for i in range(1, eq.order)])
        conclusion = (
            f"for any nonzero solution f in C((z)): {powers} and all their derivatives are "
            "algebraically independent over C(z)"
        )
    return Certificate(
        cert.verdict,
        cert.group_bounds,
        cert.assumptions,
        (step,) + cert.steps,
        branch=cert.branch,
        reason=cert.reason,
        conclusion=conclusion,
        witness=cert.witness,
    )


def replay_certificate(cert: Certificate, system, assumption: Assumption, bounds: SolveBounds | None = None) -> bool:
    """Re-execute the chain and check each recorded step (rule, input digest,
    outcome) and the verdict.  ``system`` may be a MahlerSystem or a
    ScalarMahlerEq."""
    if isinstance(system, ScalarMahlerEq):
        fresh = certify_equation(system, assumption, bounds)
    else:
        fresh = certify(system, assumption, bounds)
    if len(fresh.steps) != len(cert.steps):
        return False
    for old, new in zip(cert.steps, fresh.steps):
        if (old.rule_id, old.inputs_digest, old.outcome, old.bounds_used) != (
            new.rule_id,
            new.inputs_digest,
            new.outcome,
            new.bounds_used,
        ):
            return False
    return fresh.verdict == cert.verdict and fresh.group_bounds == cert.group_bounds


def is_hyperalgebraic_instance(a, p: int, c, m: int, f) -> bool:
    """Check a = c z^m phi(f)/f exactly."""
    f = RatFun.coerce(f)
    return RatFun.coerce(a) == RatFun.z_power(m, c) * mahler_substitute(f, p) / f


# rule_id -> the function that executes (or, for the assumption, records) it
RULE_OPERATIONS = _operation_table()
