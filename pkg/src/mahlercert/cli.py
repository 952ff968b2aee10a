"""Command-line front end.

Every command prints one JSON document with a stable field order:
tool, command, inputs, outcome, result, [certificate], digest, replay.
``digest`` is the sha256 of the canonical body (everything before it), so
two runs on the same inputs can be compared byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .algebra import RatFun, is_monomial
from .certifier import (
    AssumptionKind,
    ScalarMahlerEq,
    certify,
    certify_equation,
    classify_order1,
    direct_sum,
    sl_assumption,
)
from .errors import AssumptionMissing, InvalidArgument, MahlerError, ShapeMismatch
from .parser import evaluate, value_to_text
from .series import (
    TruncatedSeries,
    find_relations,
    gen_baum_sweet,
    gen_rudin_shapiro,
    read_series,
    series_negate_z,
    series_substitute,
    series_to_compact,
    series_to_text,
    verify_series_solution,
)
from .solvers import SolveBounds, solve_integrability, solve_multiplicative, solve_telescoper
from .systems import MahlerSystem

COMMANDS = (
    "classify1",
    "telescope",
    "multiplicative",
    "integrability",
    "certify",
    "certify-eq",
    "series",
    "verify",
    "relations",
    "direct-sum",
)


@dataclass(frozen=True)
class JobSpec:
    command: str
    inputs: tuple
    params: dict = field(default_factory=dict)
    assumption: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidArgument(f"unknown command {self.command!r}")
        for key in ("p", "p2"):
            p = self.params.get(key)
            if p is not None and p < 2:
                raise InvalidArgument(f"{key} must be >= 2, got {p}")
        for key in ("max_num_deg", "max_den_deg", "precision", "escalations"):
            v = self.params.get(key)
            if v is not None and v < 1:
                raise InvalidArgument(f"{key} must be positive, got {v}")


def _read_arg(text: str) -> str:
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text().strip()
        except OSError as exc:
            raise InvalidArgument(f"cannot read {text[1:]}: {exc.strerror}") from None
    return text


def _scalar(text: str) -> RatFun:
    v = evaluate(_read_arg(text))
    if isinstance(v, tuple):
        raise ShapeMismatch("expected a rational function, got a matrix")
    return v


def _matrix(text: str):
    v = evaluate(_read_arg(text))
    if not isinstance(v, tuple):
        raise ShapeMismatch("expected a matrix such as [[0,1],[1,-z]]")
    return v


def _bounds(params, *data):
    """Explicit flags override the input-derived defaults."""
    default = SolveBounds.default_for(*data)
    num = params.get("max_num_deg") or default.max_num_degree
    den = params.get("max_den_deg") or default.max_den_degree
    steps = params.get("escalations") or default.escalation_steps
    prec = params.get("precision") or 2 * (num + den) + 4
    return SolveBounds(num, den, prec, steps)


def _series_source(text: str, N: int, p: int) -> tuple[str, TruncatedSeries]:
    """gen:baum-sweet, gen:rudin-shapiro with optional :phi / :neg suffixes,
    a series file (either text format), or a rational-function expression."""
    if text.startswith("gen:"):
        name, *mods = text[4:].split(":")
        gens = {"baum-sweet": gen_baum_sweet, "rudin-shapiro": gen_rudin_shapiro}
        if name not in gens:
            raise InvalidArgument(f"unknown generator {name!r}; use baum-sweet or rudin-shapiro")
        s = gens[name](N)
        for mod in mods:
            if mod == "phi":
                s = series_substitute(s, p)
            elif mod == "neg":
                s = series_negate_z(s)
            else:
                raise InvalidArgument(f"unknown series modifier {mod!r}; use phi or neg")
        return text, s
    if text.startswith("@"):
        s = read_series(_read_arg(text))
        return series_to_compact(s), s
    f = _scalar(text)
    return str(f), TruncatedSeries.from_ratfun(f, N)


# -- handlers -----------------------------------------------------------------------

def _job_classify1(job):
    p = job.params.get("p", 2)
    a = _scalar(job.inputs[0])
    bounds = _bounds(job.params, a)
    res = classify_order1(a, p, bounds)
    inputs = {"a": str(a), "p": p}
    if res.hyperalgebraic:
        return inputs, "Hyperalgebraic", {"c": str(res.c), "m": res.m, "f": str(res.f), "d": str(res.d), "bounds": bounds.as_dict()}
    return inputs, "NotHyperalgebraicWithin", {"bounds": bounds.as_dict()}


def _solver_result(res, witness_text):
    out = {}
    if res.found:
        out.update(witness_text(res.witness))
    out["bounds"] = res.bounds.as_dict()
    if res.detail:
        out["detail"] = {k: res.detail[k] for k in sorted(res.detail)}
    return ("Found" if res.found else "NotFoundWithin"), out


def _job_telescope(job):
    p = job.params.get("p", 2)
    lam = job.params.get("lambda")
    lam = p if lam is None else lam
    b = _scalar(job.inputs[0])
    bounds = _bounds(job.params, b)
    res = solve_telescoper(b, p, lam, bounds)
    outcome, out = _solver_result(res, lambda d: {"d": str(d)})
    return {"b": str(b), "p": p, "lambda": str(lam)}, outcome, out


def _job_multiplicative(job):
    p = job.params.get("p", 2)
    a = _scalar(job.inputs[0])
    bounds = _bounds(job.params, a)
    res = solve_multiplicative(a, p, bounds)
    outcome, out = _solver_result(res, lambda w: {"c": str(w.c), "m": w.m, "f": str(w.f)})
    return {"a": str(a), "p": p}, outcome, out


def _job_integrability(job):
    p = job.params.get("p", 2)
    system = MahlerSystem(_matrix(job.inputs[0]), p)
    traceless = bool(job.params.get("traceless"))
    bounds = _bounds(job.params, system)
    res = solve_integrability(system, traceless, bounds)
    outcome, out = _solver_result(res, lambda B: {"B": value_to_text(B)})
    return {"A": system.matrix_text(), "p": p, "traceless": traceless}, outcome, out


def _assumption(job, n=None):
    text = _read_arg(job.assumption) if job.assumption else ""
    if not text.strip():
        raise AssumptionMissing("certify commands need --assumption with the citation establishing the SL_n hypothesis")
    blocks = job.params.get("blocks")
    kind = AssumptionKind(job.params.get("assumption_kind") or AssumptionKind.GALOIS_CONTAINS_SL.value)
    return sl_assumption(text, n=n, blocks=blocks, kind=kind)


def _job_certify(job):
    p = job.params.get("p", 2)
    system = MahlerSystem(_matrix(job.inputs[0]), p)
    bounds = _bounds(job.params, system)
    cert = certify(system, _assumption(job, system.n), bounds)
    inputs = {"A": system.matrix_text(), "p": p, "det": str(system.det), "assumption": cert.assumptions[0].provenance}
    return inputs, cert.verdict.value, {"branch": cert.branch, "group_bounds": cert.group_bounds}, cert.as_dict()


def _job_certify_eq(job):
    p = job.params.get("p", 2)
    eq = ScalarMahlerEq(tuple(_scalar(t) for t in job.inputs), p)
    bounds = _bounds(job.params, *eq.coeffs)
    cert = certify_equation(eq, _assumption(job, eq.order), bounds)
    inputs = {"coefficients": [str(c) for c in eq.coeffs], "p": p, "assumption": cert.assumptions[0].provenance}
    return inputs, cert.verdict.value, {"branch": cert.branch, "group_bounds": cert.group_bounds}, cert.as_dict()


def _job_series(job):
    p = job.params.get("p", 2)
    N = job.params.get("precision") or 64
    label, s = _series_source(job.inputs[0], N, p)
    fmt = job.params.get("series_format") or "compact"
    body = series_to_compact(s) if fmt == "compact" else series_to_text(s)
    return {"source": label, "N": N, "p": p}, "generated", {"series_format": fmt, "series": body}


def _job_verify(job):
    p = job.params.get("p", 2)
    N = job.params.get("precision") or 64
    system = MahlerSystem(_matrix(job.inputs[0]), p)
    sources = [_series_source(t, N, p) for t in job.inputs[1:]]
    v = verify_series_solution(system, [s for _, s in sources], N)
    ok = v >= N - 2
    inputs = {"A": system.matrix_text(), "p": p, "N": N, "Y": [label for label, _ in sources]}
    return inputs, "residual-ok" if ok else "residual-too-large", {"residual_valuation": v, "required": N - 2}


def _job_relations(job):
    p = job.params.get("p", 2)
    N = job.params.get("precision") or 64
    r = job.params.get("deriv_order", 1)
    D = job.params.get("total_degree", 2)
    e = job.params.get("z_degree", 0)
    sources = [_series_source(t, N, p) for t in job.inputs]
    report = find_relations([s for _, s in sources], r, D, e, N)
    out = {
        "relations": [str(rel) for rel in report.relations],
        "search_params": report.search_params,
        "labels": {f"g{i}": label for i, (label, _) in enumerate(sources)},
        "rank_certificate": report.rank_certificate,
    }
    outcome = "relations-found" if report.relations else "no-relation"
    return {"series": [label for label, _ in sources], "r": r, "D": D, "e": e, "N": N}, outcome, out


def _job_direct_sum(job):
    p = job.params.get("p", 2)
    p2 = job.params.get("p2") or p
    s1 = MahlerSystem(_matrix(job.inputs[0]), p)
    s2 = MahlerSystem(_matrix(job.inputs[1]), p2)
    s = direct_sum(s1, s2)
    det = s.det
    inputs = {"A1": s1.matrix_text(), "A2": s2.matrix_text(), "p": p}
    return inputs, "constructed", {"A": s.matrix_text(), "det": str(det), "det_is_monomial": is_monomial(det)}


_HANDLERS = {
    "classify1": (_job_classify1, 1),
    "telescope": (_job_telescope, 1),
    "multiplicative": (_job_multiplicative, 1),
    "integrability": (_job_integrability, 1),
    "certify": (_job_certify, 1),
    "certify-eq": (_job_certify_eq, None),
    "series": (_job_series, 1),
    "verify": (_job_verify, None),
    "relations": (_job_relations, None),
    "direct-sum": (_job_direct_sum, 2),
}


def canonical_digest(body: dict) -> str:
    return hashlib.sha256(json.dumps(body, separators=(",", ":"), ensure_ascii=False).encode()).hexdigest()


def run_job(job: JobSpec) -> dict:
    """Run one job and return its document (without the replay stanza)."""
    handler, arity = _HANDLERS[job.command]
    if arity is not None and len(job.inputs) != arity:
        raise InvalidArgument(f"{job.command} takes {arity} input(s), got {len(job.inputs)}")
    if not job.inputs:
        raise InvalidArgument(f"{job.command} needs at least one input")
    parts = handler(job)
    inputs, outcome, result = parts[:3]
    body = {"tool": "mahlercert", "version": __version__, "command": job.command, "inputs": inputs, "outcome": outcome, "result": result}
    if len(parts) > 3:
        body["certificate"] = parts[3]
    body["digest"] = canonical_digest(body)
    return body


def error_document(command: str, err: MahlerError) -> dict:
    info = {"code": err.code, "type": type(err).__name__, "message": str(err)}
    for attr in ("line", "column", "expected"):
        if hasattr(err, attr):
            value = getattr(err, attr)
            info[attr] = list(value) if isinstance(value, tuple) else value
    return {"tool": "mahlercert", "version": __version__, "command": command, "error": info}


def render(doc: dict, fmt: str) -> str:
    if fmt == "compact":
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
    return json.dumps(doc, indent=2, ensure_ascii=False)


# -- argument parsing ---------------------------------------------------------------

def _blocks(text: str):
    try:
        blocks = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("blocks must be comma-separated sizes such as 2,2") from None
    if any(b < 1 for b in blocks):
        raise argparse.ArgumentTypeError("block sizes must be positive")
    return blocks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mahlercert", description="Exact hypertranscendence certification for Mahler systems.")
    parser.add_argument("--version", action="version", version=f"mahlercert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", type=int, default=2, help="Mahler radix (default 2)")
        sp.add_argument("--precision", type=int, help="series precision N, or solver series precision")
        sp.add_argument("--max-num-deg", type=int, dest="max_num_deg")
        sp.add_argument("--max-den-deg", type=int, dest="max_den_deg")
        sp.add_argument("--escalations", type=int)
        sp.add_argument("--format", choices=("document", "compact"), default="document")

    helps = {
        "classify1": ("order-one classifier for phi(y) = a y", ["a"]),
        "telescope": ("solve lambda d(z^p) - d(z) = b over Q(z)", ["b"]),
        "multiplicative": ("write a = c z^m f(z^p)/f(z)", ["a"]),
        "integrability": ("solve p phi(B) = A B A^-1 + theta(A) A^-1", ["A"]),
        "certify": ("certify phi(Y) = A Y", ["A"]),
        "certify-eq": ("certify a_n y(z^(p^n)) + ... + a_0 y(z) = 0", None),
        "series": ("expand a generator or rational function", ["source"]),
        "verify": ("residual valuation of series against phi(Y) = A Y", None),
        "relations": ("search algebraic-differential relations among series", None),
        "direct-sum": ("block-diagonal sum of two systems", ["A1", "A2"]),
    }
    for name in COMMANDS:
        text, positionals = helps[name]
        sp = sub.add_parser(name, help=text, description=text)
        common(sp)
        if positionals is None:
            sp.add_argument("inputs", nargs="+")
        else:
            for pos in positionals:
                sp.add_argument(pos)
        if name == "telescope":
            sp.add_argument("--lambda", dest="lam", type=int)
        if name == "integrability":
            sp.add_argument("--traceless", action="store_true")
        if name in ("certify", "certify-eq"):
            sp.add_argument("--assumption", help="citation establishing the SL_n hypothesis (text or @file)")
            sp.add_argument("--assumption-kind", choices=[k.value for k in AssumptionKind], default=AssumptionKind.GALOIS_CONTAINS_SL.value)
            sp.add_argument("--blocks", type=_blocks, help="product hypothesis block sizes, e.g. 2,2")
        if name == "relations":
            sp.add_argument("--deriv-order", type=int, default=1, dest="deriv_order")
            sp.add_argument("--total-degree", type=int, default=2, dest="total_degree")
            sp.add_argument("--z-degree", type=int, default=0, dest="z_degree")
        if name == "series":
            sp.add_argument("--series-format", choices=("compact", "text"), default="compact")
        if name == "direct-sum":
            sp.add_argument("--p2", type=int, help="radix of the second system (defaults to --p)")

    batch = sub.add_parser("batch", help="run one job per line of a file concurrently")
    batch.add_argument("file")
    batch.add_argument("--jobs", type=int, default=1)
    batch.add_argument("--format", choices=("document", "compact"), default="document")
    return parser


def job_from_args(args) -> JobSpec:
    names = {"classify1": ["a"], "telescope": ["b"], "multiplicative": ["a"], "integrability": ["A"],
             "certify": ["A"], "series": ["source"], "direct-sum": ["A1", "A2"]}
    if args.command in names:
        inputs = tuple(getattr(args, n) for n in names[args.command])
    else:
        inputs = tuple(args.inputs)
    params = {"p": args.p}
    for key in ("precision", "max_num_deg", "max_den_deg", "escalations", "deriv_order", "total_degree",
                "z_degree", "series_format", "p2", "blocks", "assumption_kind"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if getattr(args, "lam", None) is not None:
        params["lambda"] = args.lam
    if getattr(args, "traceless", False):
        params["traceless"] = True
    return JobSpec(args.command, inputs, params, getattr(args, "assumption", None))


def _run_argv(argv):
    """Run one command line; returns (exit status, document)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        job = job_from_args(args)
        doc = run_job(job)
        status = 0
    except MahlerError as err:
        doc = error_document(args.command, err)
        status = 1
    doc["replay"] = {"argv": list(argv), "command_line": shlex.join(["mahlercert", *argv])}
    return status, doc


def _batch_line(line):
    try:
        return _run_argv(shlex.split(line))
    except SystemExit as exc:
        return 2, {"tool": "mahlercert", "error": {"code": "USAGE", "message": f"bad command line (exit {exc.code})"}, "replay": {"command_line": line}}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "batch":
        lines = [ln.strip() for ln in Path(args.file).read_text().splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_batch_line, lines))
        else:
            results = [_batch_line(ln) for ln in lines]
        print(render({"tool": "mahlercert", "jobs": [doc for _, doc in results]}, args.format))
        return 0 if all(status == 0 for status, _ in results) else 1
    status, doc = _run_argv(argv)
    out = sys.stdout if status == 0 else sys.stderr
    print(render(doc, args.format), file=out)
    return status


if __name__ == "__main__":
    sys.exit(main())
