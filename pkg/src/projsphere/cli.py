"""Command-line verifier and the report machinery behind it.

Subcommands::

    projsphere verify --n K [--seed S] [--format json|text] [--tol-rank T] [--dt H]
    projsphere verify-range --from 2 --to 8 [--jobs J]
    projsphere randers-check --config FILE [--seed S] [--dt H]
    projsphere dims --n K

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 a
numerical-rank decision was ambiguous, 64 usage error.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import (
    BlockFormError,
    FinslerConditionError,
    InvalidInputError,
    ProjSphereError,
    RankAmbiguityError,
    RankDisagreementError,
)
from .liealg import (
    centralizer,
    chain_holds,
    classify_block_form,
    dimension_formulas,
    random_block_form,
)
from .numkernel import matrix_exp
from .quotient import QuotientSpace, descent_residual, verify_free_action
from .randers import (
    RandersData,
    deviation_from_great_circle,
    integrate_geodesic,
    validate_finsler,
)
from .sphere import (
    ProjectiveMap,
    map_great_circle,
    map_points_residual,
    normalize,
    random_great_circle,
    random_projective_matrix,
    random_sphere_points,
    random_tangent,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_AMBIGUOUS = 2
EXIT_USAGE = 64

DEFAULT_SEED = 42
MAX_N = 16


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-9
    block_form: float = 1e-9
    block_det: float = 1e-8
    beltrami: float = 1e-9
    negative_control: float = 1e-3
    descent: float = 1e-9
    generic_descent: float = 0.1
    geodesic_closed_form: float = 1e-8
    frechet: float = 1e-5
    energy_drift: float = 1e-6
    dt: float = 1e-3


@dataclass
class CheckResult:
    name: str
    residual: float
    passed: bool

    def to_dict(self):
        return {"name": self.name, "residual": self.residual, "pass": self.passed}


@dataclass
class VerificationReport:
    n: int
    dim_sl: int
    dim_isom_bound: int
    dim_centralizer: int
    formula_match: bool
    chain_holds: bool
    free_action: bool
    deck_order: int
    geodesic_tests: list = field(default_factory=list)
    descent_tests: list = field(default_factory=list)
    block_form_tests: list = field(default_factory=list)
    overall: bool = False
    seed: int = DEFAULT_SEED
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_dict(self):
        return {
            "n": self.n,
            "dim_sl": self.dim_sl,
            "dim_isom_bound": self.dim_isom_bound,
            "dim_centralizer": self.dim_centralizer,
            "formula_match": self.formula_match,
            "chain_holds": self.chain_holds,
            "free_action": self.free_action,
            "deck_order": self.deck_order,
            "geodesic_tests": [t.to_dict() for t in self.geodesic_tests],
            "descent_tests": [t.to_dict() for t in self.descent_tests],
            "block_form_tests": [t.to_dict() for t in self.block_form_tests],
            "overall": self.overall,
            "seed": self.seed,
            "tolerances": asdict(self.tolerances),
        }


def _nonprojective(v):
    # smooth map of the sphere that bends great circles
    e2 = np.zeros_like(v)
    e2[1] = 1.0
    return normalize(v + 0.3 * v[0] ** 2 * e2)


def _beltrami_tests(n, rng, tol, count=20):
    out = []
    for k in range(count):
        A = random_projective_matrix(rng, n)
        gc = random_great_circle(rng, n)
        _, r = map_great_circle(ProjectiveMap(A), gc)
        out.append(CheckResult(f"great-circle-{k}", r, r < tol.beltrami))
    gc = random_great_circle(rng, n)
    _, r = map_points_residual(_nonprojective, gc)
    out.append(CheckResult("great-circle-control-nonprojective", r, r > tol.negative_control))
    return out


def _geodesic_tests(n, rng, tol):
    out = []
    size = n + 1
    x0 = normalize(rng.normal(size=size))
    v0 = random_tangent(rng, x0)
    flat = RandersData.make(n)
    curve = integrate_geodesic(flat, x0, v0, 2 * math.pi, tol.dt, drift_tol=tol.energy_drift)
    exact = np.cos(curve.times)[:, None] * x0 + np.sin(curve.times)[:, None] * v0
    err = float(np.max(np.abs(curve.points - exact)))
    out.append(CheckResult("riemannian-closed-form", err, err < tol.geodesic_closed_form))
    for k, wnorm in enumerate((0.2, 0.5, 0.8)):
        w = normalize(rng.normal(size=size)) * wnorm
        x0 = normalize(rng.normal(size=size))
        v0 = random_tangent(rng, x0)
        curve = integrate_geodesic(RandersData.make(n, w=w), x0, v0, 2 * math.pi, tol.dt,
                                   drift_tol=tol.energy_drift)
        _, d = deviation_from_great_circle(curve)
        out.append(CheckResult(f"closed-form-omega-{k}", d, d < tol.frechet))
    return out


def _descent_tests(q, rng, tol, count=5):
    out = []
    for k in range(count):
        A = random_block_form(rng, q.n).matrix()
        r = descent_residual(q, A)
        out.append(CheckResult(f"block-form-{k}", r, r < tol.descent))
    for k in range(count):
        # a generic draw that happens to nearly normalize B is re-drawn
        while True:
            A = random_projective_matrix(rng, q.n)
            r = descent_residual(q, A)
            if r > tol.generic_descent:
                break
        out.append(CheckResult(f"generic-{k}", r, r > tol.generic_descent))
    return out


def _block_form_tests(basis, n, tol):
    out = []
    for i, X in enumerate(basis.basis):
        for t in (0.1, 1.0):
            name = f"exp-{i}-t{t:g}"
            try:
                bf = classify_block_form(matrix_exp(X, t), n, tol.block_form,
                                         require_group=True, det_tol=tol.block_det)
                out.append(CheckResult(name, abs(bf.det_defect()), True))
            except BlockFormError as exc:
                out.append(CheckResult(name, float(exc.norm or math.inf), False))
    return out


def run_verify(n, seed=DEFAULT_SEED, tolerances=None):
    """Run every numerical certificate for dimension ``n`` and assemble a report.

    Raises :class:`RankAmbiguityError` / :class:`RankDisagreementError` if the
    centralizer dimension cannot be decided with confidence.
    """
    if isinstance(n, bool) or not isinstance(n, int) or not 2 <= n <= MAX_N:
        raise InvalidInputError(f"n must be an integer in [2, {MAX_N}], got {n!r}")
    tol = tolerances or Tolerances()
    rng = np.random.default_rng(seed)
    dim_sl, dim_isom, formula = dimension_formulas(n)
    basis = centralizer(n, tol.rank)
    q = QuotientSpace.of_dimension(n)
    free = verify_free_action(q, 10_000, seed=seed)
    report = VerificationReport(
        n=n,
        dim_sl=dim_sl,
        dim_isom_bound=dim_isom,
        dim_centralizer=basis.dim,
        formula_match=basis.dim == formula,
        chain_holds=chain_holds(dim_isom, basis.dim, dim_sl),
        free_action=free.free,
        deck_order=free.deck_order,
        seed=seed,
        tolerances=tol,
    )
    report.geodesic_tests = _beltrami_tests(n, rng, tol) + _geodesic_tests(n, rng, tol)
    report.descent_tests = _descent_tests(q, rng, tol)
    report.block_form_tests = _block_form_tests(basis, n, tol)
    report.overall = bool(
        report.formula_match
        and report.free_action
        and report.dim_centralizer < report.dim_sl
        and all(t.passed for t in report.geodesic_tests + report.descent_tests + report.block_form_tests)
    )
    return report


# ---------------------------------------------------------------- serialization

def _dump(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def to_json(data):
    """Deterministic JSON: keys in insertion order, reals with 17 significant digits."""
    return _dump(data) + "\n"


def _chain_line(dim_isom, dim_pp, dim_sl):
    status = "STRICT" if chain_holds(dim_isom, dim_pp, dim_sl) else "NOT STRICT"
    return f"n(n+1)/2 < n^2-2n+2 < n(n+2):  {dim_isom} < {dim_pp} < {dim_sl}   [{status}]"


def _mark(ok):
    return "PASS" if ok else "FAIL"


def format_text(r):
    lines = [
        f"n = {r.n}   seed = {r.seed}",
        f"  dim sl(n+1) = n(n+2)           {r.dim_sl}",
        f"  isometry bound n(n+1)/2        {r.dim_isom_bound}",
        f"  centralizer of B in sl(n+1)    {r.dim_centralizer}   (formula n^2-2n+2 = "
        f"{r.n * r.n - 2 * r.n + 2}: {_mark(r.formula_match)})",
        "  " + _chain_line(r.dim_isom_bound, r.dim_centralizer, r.dim_sl),
        f"  b fixed-point free             {_mark(r.free_action)}",
        f"  order of B                     {r.deck_order}" + ("" if r.deck_order == 2 else "   (B^2 != I)"),
    ]
    for title, tests in (("geodesic", r.geodesic_tests), ("descent", r.descent_tests),
                         ("block form", r.block_form_tests)):
        npass = sum(t.passed for t in tests)
        lines.append(f"  {title + ' tests':<31}{npass}/{len(tests)} pass")
        for t in tests:
            if not t.passed:
                lines.append(f"    FAIL {t.name}: residual {t.residual:.3e}")
    lines.append(f"  overall                        {_mark(r.overall)}")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt="json"):
    """Serialize a report; ``fmt`` is ``"json"`` or ``"text"``."""
    if fmt == "json":
        return to_json(report.to_dict()).encode()
    if fmt == "text":
        return format_text(report).encode()
    raise InvalidInputError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------- randers check

@dataclass(frozen=True)
class RandersConfig:
    n: int
    w: list
    C: list

    @classmethod
    def from_dict(cls, d):
        try:
            n, w, C = d["n"], d["w"], d["C"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"config needs keys n, w, C ({exc})") from None
        return cls(n=n, w=w, C=C)

    def metric(self):
        return RandersData(self.n, np.array(self.w, dtype=float), np.array(self.C, dtype=float))


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from None
    return RandersConfig.from_dict(data)


def run_randers_check(config, seed=DEFAULT_SEED, tolerances=None, count=10):
    """Integrate seeded geodesics of the configured metric and classify it.

    Raises :class:`FinslerConditionError` when the 1-form is too large.
    """
    tol = tolerances or Tolerances()
    m = config.metric() if isinstance(config, RandersConfig) else config
    check = validate_finsler(m, 10_000, seed=seed)
    if not check.valid:
        raise FinslerConditionError(
            f"g-norm of omega reaches {check.max_norm:.17g}, not below 1", max_norm=check.max_norm
        )
    rng = np.random.default_rng(seed)
    tests = []
    for k, x0 in enumerate(random_sphere_points(rng, m.n, count)):
        v0 = random_tangent(rng, x0)
        curve = integrate_geodesic(m, x0, v0, 2 * math.pi, tol.dt, drift_tol=tol.energy_drift,
                                   check_finsler=False)
        _, d = deviation_from_great_circle(curve)
        tests.append(CheckResult(f"geodesic-{k}", d, d < tol.frechet))
    round_ = all(t.passed for t in tests)
    return {
        "n": m.n,
        "finsler_valid": check.valid,
        "max_norm": check.max_norm,
        "omega_exact": m.is_exact,
        "geodesics": [t.to_dict() for t in tests],
        "max_distance": max(t.residual for t in tests),
        "classification": "projectively round" if round_ else "deviating",
        "consistent": (not m.is_exact) or round_,
        "seed": seed,
        "tolerances": asdict(tol),
    }


def format_randers_text(r):
    lines = [
        f"Randers check, n = {r['n']}, seed = {r['seed']}",
        f"  max g-norm of omega   {r['max_norm']:.6g}   (valid: {r['finsler_valid']})",
        f"  omega exact           {r['omega_exact']}",
    ]
    for t in r["geodesics"]:
        lines.append(f"  {t['name']:<12} Frechet distance to great circle {t['residual']:.3e}")
    lines.append(f"  classification        {r['classification']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def build_parser():
    p = _Parser(prog="projsphere", description="Verify the projective group of S^n / <b>.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--format", choices=("json", "text"), default="text")
        sp.add_argument("--tol-rank", type=_positive_float, default=Tolerances.rank)
        sp.add_argument("--dt", type=_positive_float, default=Tolerances.dt)

    v = sub.add_parser("verify", help="run all certificates for one n")
    v.add_argument("--n", type=int, required=True)
    common(v)

    vr = sub.add_parser("verify-range", help="run all certificates for a range of n")
    vr.add_argument("--from", dest="n_from", type=int, default=2)
    vr.add_argument("--to", dest="n_to", type=int, default=8)
    vr.add_argument("--jobs", type=int, default=1)
    common(vr)

    rc = sub.add_parser("randers-check", help="classify a Randers metric from a JSON config")
    rc.add_argument("--config", required=True)
    common(rc)

    d = sub.add_parser("dims", help="dimension formulas only")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--format", choices=("json", "text"), default="text")
    return p


def _check_n_arg(parser, n):
    if not 2 <= n <= MAX_N:
        parser.error(f"--n must lie in [2, {MAX_N}], got {n}")


def _verify_one(args):
    n, seed, tol = args
    try:
        return n, run_verify(n, seed, tol), None
    except (RankAmbiguityError, RankDisagreementError) as exc:
        return n, None, str(exc)


def _write(data):
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "dims":
        _check_n_arg(parser, args.n)
        dim_sl, dim_isom, pp = dimension_formulas(args.n)
        rec = {"n": args.n, "dim_sl": dim_sl, "dim_isom_bound": dim_isom, "dim_proj_prime": pp,
               "chain_holds": chain_holds(dim_isom, pp, dim_sl)}
        if args.format == "json":
            _write(to_json(rec).encode())
        else:
            _write((f"n = {args.n}\n  " + _chain_line(dim_isom, pp, dim_sl) + "\n").encode())
        return EXIT_OK

    tol = replace(Tolerances(), rank=args.tol_rank, dt=args.dt)

    if args.command == "verify":
        _check_n_arg(parser, args.n)
        _, report, err = _verify_one((args.n, args.seed, tol))
        if err:
            sys.stderr.write(f"numerical rank ambiguity: {err}\n")
            return EXIT_AMBIGUOUS
        _write(emit_report(report, args.format))
        return EXIT_OK if report.overall else EXIT_FAILED

    if args.command == "verify-range":
        if not 2 <= args.n_from <= args.n_to <= MAX_N:
            parser.error(f"need 2 <= --from <= --to <= {MAX_N}")
        jobs = [(n, args.seed, tol) for n in range(args.n_from, args.n_to + 1)]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                results = list(ex.map(_verify_one, jobs))
        else:
            results = [_verify_one(j) for j in jobs]
        code = EXIT_OK
        reports = []
        for n, report, err in sorted(results, key=lambda r: r[0]):
            if err:
                sys.stderr.write(f"n={n}: numerical rank ambiguity: {err}\n")
                code = EXIT_AMBIGUOUS
                continue
            reports.append(report)
            if not report.overall and code == EXIT_OK:
                code = EXIT_FAILED
        if args.format == "json":
            _write(to_json([r.to_dict() for r in reports]).encode())
        else:
            _write(b"\n".join(format_text(r).encode() for r in reports))
        return code

    if args.command == "randers-check":
        try:
            config = load_config(args.config)
            result = run_randers_check(config, args.seed, tol)
        except FinslerConditionError as exc:
            _write(to_json({"error": "finsler_condition_violated", "max_norm": exc.max_norm,
                            "message": str(exc)}).encode())
            return EXIT_USAGE
        except InvalidInputError as exc:
            sys.stderr.write(f"invalid config: {exc}\n")
            return EXIT_USAGE
        if args.format == "json":
            _write(to_json(result).encode())
        else:
            _write(format_randers_text(result).encode())
        return EXIT_OK if result["consistent"] else EXIT_FAILED

    parser.error(f"unknown command {args.command}")  # pragma: no cover


def run():  # console-script entry point
    try:
        sys.exit(main())
    except ProjSphereError as exc:
        sys.stderr.write(f"error: {exc}\n")
        sys.exit(EXIT_FAILED)
