"""Command line front end: ``deraz run JOB`` and ``deraz verify-certificate JOB REPORT``.

Exit codes: 0 pass or constructed, 1 fail with a witness, 2 not established
or a cap was hit, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import __version__
from .azumaya import (Unsupported, is_compact_generator, is_smooth, trivialization_search, verify_azumaya,
                      verify_morita_witness)
from .complexes import LIMITS, CapExceeded, FreeComplex, cone, homology, is_acyclic, koszul
from .cring import PointSpec, is_nilpotent
from .descent import polynomial_coefficients, sigma_orbit_covering_check, splitting_algebra
from .dgalg import azumaya_structure_map
from .glue import (GluedComplex, WindowError, glue_generator_two_patch, global_sections_dg_algebra,
                   hypercohomology, orthogonality_check, verify_local_generator)
from .jobs import Job, JobError, _as_list, _elem, _text, load_job
from .scalars import Matrix, kernel_basis, rank, solve

SCHEMA = "deraz-report/1"

EXIT_PASS, EXIT_FAIL, EXIT_OPEN, EXIT_INPUT = 0, 1, 2, 3
VERDICT_NAMES = {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_OPEN: "not-established", EXIT_INPUT: "input-error"}


@dataclass
class Report:
    task: str
    subject: str
    exit_code: int
    summary: str
    certificate: dict = field(default_factory=dict)
    timing: float | None = None

    @property
    def verdict(self) -> str:
        return VERDICT_NAMES[self.exit_code]

    def as_dict(self) -> dict:
        d = {"schema": SCHEMA, "version": __version__, "task": self.task, "subject": self.subject,
             "verdict": self.verdict, "exit_code": self.exit_code, "summary": self.summary,
             "certificate": self.certificate}
        if self.timing is not None:
            d["timing_seconds"] = round(self.timing, 3)
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"deraz {__version__} report ({SCHEMA})"]
        d = self.as_dict()
        for k in ("task", "subject", "verdict", "exit_code", "summary"):
            lines.append(f"{k}: {d[k]}")
        lines.append("certificate:")
        _render(self.certificate, 1, lines)
        if self.timing is not None:
            lines.append(f"timing: {self.timing:.3f} s")
        return "\n".join(lines) + "\n"


def _render(obj, depth: int, lines: list):
    pad = "  " * depth
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                _render(v, depth + 1, lines)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                _render(v, depth + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar(v)}")


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _s(x) -> str:
    return str(x)


def _point(pt: PointSpec) -> dict:
    return {"kind": "point", "values": {v: _s(x) for v, x in zip(pt.alg.variables, pt.values)}}


def _dims(d: dict | None) -> dict:
    return {str(k): v for k, v in (d or {}).items()}


# tasks -------------------------------------------------------------------------------------

def _param(job: Job, key: str, default):
    v = job.task.get(key)
    if v is None:
        return default
    if v.kind != "num" or not isinstance(v.data, int):
        raise JobError(f"{key} must be an integer", v.line, v.col)
    return v.data


def _generator_certificate(g) -> dict:
    cert = {"method": g.method, "euler_characteristic": g.euler,
            "support_ideal": [_s(x) for x in g.support]}
    if not g.holds:
        if g.witness_point is not None:
            cert["witness"] = _point(g.witness_point)
        else:
            cert["witness"] = {"kind": "ideal-generator", "element": _s(g.witness_element)}
    return cert


def task_check_azumaya(job: Job, opts) -> Report:
    name = job.task.require("algebra")
    B = job.lookup(name, ("dgalgebra",))
    v = verify_azumaya(B)
    cert = {"az1": {"holds": v.az1.holds, **_generator_certificate(v.az1)},
            "az2": {"holds": v.az2.holds, "cone_homology": _dims(v.az2.cone_dimensions),
                    "nonzero_degrees": list(v.az2.nonzero_degrees)}}
    if not v.az2.holds:
        cert["az2"]["witness"] = {"kind": "degree", "degree": v.az2.nonzero_degrees[0]}
    return Report(job.task_name, name.data, EXIT_PASS if v.overall else EXIT_FAIL, v.summary(), cert)


def task_check_smooth(job: Job, opts) -> Report:
    name = job.task.require("algebra")
    B = job.lookup(name, ("dgalgebra",))
    r = is_smooth(B, _param(job, "depth_bound", opts.depth_bound))
    cert = {"status": r.status, "length": r.length, "generators": list(r.generators), "depth_bound": r.bound}
    return Report(job.task_name, name.data, EXIT_PASS if r.smooth else EXIT_OPEN, r.summary(), cert)


def _morita_certificate(v) -> dict:
    cert = {"holds": v.holds}
    if v.generator is not None:
        cert["generator"] = _generator_certificate(v.generator)
    if v.witness_element is not None:
        cert["witness"] = {"kind": "central-element", "coordinates": [_s(x) for x in v.witness_element]}
    if v.comparison is not None:
        cert["comparison"] = {"holds": v.comparison.holds, "cone_homology": _dims(v.comparison.cone_dimensions)}
    if v.end_dimensions is not None:
        cert["end_dimensions"] = _dims(v.end_dimensions)
    return cert


def task_check_morita(job: Job, opts) -> Report:
    if job.task.get("witness") is None:
        return task_trivialize(job, opts)
    name = job.task.require("witness")
    w = job.lookup(name, ("witness",))
    v = verify_morita_witness(w)
    return Report(job.task_name, name.data, EXIT_PASS if v.holds else EXIT_FAIL, v.summary(), _morita_certificate(v))


def task_trivialize(job: Job, opts) -> Report:
    name = job.task.require("algebra")
    B = job.lookup(name, ("dgalgebra",))
    r = trivialization_search(B, _param(job, "rank_bound", opts.rank_bound), _param(job, "budget", opts.budget))
    cert = {"candidates_tried": r.candidates_tried}
    if r.witness is None:
        return Report(job.task_name, name.data, EXIT_OPEN,
                      "not established (no idempotent within the search bounds gives a witness)", cert)
    cert["idempotent"] = [_s(x) for x in r.idempotent]
    cert["module_rank"] = r.witness.module.total_rank
    cert["verification"] = _morita_certificate(r.verdict)
    return Report(job.task_name, name.data, EXIT_PASS,
                  f"trivialized by e = {[_s(x) for x in r.idempotent]}: {r.verdict.summary()}", cert)


def task_koszul(job: Job, opts) -> Report:
    A = job.lookup(job.task.require("over"), ("algebra",))
    fs = [_elem(A, v) for v in _as_list(job.task.require("elements"))]
    K = koszul(A, fs)
    o = orthogonality_check(K, fs)
    acyclic = {}
    for f in fs:
        if f:
            acyclic[_s(f)] = is_acyclic(K.localize(f))
    cert = {"ranks": list(K.ranks), "lowest_degree": K.lo, "homology": homology(K).summary(),
            "orthogonal": o.per_open, "degenerate": o.degenerate, "acyclic_on_opens": acyclic}
    ok = o.holds and all(acyclic.values())
    code = EXIT_PASS if ok else (EXIT_OPEN if o.degenerate else EXIT_FAIL)
    return Report(job.task_name, job.task.require("over").data, code, o.summary(), cert)


def task_support(job: Job, opts) -> Report:
    name = job.task.require("complex")
    E = job.lookup(name, ("complex",))
    if not isinstance(E, FreeComplex):
        raise JobError("support needs a complex on one ring", name.line, name.col)
    g = is_compact_generator(E)
    return Report(job.task_name, name.data, EXIT_PASS if g.holds else EXIT_FAIL, g.summary(), _generator_certificate(g))


def task_glue_generator(job: Job, opts) -> Report:
    name = job.task.require("scheme")
    X = job.lookup(name, ("scheme",))
    U = X.names[0]
    if job.task.get("generator") is not None:
        E_U = job.lookup(job.task.get("generator"), ("complex",))
    else:
        E_U = FreeComplex(X.patches[U], 0, [1])
    G = glue_generator_two_patch(X, E_U)
    v = verify_local_generator(X, G)
    cert = {"patches": {k: {"lowest_degree": C.lo, "ranks": list(C.ranks)} for k, C in G.parts.items()},
            "total_rank": G.total_rank,
            "local_generator": {k: _generator_certificate(g) for k, g in v.per_patch.items()}}
    return Report(job.task_name, name.data, EXIT_PASS if v.holds else EXIT_FAIL, v.summary(), cert)


def task_cech(job: Job, opts) -> Report:
    X = job.lookup(job.task.require("scheme"), ("scheme",))
    name = job.task.require("complex")
    E = job.lookup(name, ("complex",))
    if not isinstance(E, GluedComplex):
        raise JobError("cech needs a complex defined on the scheme", name.line, name.col)
    w = _param(job, "window", opts.window)
    try:
        dims = hypercohomology(X, E, w)
    except WindowError as e:
        return Report(job.task_name, name.data, EXIT_OPEN, f"not established ({e})",
                      {"window": w, "suggested_window": e.suggested})
    cert = {"window": w, "hypercohomology": _dims(dims)}
    summary = ", ".join(f"H^{n}={d}" for n, d in dims.items()) or "zero"
    v = job.task.get("endomorphisms")
    if v is not None and v.kind == "ident" and v.data == "true":
        gs = global_sections_dg_algebra(X, E, w)
        cert["endomorphism_algebra"] = {"dimensions": _dims(gs.dimensions), "proper": gs.proper}
        summary += f"; End: {gs.summary()}"
    return Report(job.task_name, name.data, EXIT_PASS, summary, cert)


def task_splitting_algebra(job: Job, opts) -> Report:
    A = job.lookup(job.task.require("over"), ("algebra",))
    p = _text(job.task.require("polynomial"))
    S = splitting_algebra(A, p)
    res = S.factorization_residues()
    cert = {"degree": S.degree, "rank": S.rank, "expected_rank": factorial(S.degree),
            "factorization_residues": [_s(r) for r in res],
            "relations": [S.algebra.free_cover().format(r) for r in S.algebra.relations]}
    ok = S.rank == factorial(S.degree) and not any(res)
    summary = f"rank {S.rank} over the base; factorization {'verified' if not any(res) else 'fails'}"
    if job.task.get("open") is not None:
        c = _text(job.task.get("open"))
        cov = sigma_orbit_covering_check(S, c)
        cert["covering"] = {"holds": cov.holds, "points_checked": cov.checked, "note": cov.note}
        if cov.witness is not None:
            cert["covering"]["witness"] = _point(cov.witness)
        summary += f"; covering {'holds' if cov.holds else 'fails'} on {cov.checked} points"
        ok = ok and cov.holds
    return Report(job.task_name, p, EXIT_PASS if ok else EXIT_FAIL, summary, cert)


TASKS = {
    "check-azumaya": task_check_azumaya,
    "check-morita": task_check_morita,
    "check-smooth": task_check_smooth,
    "koszul": task_koszul,
    "support": task_support,
    "glue-generator": task_glue_generator,
    "cech": task_cech,
    "splitting-algebra": task_splitting_algebra,
    "trivialize": task_trivialize,
}


def run_text(text: str, opts=None) -> Report:
    opts = opts or default_options()
    start = time.perf_counter()
    try:
        job = load_job(text)
        fn = TASKS.get(job.task_name)
        if fn is None:
            t = job.task
            raise JobError(f"unknown task {job.task_name!r}", t.line, t.col)
        rep = fn(job, opts)
    except JobError as e:
        rep = Report("?", "?", EXIT_INPUT, f"input error: {e}")
    except CapExceeded as e:
        rep = Report("?", "?", EXIT_OPEN, f"not established (cap exceeded: {e})")
    except Exception as e:  # anything the library rejects as input

        if isinstance(e, (Unsupported,)):
            rep = Report("?", "?", EXIT_OPEN, f"not established (unsupported: {e})")
        else:
            rep = Report("?", "?", EXIT_INPUT, f"input error: {type(e).__name__}: {e}")
    if getattr(opts, "timing", False):
        rep.timing = time.perf_counter() - start
    return rep


def default_options():
    return argparse.Namespace(json=False, threads=1, timing=False, rank_cap=LIMITS.rank_cap, depth_bound=4,
                              rank_bound=4, budget=200000, window=8)


# certificate checking ----------------------------------------------------------------------

def _fiber_acyclic(E: FreeComplex, pt: PointSpec) -> bool:
    """Direct rank count of the fiber complex, independent of the homology module."""
    F = E.base.field
    vals = pt.values
    ranks = {}
    for i in range(E.lo, E.hi):
        d = E.d(i)
        M = Matrix(F, [[a.evaluate(vals) for a in r] for r in d.rows()], d.ncols, check=False)
        ranks[i] = rank(M)
    return all(E.rank(i) == ranks.get(i, 0) + ranks.get(i - 1, 0) for i in E.degrees)


def _kills_homology(W, z) -> bool:
    """``e -> e.z`` maps cycles of ``E`` into boundaries (field coefficients)."""
    E = W.module
    F = E.base.field
    n = E.total_rank
    act = Matrix(F, [[F.zero] * n for _ in range(n)], n, check=False)
    for q, c in enumerate(z):
        if c:
            M = W.action[q]
            act = act + Matrix(F, [[a.constant_value() for a in r] for r in M.rows()], n, check=False).scale(
                c.constant_value())
    offs = E.offsets()
    D = [[F.zero] * n for _ in range(n)]
    for i in range(E.lo, E.hi):
        d = E.d(i)
        for a in range(d.nrows):
            for b in range(d.ncols):
                D[offs[i + 1] + a][offs[i] + b] = d[a, b].constant_value()
    Dm = Matrix(F, D, n, check=False)
    K = kernel_basis(Dm)
    for j in range(K.ncols):
        img = act.apply(list(K.column(j)))
        if any(img) and solve(Dm, img) is None:
            return False
    return True


def _parse_point(alg, values: dict) -> PointSpec:
    return PointSpec(alg, {k: alg.field(Fraction(v)) for k, v in values.items()})


def check_certificate(text: str, report: dict, opts=None) -> tuple[bool, str]:
    """Re-validate the witness of a failing report, or re-run a passing one."""
    try:
        return _check_certificate(text, report, opts or default_options())
    except (KeyError, TypeError, IndexError, ValueError, ArithmeticError) as e:
        return False, f"malformed certificate ({type(e).__name__}: {e})"


def _check_certificate(text: str, report: dict, opts) -> tuple[bool, str]:
    job = load_job(text)
    task = report.get("task")
    if task != job.task_name:
        return False, "report was produced for a different task"
    cert = report.get("certificate", {})
    code = report.get("exit_code")
    if code == EXIT_FAIL:
        if task == "check-azumaya":
            B = job.lookup(job.task.require("algebra"))
            if not cert["az1"]["holds"]:
                w = cert["az1"]["witness"]
                if w["kind"] == "point":
                    pt = _parse_point(B.base, w["values"])
                    return _fiber_acyclic(B.complex, pt), f"fiber of B at {pt} is acyclic"
                g = B.base.parse(w["element"])
                return not is_nilpotent(g), f"{g} is not nilpotent"
            deg = cert["az2"]["witness"]["degree"]
            rep = homology(cone(azumaya_structure_map(B)))
            return not rep[deg].is_zero, f"dense cone homology in degree {deg} is nonzero"
        if task == "support":
            E = job.lookup(job.task.require("complex"))
            w = cert["witness"]
            if w["kind"] == "point":
                pt = _parse_point(E.base, w["values"])
                return _fiber_acyclic(E, pt), f"fiber at {pt} is acyclic"
            g = E.base.parse(w["element"])
            return not is_nilpotent(g), f"{g} is not nilpotent"
        if task == "splitting-algebra":

            A = job.lookup(job.task.require("over"))
            S = splitting_algebra(A, _text(job.task.require("polynomial")))
            w = cert.get("covering", {}).get("witness")
            if w is None:
                res = [S.algebra.parse(r) for r in cert["factorization_residues"]]
                return any(res) or cert["rank"] != cert["expected_rank"], "rank or factorization mismatch"
            pt = _parse_point(S.algebra, w["values"])
            cs = polynomial_coefficients(A, _text(job.task.require("open")))
            vals = []
            for x in S.roots:
                v = S.algebra.zero
                for k, a in enumerate(cs):
                    v = v + S.inclusion(a) * x ** k
                vals.append(pt(v))
            return not any(vals), f"every conjugate of the open element vanishes at {pt}"
        if task == "check-morita":
            w = cert.get("witness")
            if w is None:
                return False, "no witness in a failing report"
            W = job.lookup(job.task.require("witness"))
            Bp = W.target
            z = [Bp.base.parse(x) for x in w["coordinates"]]
            central = all(Bp.mul(z, Bp.basis_vector(q)) == Bp.mul(Bp.basis_vector(q), z) for q in range(Bp.dim))
            p = z
            for _ in range(Bp.dim + 1):
                p = Bp.mul(p, z)
            return central and any(p) and _kills_homology(W, z), \
                "the element is central, not nilpotent and acts by zero on H(E)"
        # remaining failures carry patchwise generator certificates
        rep = run_text(text, opts)
        return rep.exit_code == code, "re-run reproduces the failure"
    rep = run_text(text, opts)
    same = rep.exit_code == code and rep.certificate == cert
    return same, "re-run reproduces the verdict and certificate"


# entry point ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deraz", description="Derived Azumaya algebra checks and constructions.")
    p.add_argument("--version", action="version", version=f"deraz {__version__}")
    sub = p.add_subparsers(dest="command")
    r = sub.add_parser("run", help="run the task of a job file")
    r.add_argument("job")
    r.add_argument("--json", action="store_true", help="structured output")
    r.add_argument("--output", "-o", help="write the report to this file")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--timing", action="store_true", help="append wall-clock timing (breaks byte equality)")
    r.add_argument("--rank-cap", type=int, default=LIMITS.rank_cap)
    r.add_argument("--depth-bound", type=int, default=4)
    r.add_argument("--rank-bound", type=int, default=4)
    r.add_argument("--budget", type=int, default=200000)
    r.add_argument("--window", type=int, default=8)
    v = sub.add_parser("verify-certificate", help="re-check the witness in a JSON report")
    v.add_argument("job")
    v.add_argument("report")
    v.add_argument("--threads", type=int, default=1)
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    old = (LIMITS.threads, LIMITS.rank_cap)
    try:
        LIMITS.threads = max(1, args.threads)
        if args.command == "run":
            LIMITS.rank_cap = args.rank_cap
            try:
                text = _read(args.job)
            except OSError as e:
                print(f"input error: {e}", file=sys.stderr)
                return EXIT_INPUT
            rep = run_text(text, args)
            out = rep.to_json() if args.json else rep.to_text()
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(out)
            else:
                sys.stdout.write(out)
            return rep.exit_code
        # verify-certificate
        try:
            text = _read(args.job)
            report = json.loads(_read(args.report))
            load_job(text)
        except (OSError, ValueError) as e:
            print(f"input error: {e}", file=sys.stderr)
            return EXIT_INPUT
        ok, why = check_certificate(text, report)
        print(f"certificate {'valid' if ok else 'INVALID'}: {why}")
        return EXIT_PASS if ok else EXIT_FAIL
    finally:
        LIMITS.threads, LIMITS.rank_cap = old


if __name__ == "__main__":
    sys.exit(main())
