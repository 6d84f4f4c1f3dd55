"""Command-line client for the drspolar verification service.

Builds the same request models the HTTP API accepts and dispatches them
either in-process (default) or to a remote server (--server URL).  JSON
goes to stdout (byte-identical for identical command and seed); a short
human summary goes to stderr.

Exit codes: 0 pass/polar, 1 axiom failure/non-polar/classify mismatch,
2 malformed input, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys

from .clifford import SpecParseError
from .exactla import LinAlgError, json_dumps_canonical
from .service import core, schemas


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _basis_arg(path: str | None):
    if path is None:
        return None
    return schemas.BasisPayload(**_load_json(path))


def _rep_arg(path: str | None):
    if path is None:
        return None
    return schemas.RepPayload(**_load_json(path))


class _Remote:
    def __init__(self, base_url: str):
        import httpx

        self.client = httpx.Client(base_url=base_url, timeout=600.0)

    def post(self, endpoint: str, req, response_model):
        resp = self.client.post(f"/{endpoint}", json=req.model_dump())
        if resp.status_code == 422:
            detail = resp.json().get("detail", {})
            raise SpecParseError(str(detail))
        resp.raise_for_status()
        return response_model(**resp.json())


def _dispatch(args, endpoint: str, req, handler, response_model):
    if args.server:
        return _Remote(args.server).post(endpoint, req, response_model)
    return handler(req)


def _emit(args, payload: dict, human: str) -> None:
    if args.format == "md":
        sys.stdout.write(human + "\n")
    else:
        sys.stdout.write(json_dumps_canonical(payload) + "\n")
    sys.stderr.write(human + "\n")


def cmd_verify(args) -> int:
    req = schemas.VerifyRequest(space=args.space, seed=args.seed)
    resp = _dispatch(args, "verify", req, core.run_verify, schemas.VerifyResponse)
    lines = [f"# axiom report for {resp.space}", ""]
    for ax in resp.axioms:
        mark = "pass" if ax.passed else "FAIL"
        lines.append(f"- {ax.axiom}: {mark}")
        if ax.witness:
            lines.append(f"  witness: {json.dumps(ax.witness)}")
    lines.append("")
    lines.append(f"overall: {'pass' if resp.passed else 'FAIL'}")
    _emit(args, resp.model_dump(by_alias=True), "\n".join(lines))
    return 0 if resp.passed else 1


def _witness_lines(report: schemas.ReportModel) -> list[str]:
    out = []
    for w in report.witnesses:
        mark = "pass" if w.passed else "FAIL"
        out.append(f"- {w.condition}: {mark}")
        if w.certificate:
            out.append(f"  certificate: {json.dumps(w.certificate, sort_keys=True)}")
    return out


def cmd_check(args) -> int:
    req = schemas.CheckRequest(
        space=args.space,
        criterion=args.criterion,
        seed=args.seed,
        arith=args.arith,
        tol=args.tol,
        w=_basis_arg(args.w),
        vprime=_basis_arg(args.vprime),
        zprime=_basis_arg(args.zprime),
        q=_rep_arg(args.q),
        b=args.b,
    )
    resp = _dispatch(args, "check", req, core.run_check, schemas.CheckResponse)
    rep = resp.report
    lines = [f"# {rep.action}", "", f"verdict: {rep.verdict}"]
    if rep.cohomogeneity is not None:
        lines.append(f"cohomogeneity: {rep.cohomogeneity}")
    if rep.section_note:
        lines.append(f"section: {rep.section_note}")
    lines.extend(_witness_lines(rep))
    _emit(args, resp.model_dump(by_alias=True), "\n".join(lines))
    return resp.exit_code


def cmd_classify(args) -> int:
    req = schemas.ClassifyRequest(
        m_max=args.m_max, k_max=args.k_max, seed=args.seed,
        arith=args.arith, tol=args.tol,
    )
    resp = _dispatch(args, "classify", req, core.run_classify, schemas.ClassifyResponse)
    lines = [
        "| space | A(N)0|v polar | expected | action verdict | expected | status |",
        "|---|---|---|---|---|---|",
    ]
    for row in resp.summary:
        status = "MATCH" if row.match else "MISMATCH"
        lines.append(
            f"| {row.space} | {row.rep_polar} | {row.rep_expected} "
            f"| {row.pasl_verdict} | {row.pasl_expected} | {status} |"
        )
    human = "\n".join(lines)
    _emit(args, resp.model_dump(by_alias=True), human)
    hard_mismatch = any(
        not r.match and r.pasl_verdict != "inconclusive" and r.rep_polar is not None
        for r in resp.summary
    )
    if hard_mismatch:
        return 1
    if resp.any_inconclusive:
        return 3
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", help="remote service URL; default is in-process")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for sampling")
    common.add_argument("--format", choices=["json", "md"], default="json")
    common.add_argument("--arith", choices=["exact", "float"], default="exact")
    common.add_argument("--tol", type=float, default=1e-9, help="float-path tolerance")

    p = argparse.ArgumentParser(prog="drspolar", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser(
        "verify", parents=[common], help="run the full axiom suite for a space"
    )
    v.add_argument("--space", required=True, help='e.g. "S(3,1,0)" or "S(2,1)"')
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check", parents=[common], help="run one polarity criterion")
    c.add_argument("--space", required=True)
    c.add_argument(
        "--criterion",
        required=True,
        choices=["tg", "foliation", "pasl", "mthm", "main", "pfol", "psgo"],
    )
    c.add_argument("--w", help="basis file for w (subspace of v)")
    c.add_argument("--vprime", help="basis file for v'")
    c.add_argument("--zprime", help="basis file for z'")
    c.add_argument("--q", help="generator file for Q")
    c.add_argument("--b", choices=["0", "a"], default="a", help="b for criterion main")
    c.set_defaults(func=cmd_check)

    cl = sub.add_parser(
        "classify",
        parents=[common],
        help="sweep all classes and compare to the stated lists",
    )
    cl.add_argument("--m-max", type=int, required=True)
    cl.add_argument("--k-max", type=int, required=True)
    cl.set_defaults(func=cmd_classify)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (LinAlgError, ValueError, OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
