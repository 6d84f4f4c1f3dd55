"""Service handlers: the functions behind the HTTP endpoints.

The CLI calls these directly when no remote server is configured, so the
request/response contract is identical either way.
"""

from __future__ import annotations

from ..clifford import parse_class
from ..damek_ricci import build_space, verify_space_axioms
from ..exactla import ExactMatrix, Subspace
from ..polarity import (
    EXACT,
    Arith,
    PolarityInputError,
    PolarityReport,
    RepAction,
    SubalgebraSpec,
    Witness,
    check_foliation_polar,
    check_main,
    check_mthm,
    check_pasl_action,
    classify,
    construct_cor_pfol,
    construct_cor_psgo,
    float_arith,
    is_totally_geodesic,
    pasl_polar_expected,
    rep_polar_expected,
)
from .schemas import (
    CheckRequest,
    CheckResponse,
    ClassifyRequest,
    ClassifyResponse,
    SummaryRow,
    VerifyRequest,
    VerifyResponse,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_INCONCLUSIVE = 3

_VERDICT_EXIT = {"polar": EXIT_OK, "non-polar": EXIT_NEGATIVE, "inconclusive": EXIT_INCONCLUSIVE}


def _arith(req) -> Arith:
    if req.arith == "float":
        return float_arith(req.tol)
    return EXACT


def _subspace(payload, default_dim: int | None = None) -> Subspace:
    if payload is None:
        if default_dim is None:
            raise PolarityInputError("missing required basis payload")
        return Subspace.zero(default_dim)
    return Subspace.from_json(payload.model_dump())


def _rep(payload, carrier_dim: int) -> RepAction:
    if payload is None:
        return RepAction(carrier_dim, (), name="trivial")
    gens = tuple(ExactMatrix(g) for g in payload.generators)
    return RepAction(payload.carrier_dim, gens, name="q")


def run_verify(req: VerifyRequest) -> VerifyResponse:
    space = build_space(parse_class(req.space, "S"))
    results = verify_space_axioms(space, seed=req.seed, samples=req.samples)
    return VerifyResponse(
        space=space.name(),
        passed=all(r.passed for r in results),
        axioms=[r.to_json() for r in results],
    )


def run_check(req: CheckRequest) -> CheckResponse:
    space = build_space(parse_class(req.space, "S"))
    arith = _arith(req)
    crit = req.criterion
    if crit == "tg":
        spec = SubalgebraSpec(
            space,
            Subspace.full(1),
            _subspace(req.vprime, space.v_dim),
            _subspace(req.zprime, space.z_dim),
        )
        ok, cert = is_totally_geodesic(spec)
        report = PolarityReport(
            space=space.name(),
            action="totally geodesic subgroup test for exp(a + v' + z')",
            verdict="polar" if ok else "non-polar",
            seed=req.seed,
            witnesses=[Witness("j_zprime_vprime_invariant", ok, cert)],
        )
        if ok:
            from ..polarity import _subalgebra_tangent

            report.section = _subalgebra_tangent(spec)
        return CheckResponse(
            report=report.to_json(), exit_code=EXIT_OK if ok else EXIT_NEGATIVE
        )
    if crit == "foliation":
        report = check_foliation_polar(
            space,
            _subspace(req.vprime, space.v_dim),
            _subspace(req.zprime, space.z_dim),
            seed=req.seed,
            arith=arith,
        )
    elif crit == "pasl":
        report = check_pasl_action(space, seed=req.seed, arith=arith)
    elif crit == "mthm":
        if req.w is None:
            raise PolarityInputError("criterion mthm requires --w")
        report = check_mthm(
            space,
            _subspace(req.w),
            _rep(req.q, space.v_dim),
            seed=req.seed,
            arith=arith,
        )
    elif crit == "main":
        if req.w is None:
            raise PolarityInputError("criterion main requires --w")
        b = Subspace.full(1) if req.b == "a" else Subspace.zero(1)
        report = check_main(
            space,
            b,
            _subspace(req.w),
            _rep(req.q, space.v_dim),
            seed=req.seed,
            arith=arith,
        )
    elif crit == "pfol":
        _, report = construct_cor_pfol(space, seed=req.seed, arith=arith)
    elif crit == "psgo":
        _, report = construct_cor_psgo(space, seed=req.seed, arith=arith)
    else:  # pragma: no cover
        raise PolarityInputError(f"unknown criterion {crit!r}")
    return CheckResponse(
        report=report.to_json(), exit_code=_VERDICT_EXIT[report.verdict]
    )


def run_classify(req: ClassifyRequest) -> ClassifyResponse:
    arith = _arith(req)
    entries = classify(req.m_max, req.k_max, seed=req.seed, arith=arith)
    summary = []
    all_match = True
    any_inconclusive = False
    for e in entries:
        exp_rep = rep_polar_expected(e.cls)
        exp_pasl = "polar" if pasl_polar_expected(e.cls) else "non-polar"
        verdict = e.report.verdict
        if verdict == "inconclusive" or e.rep_polar is None:
            any_inconclusive = True
        match = e.rep_polar == exp_rep and verdict == exp_pasl
        all_match = all_match and match
        summary.append(
            SummaryRow(
                space=e.space_name,
                rep_polar=e.rep_polar,
                rep_expected=exp_rep,
                pasl_verdict=verdict,
                pasl_expected=exp_pasl,
                match=match,
            )
        )
    return ClassifyResponse(
        entries=[e.to_json() for e in entries],
        summary=summary,
        all_match=all_match,
        any_inconclusive=any_inconclusive,
    )
