"""Pydantic request/response models for the verification service.

Rationals travel as strings "p/q" (or "p"); subspaces as
{ambient_dim, basis: [[rational strings]]} with one inner list per basis
vector; representations as a carrier dimension plus a list of square
matrices.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class BasisPayload(BaseModel):
    ambient_dim: int
    basis: list[list[str]] = []


class RepPayload(BaseModel):
    carrier_dim: int
    generators: list[list[list[str]]] = []


class VerifyRequest(BaseModel):
    space: str
    seed: int = 0
    samples: int = 100


class AxiomModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    axiom: str
    passed: bool = Field(alias="pass")
    witness: Optional[dict] = None


class VerifyResponse(BaseModel):
    space: str
    passed: bool
    axioms: list[AxiomModel]


class WitnessModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    condition: str
    passed: bool = Field(alias="pass")
    certificate: Optional[dict] = None


class ReportModel(BaseModel):
    space: str
    action: str
    verdict: Literal["polar", "non-polar", "inconclusive"]
    seed: int
    witnesses: list[WitnessModel]
    cohomogeneity: Optional[int] = None
    section_basis: Optional[dict] = None
    section_note: Optional[str] = None


class CheckRequest(BaseModel):
    space: str
    criterion: Literal["tg", "foliation", "pasl", "mthm", "main", "pfol", "psgo"]
    seed: int = 0
    arith: Literal["exact", "float"] = "exact"
    tol: float = 1e-9
    w: Optional[BasisPayload] = None
    vprime: Optional[BasisPayload] = None
    zprime: Optional[BasisPayload] = None
    q: Optional[RepPayload] = None
    b: Literal["0", "a"] = "a"


class CheckResponse(BaseModel):
    report: ReportModel
    exit_code: int


class ClassifyRequest(BaseModel):
    m_max: int
    k_max: int
    seed: int = 0
    arith: Literal["exact", "float"] = "exact"
    tol: float = 1e-9


class SummaryRow(BaseModel):
    space: str
    rep_polar: Optional[bool]
    rep_expected: bool
    pasl_verdict: str
    pasl_expected: str
    match: bool


class ClassifyResponse(BaseModel):
    entries: list[dict]
    summary: list[SummaryRow]
    all_match: bool
    any_inconclusive: bool
