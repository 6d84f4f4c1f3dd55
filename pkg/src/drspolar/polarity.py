"""Polarity criteria and classification procedures for Damek-Ricci spaces.

The checks come in two layers:

* linear-representation polarity: at a certified-generic point x the
  normal space of the orbit is the candidate section, and the action is
  polar iff every generator maps the section into its orthogonal
  complement (an exact bilinear vanishing condition);
* space-level criteria: a subgroup whose Lie algebra is orthogonal to a
  totally geodesic subgroup acts polarly iff the slice representation is
  polar and the section satisfies J_X l ⊥ l for all X in z.

All verdicts are computed with exact rational arithmetic by default; a
floating-point shadow path (SVD ranks with a relative threshold) is
available for cross-checks and larger sweeps.

The derivation algebra of n (the Lie algebra of the metric-preserving
automorphism group) is computed exactly: the skew maps commuting with
every generator form the kernel of the map (P, R) -> R on the space of
derivations, and that map surjects onto so(z) via the explicit solutions
(G_i G_j / 2, E_ji - E_ij); so a certified commutant basis plus the
explicit spin part is a complete basis.
"""

from __future__ import annotations

import os
import random
from math import gcd
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clifford import (
    CliffordClass,
    commutant_complex_structure,
    skew_commutant_basis,
)
from .damek_ricci import DamekRicciSpace, build_space, nabla_left_invariant
from .exactla import (
    ExactMatrix,
    LinAlgError,
    Subspace,
    nullspace,
    nullspace_float,
    orth_complement,
    rank,
    rank_float,
    rat_to_str,
)
from .heisenberg import HeisenbergAlgebra, j_of


class GenericityError(RuntimeError):
    """Genericity certification failed within the resample budget."""


class InvarianceError(ValueError):
    """A supplied group does not leave the required subspace invariant."""


class PolarityInputError(ValueError):
    """Preconditions of a criterion are violated."""


@dataclass(frozen=True)
class Arith:
    kind: str = "exact"
    tol: float = 1e-9

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


EXACT = Arith("exact")


def float_arith(tol: float = 1e-9) -> Arith:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return Arith("float", tol)


@dataclass(frozen=True)
class SubalgebraSpec:
    """Candidate subgroup data: b <= a, v' <= v, z' <= z."""

    space: DamekRicciSpace
    b: Subspace
    v_prime: Subspace
    z_prime: Subspace

    def __post_init__(self):
        if self.b.ambient_dim != 1:
            raise PolarityInputError("b must live in the 1-dimensional a-line")
        if self.v_prime.ambient_dim != self.space.v_dim:
            raise PolarityInputError("v' has wrong ambient dimension")
        if self.z_prime.ambient_dim != self.space.z_dim:
            raise PolarityInputError("z' has wrong ambient dimension")


@dataclass(frozen=True)
class RepAction:
    """A Lie algebra of skew matrices acting on R^carrier_dim."""

    carrier_dim: int
    generators: tuple[ExactMatrix, ...]
    name: str = ""

    def __post_init__(self):
        for g in self.generators:
            if g.shape != (self.carrier_dim, self.carrier_dim):
                raise PolarityInputError("generator has wrong shape")
            if g.transpose() != -g:
                raise PolarityInputError("generators must be skew-symmetric")


def validate_closure(rep: RepAction) -> None:
    """Verify [g_i, g_j] lies in the span of the generators (rank condition)."""
    gens = rep.generators
    if len(gens) < 2:
        return
    flat = ExactMatrix([[x for row in g.entries for x in row] for g in gens])
    base_rank = rank(flat)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            br = gens[i] @ gens[j] - gens[j] @ gens[i]
            aug = flat.vstack(ExactMatrix([[x for row in br.entries for x in row]]))
            if rank(aug) != base_rank:
                raise PolarityInputError(
                    f"generator bracket [{i},{j}] leaves the span; not a Lie algebra basis"
                )


@dataclass(frozen=True)
class Witness:
    condition: str
    passed: bool
    certificate: dict | None = None

    def to_json(self) -> dict:
        out = {"condition": self.condition, "pass": self.passed}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


@dataclass
class PolarityReport:
    space: str
    action: str
    verdict: str  # polar | non-polar | inconclusive
    seed: int
    cohomogeneity: int | None = None
    section: Subspace | None = None
    section_note: str | None = None
    witnesses: list[Witness] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "space": self.space,
            "action": self.action,
            "verdict": self.verdict,
            "seed": self.seed,
            "witnesses": [w.to_json() for w in self.witnesses],
        }
        if self.cohomogeneity is not None:
            out["cohomogeneity"] = self.cohomogeneity
        if self.section is not None:
            out["section_basis"] = self.section.to_json()
        if self.section_note is not None:
            out["section_note"] = self.section_note
        return out


def _vec_json(v) -> list[str]:
    return [rat_to_str(Fraction(x)) for x in v]


# -- totally geodesic subgroups ------------------------------------------


def is_totally_geodesic(spec: SubalgebraSpec) -> tuple[bool, dict | None]:
    """True iff J_Z v' <= v' for all Z in z'; certificate on failure.

    Applies to connected Lie subgroups containing exp(a), so spec.b must
    be all of a and a + v' + z' is expected to be a subalgebra (i.e.
    [v',v'] <= z', see ``bracket_closure_z``); the criterion itself only
    interrogates the J-invariance condition.
    """
    if spec.b.dim != 1:
        raise PolarityInputError("the criterion covers subgroups containing exp(a)")
    space = spec.space
    for Z in spec.z_prime.basis.columns():
        JZ = j_of(space.heis, Z)
        for V in spec.v_prime.basis.columns():
            img = JZ.apply(V)
            if not spec.v_prime.contains_vector(img):
                outside = _component_outside(img, spec.v_prime)
                return False, {
                    "Z": _vec_json(Z),
                    "V": _vec_json(V),
                    "outside_component": _vec_json(outside),
                }
    return True, None


def _component_outside(vec, sub: Subspace):
    """vec minus its orthogonal projection onto sub."""
    if sub.dim == 0:
        return list(vec)
    B = sub.basis
    gram = B.transpose() @ B
    rhs = B.transpose().apply(vec)
    from .exactla import _solve_square

    coeffs = _solve_square(gram, rhs)
    proj = B.apply(coeffs)
    return [a - b for a, b in zip(vec, proj)]


def bracket_closure_z(space: DamekRicciSpace, v_prime: Subspace) -> Subspace:
    """span of [v', v'] inside z: the smallest z' making a + v' + z' a subalgebra."""
    from .heisenberg import bracket_v

    cols = v_prime.basis.columns()
    zvecs = [
        bracket_v(space.heis, u, w)
        for ii, u in enumerate(cols)
        for w in cols[ii + 1 :]
    ]
    return Subspace.span(space.z_dim, zvecs)


def totally_geodesic_connection_oracle(spec: SubalgebraSpec) -> bool:
    """Independent oracle: nabla_x y stays tangent for all basis x, y of t.

    t = a + v' + z'; containment is checked with the left-invariant
    Koszul connection.
    """
    space = spec.space
    tangent = _subalgebra_tangent(spec)
    basis = tangent.basis.columns()
    for x in basis:
        for y in basis:
            out = nabla_left_invariant(
                space, space.from_coords(x), space.from_coords(y)
            )
            if not tangent.contains_vector(out.coords()):
                return False
    return True


def _subalgebra_tangent(spec: SubalgebraSpec) -> Subspace:
    """b + v' + z' as a subspace of s."""
    space = spec.space
    s = space.s_dim
    cols = []
    for bcol in spec.b.basis.columns():
        cols.append([bcol[0]] + [Fraction(0)] * (s - 1))
    for vcol in spec.v_prime.basis.columns():
        cols.append([Fraction(0)] + list(vcol) + [Fraction(0)] * space.z_dim)
    for zcol in spec.z_prime.basis.columns():
        cols.append([Fraction(0)] * (1 + space.v_dim) + list(zcol))
    return Subspace.span(s, cols)


# -- derivation algebra --------------------------------------------------


def derivation_algebra(heis: HeisenbergAlgebra, seed: int = 0) -> RepAction:
    """Basis of the skew-symmetric block-preserving derivations of n.

    Solves D[U,V] = [DU,V] + [U,DV] for D = diag(P, R) exactly.  R is
    determined by P through [P, G_i] = -sum_j R_ij G_j, the R-projection
    surjects onto so(z) via the explicit spin solutions, and its kernel
    is the skew commutant; combining both gives a complete basis.
    """
    pairs = derivation_pairs(heis, seed)
    n, m = heis.v_dim, heis.z_dim
    gens = []
    for P, R in pairs:
        top = P.hstack(ExactMatrix.zeros(n, m))
        bot = ExactMatrix.zeros(m, n).hstack(R)
        gens.append(top.vstack(bot))
    return RepAction(n + m, tuple(gens), name="a(n)_0")


def derivation_pairs(
    heis: HeisenbergAlgebra, seed: int = 0
) -> list[tuple[ExactMatrix, ExactMatrix]]:
    """The derivation basis as (P on v, R on z) pairs."""
    n, m = heis.v_dim, heis.z_dim
    G = heis.module.generators
    out: list[tuple[ExactMatrix, ExactMatrix]] = []
    if n:
        # G_i G_j is twice the conventional spin element; the integer
        # scaling spans the same algebra and keeps all arithmetic integral
        for i in range(m):
            for j in range(i + 1, m):
                P = G[i] @ G[j]
                R = [[Fraction(0)] * m for _ in range(m)]
                R[i][j] = Fraction(-2)
                R[j][i] = Fraction(2)
                out.append((P, ExactMatrix(R)))
        rng = random.Random(seed)
        for C in skew_commutant_basis(heis.module, rng):
            out.append((C, ExactMatrix.zeros(m, m)))
        from .heisenberg import generators_int

        gens_np = generators_int(heis.module)
        for P, R in out:
            _assert_derivation(gens_np, P, R)
    else:
        for i in range(m):
            for j in range(i + 1, m):
                R = [[Fraction(0)] * m for _ in range(m)]
                R[i][j] = Fraction(-1)
                R[j][i] = Fraction(1)
                out.append((ExactMatrix.zeros(0, 0), ExactMatrix(R)))
    return out


def _assert_derivation(gens_np, P: ExactMatrix, R: ExactMatrix) -> None:
    """Check [G_k, P] = sum_l R_kl G_l exactly (the derivation property)."""
    m = len(gens_np)
    Pn = _to_int_array(P)
    for k in range(m):
        lhs = gens_np[k] @ Pn - Pn @ gens_np[k]
        rhs = np.zeros_like(Pn)
        for l in range(m):
            c = R.entries[k][l]
            if c:
                if c.denominator != 1:
                    raise ArithmeticError("derivation z-part must be integral here")
                rhs = rhs + int(c) * gens_np[l]
        if (lhs != rhs).any():
            raise ArithmeticError("constructed matrix is not a derivation")


def expected_derivation_dimension(cls: CliffordClass) -> int:
    """dim A(N)_0 from the classification of metric automorphism groups."""
    m = cls.m
    spin = m * (m - 1) // 2
    if cls.v_dim == 0:
        return spin
    r = m % 8
    if isinstance(cls.multiplicity, tuple):
        kp, km = cls.multiplicity
        if r == 3:
            return spin + kp * (2 * kp + 1) + km * (2 * km + 1)
        return spin + kp * (kp - 1) // 2 + km * (km - 1) // 2
    k = cls.multiplicity
    if r in (0, 6):
        return spin + k * (k - 1) // 2
    if r in (1, 5):
        return spin + k * k
    return spin + k * (2 * k + 1)


def restrict_to_v(der: RepAction, heis: HeisenbergAlgebra) -> RepAction:
    """The action of the derivation algebra on the v-block."""
    n = heis.v_dim
    gens = tuple(g.submatrix(range(n), range(n)) for g in der.generators)
    return RepAction(n, gens, name=der.name + "|v")


# -- generic points and linear polarity ----------------------------------


def _orbit_columns(rep: RepAction, x: Sequence) -> list:
    return [g.apply(x) for g in rep.generators]


def _orbit_dim(rep: RepAction, x: Sequence, arith: Arith) -> int:
    cols = _orbit_columns(rep, x)
    if not cols:
        return 0
    M = ExactMatrix.from_columns(cols)
    if arith.is_exact:
        return rank(M)
    return rank_float(M, arith.tol)


def certified_generic_point(
    rep: RepAction, rng, arith: Arith = EXACT, within: Subspace | None = None
) -> tuple[tuple, int]:
    """A point attaining the maximal orbit dimension, certified by agreement
    of three independent samples; raises GenericityError past the budget."""
    if within is None:
        within = Subspace.full(rep.carrier_dim)
    if within.dim == 0:
        return (tuple(Fraction(0) for _ in range(rep.carrier_dim)), 0)
    seen: list[tuple[tuple, int]] = []
    for _ in range(3 + 8):
        coords = [Fraction(rng.randint(-10, 10)) for _ in range(within.dim)]
        if all(c == 0 for c in coords):
            continue
        x = within.basis.apply(coords)
        d = _orbit_dim(rep, x, arith)
        seen.append((x, d))
        best = max(d for _, d in seen)
        if sum(1 for _, d in seen if d == best) >= 3:
            x_best = next(x for x, d in seen if d == best)
            return (x_best, best)
    raise GenericityError(
        f"orbit dimensions {[d for _, d in seen]} did not stabilize"
    )


def cohomogeneity(
    rep: RepAction, seed: int = 0, arith: Arith = EXACT, within: Subspace | None = None
) -> int:
    """carrier dimension minus the certified-generic orbit dimension."""
    if rep.carrier_dim < 1:
        raise PolarityInputError("carrier must be at least 1-dimensional")
    rng = random.Random(seed)
    dim = within.dim if within is not None else rep.carrier_dim
    _, orbit = certified_generic_point(rep, rng, arith, within)
    return dim - orbit


@dataclass
class PolarRepResult:
    polar: bool
    section: Subspace | None
    orbit_dim: int
    cohomogeneity: int
    witness: dict | None
    base_point: tuple
    section_float: np.ndarray | None = None


def is_polar_rep(
    rep: RepAction,
    seed: int | None = 0,
    arith: Arith = EXACT,
    within: Subspace | None = None,
    rng=None,
) -> PolarRepResult:
    """Polarity test for a linear representation of a compact algebra.

    At a certified-generic x the candidate section is the orthogonal
    complement of the orbit tangent span{Mx} inside the carrier (or the
    invariant subspace ``within``); the action is polar iff <My, w> = 0
    for every generator M and all y, w in the section.
    """
    if rng is None:
        rng = random.Random(seed)
    if within is None:
        within = Subspace.full(rep.carrier_dim)
    if within.dim == 0:
        return PolarRepResult(True, within, 0, 0, None, ())
    x, orbit = certified_generic_point(rep, rng, arith, within)
    cols = _orbit_columns(rep, x)
    if arith.is_exact:
        span = Subspace.span(rep.carrier_dim, cols) if cols else Subspace.zero(rep.carrier_dim)
        if not within.contains(span):
            raise InvarianceError("orbit leaves the invariant subspace")
        section = orth_complement(span, within)
        sec_cols = section.basis.columns()
        for gi, g in enumerate(rep.generators):
            gb = g @ section.basis
            prod = section.basis.transpose() @ gb
            if not prod.is_zero():
                a, b = _first_nonzero(prod)
                # prod[a][b] = <col_a, M col_b> = <M y, w> with y = col_b
                witness = {
                    "generator": gi,
                    "y": _vec_json(sec_cols[b]),
                    "w": _vec_json(sec_cols[a]),
                    "value": rat_to_str(prod.entries[a][b]),
                }
                return PolarRepResult(
                    False, None, orbit, within.dim - orbit, witness, x
                )
        return PolarRepResult(True, section, orbit, within.dim - orbit, None, x)
    # float path
    W = np.array([[float(v) for v in col] for col in within.basis.columns()]).T
    Wq, _ = np.linalg.qr(W)
    xf = np.array([float(v) for v in x])
    C = (
        np.array([[float(v) for v in c] for c in cols]).T
        if cols
        else np.zeros((rep.carrier_dim, 0))
    )
    coords = Wq.T @ C
    null = nullspace_float(coords.T, arith.tol)
    sec = Wq @ null
    for gi, g in enumerate(rep.generators):
        gf = g.to_float()
        prod = sec.T @ gf @ sec
        scale = max(1.0, np.abs(gf).max() * (np.abs(sec).max() ** 2) * sec.shape[0])
        if np.abs(prod).max() > arith.tol * scale:
            a, b = np.unravel_index(np.abs(prod).argmax(), prod.shape)
            witness = {
                "generator": gi,
                "value": repr(float(prod[a, b])),
            }
            return PolarRepResult(
                False, None, orbit, within.dim - orbit, witness, x, sec
            )
    sec_sub = _float_columns_to_subspace(sec)
    return PolarRepResult(True, sec_sub, orbit, within.dim - orbit, None, x, sec)


def _float_columns_to_subspace(cols: np.ndarray) -> Subspace | None:
    """Round a float orthonormal basis to rationals for reporting only."""
    if cols.shape[1] == 0:
        return Subspace.zero(cols.shape[0])
    vecs = [
        [Fraction(round(float(v) * 10**9), 10**9) for v in cols[:, j]]
        for j in range(cols.shape[1])
    ]
    try:
        return Subspace.span(cols.shape[0], vecs)
    except LinAlgError:
        return None


def _first_nonzero(M: ExactMatrix) -> tuple[int, int]:
    for i, row in enumerate(M.entries):
        for j, x in enumerate(row):
            if x != 0:
                return i, j
    raise ValueError("matrix is zero")


# -- space-level criteria -------------------------------------------------


def _embed_v_subspace(space: DamekRicciSpace, sub: Subspace) -> Subspace:
    """A subspace of v written in s-coordinates."""
    z = space.z_dim
    cols = [
        [Fraction(0)] + list(c) + [Fraction(0)] * z for c in sub.basis.columns()
    ]
    return Subspace.span(space.s_dim, cols)


def _section_a_plus_l(space: DamekRicciSpace, ell: Subspace | None) -> Subspace:
    """The subspace a + l of s (l a subspace of v; possibly zero)."""
    s = space.s_dim
    cols = [[Fraction(1)] + [Fraction(0)] * (s - 1)]
    if ell is not None:
        cols.extend(
            [Fraction(0)] + list(c) + [Fraction(0)] * space.z_dim
            for c in ell.basis.columns()
        )
    return Subspace.span(s, cols)


def _j_condition(
    space: DamekRicciSpace,
    section: Subspace | None,
    arith: Arith,
    section_float: np.ndarray | None = None,
) -> tuple[bool, dict | None]:
    """<J_X l, l> = 0 for all z-basis X; witness carries the generator index."""
    gens = space.heis.module.generators
    if arith.is_exact:
        if section is None or section.dim <= 1:
            return True, None
        B = section.basis
        cols = B.columns()
        for i, g in enumerate(gens):
            prod = B.transpose() @ (g @ B)
            if not prod.is_zero():
                a, b = _first_nonzero(prod)
                # prod[a][b] = <col_a, J col_b>, i.e. <J_{e_i} x, y> with x = col_b
                return False, {
                    "generator": i,
                    "x": _vec_json(cols[b]),
                    "y": _vec_json(cols[a]),
                    "value": rat_to_str(prod.entries[a][b]),
                }
        return True, None
    sec = section_float
    if sec is None or sec.shape[1] <= 1:
        return True, None
    for i, g in enumerate(gens):
        gf = g.to_float()
        prod = sec.T @ gf @ sec
        scale = max(1.0, float(np.abs(sec).max() ** 2) * sec.shape[0])
        if np.abs(prod).max() > arith.tol * scale:
            a, b = np.unravel_index(np.abs(prod).argmax(), prod.shape)
            return False, {"generator": i, "value": repr(float(prod[a, b]))}
    return True, None


def check_foliation_polar(
    space: DamekRicciSpace,
    v_prime: Subspace,
    z_prime: Subspace,
    seed: int = 0,
    arith: Arith = EXACT,
) -> PolarityReport:
    """Foliation criterion: polar iff z' = 0 and J_z v' ⊥ v' (all of z).

    Sigma = exp(a + v' + z') must be a proper totally geodesic subgroup.
    """
    if space.v_dim == 0:
        raise PolarityInputError("the foliation criterion requires v != 0")
    spec = SubalgebraSpec(space, Subspace.full(1), v_prime, z_prime)
    tg, cert = is_totally_geodesic(spec)
    if not tg:
        raise PolarityInputError(f"sigma is not totally geodesic: {cert}")
    if 1 + v_prime.dim + z_prime.dim >= space.s_dim:
        raise PolarityInputError("sigma must be a proper subgroup")
    witnesses = [Witness("sigma_totally_geodesic", True)]
    name = space.name()
    report = PolarityReport(
        space=name,
        action=f"left translations by H with h = (v-v')+(z-z') on {name}",
        verdict="polar",
        seed=seed,
    )
    z_zero = z_prime.dim == 0
    witnesses.append(
        Witness(
            "z_prime_zero",
            z_zero,
            None if z_zero else {"z_prime_dim": z_prime.dim},
        )
    )
    j_ok, j_wit = _j_condition(space, v_prime, EXACT)
    witnesses.append(Witness("j_z_vprime_perp_vprime", j_ok, j_wit))
    h_v = orth_complement(v_prime, Subspace.full(space.v_dim))
    h_z = orth_complement(z_prime, Subspace.full(space.z_dim))
    witnesses.append(
        Witness(
            "h_subalgebra",
            True,
            {"v_part": h_v.to_json(), "z_part": h_z.to_json()},
        )
    )
    report.witnesses = witnesses
    if z_zero and j_ok:
        report.verdict = "polar"
        report.section = _subalgebra_tangent(spec)
        report.cohomogeneity = 1 + v_prime.dim + z_prime.dim
    else:
        report.verdict = "non-polar"
    return report


def check_pasl_action(
    space: DamekRicciSpace,
    seed: int = 0,
    arith: Arith = EXACT,
    der_pairs_precomputed=None,
) -> PolarityReport:
    """Polarity of the A(N)_0 x L(Z)-action on S.

    The slice representation at e is the A(N)_0-action on v (plus a
    trivial a-summand): non-polar slice means non-polar action; a polar
    slice with section l gives a polar action iff J_z l ⊥ l.
    """
    rng = random.Random(f"{seed}:pasl")
    name = space.name()
    report = PolarityReport(
        space=name, action=f"A(N)_0 x L(Z) on {name}", verdict="polar", seed=seed
    )
    if space.v_dim == 0:
        report.cohomogeneity = 1
        report.section = _section_a_plus_l(space, None)
        report.witnesses = [
            Witness(
                "horosphere_foliation",
                True,
                {"note": "v = 0: N-action of cohomogeneity one"},
            )
        ]
        return report
    pairs = (
        der_pairs_precomputed
        if der_pairs_precomputed is not None
        else derivation_pairs(space.heis, seed)
    )
    rep_v = RepAction(space.v_dim, tuple(P for P, _ in pairs), name="a(n)_0|v")
    try:
        res = is_polar_rep(rep_v, arith=arith, rng=rng)
    except GenericityError as e:
        report.verdict = "inconclusive"
        report.witnesses = [
            Witness("genericity_certification", False, {"error": str(e)})
        ]
        return report
    report.witnesses.append(Witness("slice_rep_polar", res.polar, res.witness))
    report.witnesses.append(
        Witness("slice_rep_cohomogeneity", True, {"value": res.cohomogeneity})
    )
    if not res.polar:
        report.verdict = "non-polar"
        return report
    j_ok, j_wit = _j_condition(space, res.section, arith, res.section_float)
    report.witnesses.append(Witness("section_j_orthogonal", j_ok, j_wit))
    if not j_ok:
        report.verdict = "non-polar"
        return report
    report.verdict = "polar"
    report.section = (
        _section_a_plus_l(space, res.section) if res.section is not None else None
    )
    report.cohomogeneity = 1 + res.cohomogeneity
    return report


def _q_invariance(
    q: RepAction, w: Subspace, witnesses: list[Witness], complement: Subspace | None = None
) -> None:
    """Exact invariance check; for skew generators g(w) <= w iff
    g(w-perp) <= w-perp, so the smaller side is checked."""
    side = w
    if complement is not None and complement.dim < w.dim:
        side = complement
    for gi, g in enumerate(q.generators):
        if side.dim == 0:
            continue
        imgs = g @ side.basis
        aug = side.basis.hstack(imgs)
        if rank(aug) != side.dim:
            raise InvarianceError(
                f"generator {gi} does not leave the subspace invariant"
            )
    witnesses.append(Witness("q_leaves_w_invariant", True))


def _validate_q_membership(space: DamekRicciSpace, q: RepAction) -> None:
    """q must lie in the image of the derivation algebra on v."""
    pairs = derivation_pairs(space.heis)
    flat = ExactMatrix(
        [[x for row in P.entries for x in row] for P, _ in pairs]
    )
    base = rank(flat)
    for gi, g in enumerate(q.generators):
        aug = flat.vstack(ExactMatrix([[x for row in g.entries for x in row]]))
        if rank(aug) != base:
            raise PolarityInputError(
                f"q generator {gi} is not in the automorphism algebra's image on v"
            )


def check_mthm(
    space: DamekRicciSpace,
    w: Subspace,
    q: RepAction,
    seed: int = 0,
    arith: Arith = EXACT,
    validate_q: bool = True,
) -> PolarityReport:
    """Criterion for the Q x L(H)-action, h = w + z: polar iff Q acts
    polarly on v - w with a section l satisfying J_z l ⊥ l."""
    if w.ambient_dim != space.v_dim or q.carrier_dim != space.v_dim:
        raise PolarityInputError("w and q must live on v")
    rng = random.Random(f"{seed}:mthm")
    name = space.name()
    report = PolarityReport(
        space=name,
        action=f"Q x L(H) on {name}, h = w + z, dim w = {w.dim}",
        verdict="polar",
        seed=seed,
    )
    carrier = orth_complement(w, Subspace.full(space.v_dim))
    _q_invariance(q, w, report.witnesses, complement=carrier)
    if validate_q and q.generators:
        validate_closure(q)
        _validate_q_membership(space, q)
        report.witnesses.append(Witness("q_bracket_closed_in_derivations", True))
    report.witnesses.append(
        Witness("h_subalgebra", True, {"w": w.to_json(), "z_part": "all of z"})
    )
    try:
        res = is_polar_rep(q, arith=arith, within=carrier, rng=rng)
    except GenericityError as e:
        report.verdict = "inconclusive"
        report.witnesses.append(
            Witness("genericity_certification", False, {"error": str(e)})
        )
        return report
    report.witnesses.append(Witness("q_polar_on_v_minus_w", res.polar, res.witness))
    if not res.polar:
        report.verdict = "non-polar"
        return report
    j_ok, j_wit = _j_condition(space, res.section, arith, res.section_float)
    report.witnesses.append(Witness("section_j_orthogonal", j_ok, j_wit))
    if not j_ok:
        report.verdict = "non-polar"
        return report
    report.verdict = "polar"
    report.section = (
        _section_a_plus_l(space, res.section) if res.section is not None else None
    )
    report.cohomogeneity = 1 + res.cohomogeneity
    return report


def check_main(
    space: DamekRicciSpace,
    b: Subspace,
    w: Subspace,
    q: RepAction,
    seed: int = 0,
    arith: Arith = EXACT,
    validate_q: bool = True,
) -> PolarityReport:
    """The main sufficiency criterion for h = b + w + z, b <= a.

    For b = 0 this is the if-and-only-if subgroup criterion; for b = a
    it is sufficient only, so a failed hypothesis yields "inconclusive".
    """
    if b.ambient_dim != 1 or b.dim not in (0, 1):
        raise PolarityInputError("b must be a subspace of the line a")
    base = check_mthm(space, w, q, seed=seed, arith=arith, validate_q=validate_q)
    report = PolarityReport(
        space=base.space,
        action=f"Q x L(H) on {base.space}, h = b + w + z, dim b = {b.dim}, dim w = {w.dim}",
        verdict=base.verdict,
        seed=seed,
        witnesses=base.witnesses,
    )
    if base.verdict == "polar":
        report.section = base.section
        if b.dim == 0:
            report.cohomogeneity = base.cohomogeneity
            report.section_note = "section is exp(a + l)"
        else:
            report.cohomogeneity = base.cohomogeneity - 1
            report.section_note = (
                "section is a totally geodesic hypersurface of exp(a + l),"
                " orthogonal to the A-orbits"
            )
    elif base.verdict == "non-polar" and b.dim == 1:
        # the enlarged-group criterion is sufficient only
        report.verdict = "inconclusive"
        report.witnesses = report.witnesses + [
            Witness(
                "hypothesis_failed",
                False,
                {"note": "criterion is sufficient only for b = a"},
            )
        ]
    return report


def construct_cor_pfol(
    space: DamekRicciSpace, seed: int = 0, arith: Arith = EXACT
) -> tuple[SubalgebraSpec, PolarityReport]:
    """Codimension-two polar foliation: w = all but the last v-coordinate."""
    n = space.v_dim
    if n < 1:
        raise PolarityInputError("needs dim v >= 1")
    cols = [
        [Fraction(1 if i == j else 0) for i in range(n)] for j in range(n - 1)
    ]
    w = Subspace.span(n, cols)
    q = RepAction(n, (), name="trivial")
    report = check_mthm(space, w, q, seed=seed, arith=arith, validate_q=False)
    spec = SubalgebraSpec(
        space, Subspace.zero(1), w, Subspace.full(space.z_dim)
    )
    return spec, report


# -- adapted maximal torus and the singular-orbit construction ------------


def _pair_to_block(heis: HeisenbergAlgebra, P: ExactMatrix, R: ExactMatrix) -> ExactMatrix:
    n, m = heis.v_dim, heis.z_dim
    top = P.hstack(ExactMatrix.zeros(n, m))
    bot = ExactMatrix.zeros(m, n).hstack(R)
    return top.vstack(bot)


def structured_cartan_pairs(heis: HeisenbergAlgebra) -> list[tuple[ExactMatrix, ExactMatrix]]:
    """Commuting derivations with integer complex-structure-like v-action.

    Spin pairs G_{2i}G_{2i+1} square to -I on all of v; per-block complex
    structures and identical-block pair rotations square to -I on their
    support and vanish elsewhere.  Together they realize a Cartan
    subalgebra of a(n)_0 whose weight planes are rational.
    """
    n, m = heis.v_dim, heis.z_dim
    cls = heis.cls
    out: list[tuple[ExactMatrix, ExactMatrix]] = []
    G = heis.module.generators
    if n:
        for i in range(0, m - 1, 2):
            P = G[i] @ G[i + 1]
            R = [[Fraction(0)] * m for _ in range(m)]
            R[i][i + 1] = Fraction(-2)
            R[i + 1][i] = Fraction(2)
            out.append((P, ExactMatrix(R)))
        zero_z = ExactMatrix.zeros(m, m)
        d = 1 if m == 0 else G[0].rows // _n_blocks(cls)
        J = commutant_complex_structure(m) if m else None
        if J is not None:
            for blk in range(_n_blocks(cls)):
                out.append((_embed_block(J, blk, _n_blocks(cls)), zero_z))
        else:
            # identical-block rotations within each volume class
            for lo, hi in _class_block_ranges(cls):
                for blk in range(lo, hi - 1, 2):
                    out.append((_pair_rotation(d, blk, n), zero_z))
    return out


def _n_blocks(cls: CliffordClass) -> int:
    return max(cls.total_multiplicity, 1)


def _class_block_ranges(cls: CliffordClass) -> list[tuple[int, int]]:
    if isinstance(cls.multiplicity, tuple):
        kp, km = cls.multiplicity
        return [(0, kp), (kp, kp + km)]
    return [(0, cls.multiplicity)]


def _embed_block(J: ExactMatrix, blk: int, n_blocks: int) -> ExactMatrix:
    d = J.rows
    n = d * n_blocks
    rows = [[Fraction(0)] * n for _ in range(n)]
    off = blk * d
    for i in range(d):
        for j in range(d):
            rows[off + i][off + j] = J.entries[i][j]
    return ExactMatrix(rows)


def _pair_rotation(d: int, blk: int, n: int) -> ExactMatrix:
    """Rotation [[0,-I],[I,0]] across identical blocks blk, blk+1."""
    rows = [[Fraction(0)] * n for _ in range(n)]
    a, b = blk * d, (blk + 1) * d
    for i in range(d):
        rows[a + i][b + i] = Fraction(-1)
        rows[b + i][a + i] = Fraction(1)
    return ExactMatrix(rows)


def _to_int_array(M: ExactMatrix) -> np.ndarray:
    """Integer numpy form of an integer-entried exact matrix."""
    ints, den = M._int_form()
    if den != 1:
        raise ArithmeticError("expected an integer matrix")
    return np.array(ints, dtype=np.int64) if ints else np.zeros((0, M.cols), dtype=np.int64)


def _exact_int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inner = a.shape[1]
    bound = inner * int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0))
    if bound < 2**62:
        return a @ b
    return (a.astype(object) @ b.astype(object))


def _der_coordinates_solver(der_ints: list[np.ndarray]):
    """Return a function expressing an integer block matrix in der coordinates.

    Works through the Frobenius Gram matrix of the basis; exact.
    """
    F = np.stack([D.reshape(-1) for D in der_ints])  # k x s^2
    gram_np = _exact_int_matmul(F, F.T)
    k = len(der_ints)
    gram = ExactMatrix([[Fraction(int(gram_np[i, j])) for j in range(k)] for i in range(k)])

    def coords(M: np.ndarray) -> tuple[Fraction, ...] | None:
        fm = M.reshape(-1)
        rhs_np = _exact_int_matmul(F, fm.reshape(-1, 1)).reshape(-1)
        rhs = [Fraction(int(v)) for v in rhs_np]
        from .exactla import _solve_square

        try:
            sol = _solve_square(gram, rhs)
        except LinAlgError:
            return None
        # verify exact membership after clearing denominators
        den = 1
        for c in sol:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = np.array([int(c * den) for c in sol], dtype=object)
        recon = (F.astype(object).T @ ints).reshape(M.shape)
        if (recon != den * M.astype(object)).any():
            return None
        return sol

    return coords


def centralizer_in_der(
    der_ints: list[np.ndarray], torus_ints: list[np.ndarray]
) -> Subspace:
    """{X in span(der) : [X, t] = 0 for all t} as coordinates w.r.t. der.

    The constraint matrix M has columns [D_b, t_a]; x^T M^T M x = |Mx|^2,
    so over Q the nullspace of the exact Gram matrix M^T M equals the
    nullspace of M itself.
    """
    k = len(der_ints)
    if not torus_ints:
        return Subspace.full(k)
    rows = []
    for D in der_ints:
        parts = [
            (_exact_int_matmul(D, t) - _exact_int_matmul(t, D)).reshape(-1)
            for t in torus_ints
        ]
        rows.append(np.concatenate(parts))
    if all(r.dtype == np.int64 for r in rows):
        M = np.stack(rows)
        if M.shape[1] * int(np.abs(M).max(initial=0)) ** 2 < 2**62:
            gram_np = M @ M.T
        else:
            gram_np = M.astype(object) @ M.astype(object).T
    else:
        M = np.stack([r.astype(object) for r in rows])
        gram_np = M @ M.T
    gram = ExactMatrix(
        [[Fraction(int(gram_np[i, j])) for j in range(k)] for i in range(k)]
    )
    return nullspace(gram)


def adapted_maximal_torus(
    heis: HeisenbergAlgebra, seed: int = 0
) -> tuple[list[tuple[ExactMatrix, ExactMatrix]], dict]:
    """A maximal abelian subalgebra of a(n)_0 with rational weight planes.

    Starts from the structured Cartan candidates and greedily adjoins
    centralizer elements until the centralizer stabilizes; maximality is
    certified exactly (centralizer dimension equals torus dimension).
    """
    pairs = derivation_pairs(heis, seed)
    der_ints = [_to_int_array(_pair_to_block(heis, P, R)) for P, R in pairs]
    torus_pairs = structured_cartan_pairs(heis)
    torus_ints = [
        _to_int_array(_pair_to_block(heis, P, R)) for P, R in torus_pairs
    ]
    # commutativity of the structured set is a construction invariant
    for i in range(len(torus_ints)):
        for j in range(i + 1, len(torus_ints)):
            a, b = torus_ints[i], torus_ints[j]
            if (_exact_int_matmul(a, b) != _exact_int_matmul(b, a)).any():
                raise ArithmeticError("structured Cartan candidates do not commute")
    coords_of = _der_coordinates_solver(der_ints)
    torus_coords = []
    for tb in torus_ints:
        c = coords_of(tb)
        if c is None:
            raise ArithmeticError("structured Cartan element is not a derivation")
        torus_coords.append(c)
    info = {"structured": len(torus_ints), "adjoined": 0}
    n, m = heis.v_dim, heis.z_dim
    for _ in range(len(der_ints) + 1):
        cz = centralizer_in_der(der_ints, torus_ints)
        torus_span = (
            Subspace.span(len(der_ints), torus_coords)
            if torus_coords
            else Subspace.zero(len(der_ints))
        )
        if cz.dim == torus_span.dim:
            break
        # adjoin the first centralizer direction outside the current span
        added = False
        for col in cz.basis.columns():
            if not torus_span.contains_vector(col):
                den = 1
                for c in col:
                    den = den * c.denominator // gcd(den, c.denominator)
                ints = np.array([int(c * den) for c in col], dtype=object)
                newD_flat = np.stack([D.reshape(-1) for D in der_ints]).astype(
                    object
                ).T @ ints
                newD = newD_flat.reshape(der_ints[0].shape)
                g = int(np.gcd.reduce([abs(int(x)) for x in newD.reshape(-1) if x]))
                if g > 1:
                    newD = newD // g
                newD = newD.astype(np.int64)
                torus_ints.append(newD)
                torus_pairs.append(
                    (
                        ExactMatrix.from_numpy(newD[:n, :n]),
                        ExactMatrix.from_numpy(newD[n:, n:]),
                    )
                )
                torus_coords.append(col)
                info["adjoined"] += 1
                added = True
                break
        if not added:
            raise ArithmeticError("centralizer strictly larger but no new direction")
    else:
        raise ArithmeticError("maximal torus construction did not stabilize")
    info["dim"] = len(torus_ints)
    return torus_pairs, info


def _invariant_two_plane(
    space: DamekRicciSpace, torus_v: list[ExactMatrix]
) -> Subspace | None:
    """A rational 2-plane in v invariant under every torus element, on
    which the torus acts nontrivially; None if the torus kills v.

    Refinement: replace V by t(V) for each structured generator (all of
    which square to -id on their support), then split by the rational
    involutions J_1 J_i until every generator acts as 0 or +-J_1.
    """
    n = space.v_dim
    V = Subspace.full(n)
    js: list[ExactMatrix] = []
    for t in torus_v:
        img_cols = [t.apply(c) for c in V.basis.columns()]
        img = Subspace.span(n, [c for c in img_cols if any(x != 0 for x in c)])
        if img.dim == 0:
            continue
        # batched containment: rank([V | img]) = dim V
        if rank(V.basis.hstack(img.basis)) != V.dim:
            raise ArithmeticError("torus image left the refined subspace")
        V = img
        js.append(t)
    if not js:
        return None
    # each j in js must square to -id on V
    for j in js:
        for c in V.basis.columns():
            jj = j.apply(j.apply(c))
            if any(a + b != 0 for a, b in zip(jj, c)):
                raise ArithmeticError("refined generator is not a complex structure")
    j0 = js[0]
    for j in js[1:]:
        # B = j0 j is a rational involution on V; keep a nonzero eigenspace
        basis = V.basis.columns()
        bc_cols = []
        for c in basis:
            img = j0.apply(j.apply(c))
            bc_cols.append(V.coordinates_of(img))
        B = ExactMatrix.from_columns(bc_cols)
        eye = ExactMatrix.identity(V.dim)
        plus = nullspace(B - eye)
        branch = plus if plus.dim else nullspace(B + eye)
        cols = [V.basis.apply(c) for c in branch.basis.columns()]
        V = Subspace.span(n, cols)
    x = V.basis.col(0)
    plane = Subspace.span(n, [x, j0.apply(x)])
    if plane.dim != 2:
        raise ArithmeticError("degenerate invariant plane")
    return plane


def construct_cor_psgo(
    space: DamekRicciSpace, seed: int = 0, arith: Arith = EXACT
) -> tuple[SubalgebraSpec, PolarityReport]:
    """Singular-orbit polar action: a maximal torus acting on a 2-plane.

    w is the complement of a torus-invariant 2-plane with nontrivial
    torus action; the torus together with L(H), h = w + z, acts polarly
    with cohomogeneity two, and the orbit through e has codimension 3.
    """
    if space.v_dim < 2:
        raise PolarityInputError("needs dim v >= 2")
    torus_pairs, info = adapted_maximal_torus(space.heis, seed)
    torus_v = [P for P, _ in torus_pairs]
    plane = _invariant_two_plane(space, torus_v)
    if plane is None:
        raise PolarityInputError("the maximal torus acts trivially on v")
    w = orth_complement(plane, Subspace.full(space.v_dim))
    q = RepAction(space.v_dim, tuple(torus_v), name="maximal torus")
    report = check_mthm(space, w, q, seed=seed, arith=arith, validate_q=False)
    report.action = f"T x L(H) on {space.name()}, h = w + z, T a maximal torus"
    report.witnesses.append(
        Witness(
            "maximal_torus",
            True,
            {
                "dim": info["dim"],
                "structured": info["structured"],
                "adjoined": info["adjoined"],
            },
        )
    )
    report.witnesses.append(
        Witness("orbit_codimension_through_e", True, {"value": 3})
    )
    spec = SubalgebraSpec(space, Subspace.zero(1), w, Subspace.full(space.z_dim))
    return spec, report


# -- classification sweep -------------------------------------------------


def rep_polar_expected(cls: CliffordClass) -> bool:
    """The polar A(N)_0|v classes (v != 0) as stated in the classification."""
    m = cls.m
    if isinstance(cls.multiplicity, tuple):
        if m == 3:
            return True
        if m == 7:
            return cls.multiplicity in ((1, 0), (0, 1), (2, 0), (0, 2))
        return False
    if m in (0, 1, 2):
        return cls.multiplicity >= 1
    if m in (4, 5, 6, 8):
        return cls.multiplicity == 1
    return False


def pasl_polar_expected(cls: CliffordClass) -> bool:
    """The polar A(N)_0 x L(Z) spaces: the rep-polar list minus S(4,1), S(8,1),
    plus every v = 0 space."""
    if cls.v_dim == 0:
        return True
    if cls.m in (4, 8):
        return False
    return rep_polar_expected(cls)


@dataclass
class ClassifyEntry:
    cls: CliffordClass
    rep_polar: bool | None
    rep_cohomogeneity: int | None
    report: PolarityReport

    @property
    def space_name(self) -> str:
        return self.cls.name("S")

    def to_json(self) -> dict:
        return {
            "class": self.cls.name(),
            "space": self.space_name,
            "rep_polar": self.rep_polar,
            "rep_cohomogeneity": self.rep_cohomogeneity,
            "pasl_report": self.report.to_json(),
        }


def enumerate_classes(m_max: int, k_max: int) -> list[CliffordClass]:
    """All classes with m <= m_max and v != 0; pairs are bounded by the sum."""
    out = []
    for m in range(m_max + 1):
        if m % 4 == 3:
            for kp in range(k_max + 1):
                for km in range(k_max + 1 - kp):
                    if kp + km >= 1:
                        out.append(CliffordClass(m, (kp, km)))
        else:
            for k in range(1, k_max + 1):
                out.append(CliffordClass(m, k))
    return out


def _classify_one(cls: CliffordClass, seed: int, arith: Arith) -> ClassifyEntry:
    space = build_space(cls)
    pairs = derivation_pairs(space.heis, seed)
    report = check_pasl_action(space, seed=seed, arith=arith, der_pairs_precomputed=pairs)
    # the A(N)_0|v polarity run is recorded in the slice-rep witnesses
    rep_polar: bool | None = None
    rep_coh: int | None = None
    for w in report.witnesses:
        if w.condition == "slice_rep_polar":
            rep_polar = w.passed
        if w.condition == "slice_rep_cohomogeneity" and w.certificate:
            rep_coh = w.certificate.get("value")
    return ClassifyEntry(cls, rep_polar, rep_coh, report)


def classify(
    m_max: int, k_max: int, seed: int = 0, arith: Arith = EXACT
) -> list[ClassifyEntry]:
    """One entry per class: A(N)_0|v polarity plus the space-level verdict.

    DRSPOLAR_THREADS caps the fan-out; assembly order is always
    (m, multiplicities)-sorted regardless of scheduling.
    """
    if arith.is_exact and m_max > 12:
        raise PolarityInputError("m_max > 12 needs the float path")
    if not arith.is_exact and m_max > 16:
        raise PolarityInputError("m_max > 16 is out of the resource guard")
    classes = enumerate_classes(m_max, k_max)
    workers = int(os.environ.get("DRSPOLAR_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            entries = list(ex.map(lambda c: _classify_one(c, seed, arith), classes))
    else:
        entries = [_classify_one(c, seed, arith) for c in classes]
    return entries
