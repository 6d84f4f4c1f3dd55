"""Integer generator matrices for real Clifford modules.

Generators for m = 1..8 come from the classical division algebras: the
rotation matrix on R^2, quaternion left multiplications on R^4, octonion
left multiplications on R^8 (m = 4, 5, 6 restrict the m = 7 set) and a
doubling construction on R^16 for m = 8.  Larger m uses the periodicity
Cl_{m+8} = Cl_m (x) R(16).  Every generator produced here is a signed
permutation matrix; that fact is exploited for fast exact computations
with the finite group generated by the G_i (commutant projections and
character sums) but is never assumed by the verification suite, which
checks the Clifford relations by plain matrix multiplication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactla import ExactMatrix

# multiplication table of the quaternions on basis (1, i, j, k):
# QUAT[a][b] = (index, sign) with q_a * q_b = sign * q_index
_QUAT = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, -1), (3, 1), (2, -1)],
    [(2, 1), (3, -1), (0, -1), (1, 1)],
    [(3, 1), (2, 1), (1, -1), (0, -1)],
]


def _quat_mul(x: Sequence[int], y: Sequence[int]) -> list[int]:
    out = [0, 0, 0, 0]
    for a, xa in enumerate(x):
        if xa == 0:
            continue
        for b, yb in enumerate(y):
            if yb == 0:
                continue
            idx, sgn = _QUAT[a][b]
            out[idx] += sgn * xa * yb
    return out


def _quat_conj(x: Sequence[int]) -> list[int]:
    return [x[0], -x[1], -x[2], -x[3]]


def _oct_mul(x: Sequence[int], y: Sequence[int]) -> list[int]:
    """Cayley-Dickson product on pairs of quaternions: (a,b)(c,d) = (ac - d*b, da + bc*)."""
    a, b = list(x[:4]), list(x[4:])
    c, d = list(y[:4]), list(y[4:])
    first = [
        p - q
        for p, q in zip(_quat_mul(a, c), _quat_mul(_quat_conj(d), b))
    ]
    second = [
        p + q
        for p, q in zip(_quat_mul(d, a), _quat_mul(b, _quat_conj(c)))
    ]
    return first + second


def _left_mult_matrix(mul, unit: list[int], dim: int) -> ExactMatrix:
    cols = []
    for j in range(dim):
        e = [0] * dim
        e[j] = 1
        cols.append(mul(unit, e))
    return ExactMatrix([[cols[j][i] for j in range(dim)] for i in range(dim)])


def _right_mult_matrix(mul, unit: list[int], dim: int) -> ExactMatrix:
    cols = []
    for j in range(dim):
        e = [0] * dim
        e[j] = 1
        cols.append(mul(e, unit))
    return ExactMatrix([[cols[j][i] for j in range(dim)] for i in range(dim)])


def _quat_left(i: int) -> ExactMatrix:
    e = [0, 0, 0, 0]
    e[i] = 1
    return _left_mult_matrix(_quat_mul, e, 4)


def _quat_right(i: int) -> ExactMatrix:
    e = [0, 0, 0, 0]
    e[i] = 1
    return _right_mult_matrix(_quat_mul, e, 4)


def _oct_left(i: int) -> ExactMatrix:
    e = [0] * 8
    e[i] = 1
    return _left_mult_matrix(_oct_mul, e, 8)


def irreducible_dimension(m: int) -> int:
    """Real dimension of an irreducible Cl_m module."""
    if m < 0:
        raise ValueError("m must be non-negative")
    table = [1, 2, 4, 4, 8, 8, 8, 8, 16]
    if m <= 8:
        return table[m]
    return 16 * irreducible_dimension(m - 8)


def _volume(gens: Sequence[ExactMatrix]) -> ExactMatrix:
    vol = ExactMatrix.identity(gens[0].rows)
    for g in gens:
        vol = vol @ g
    return vol


def build_generators(m: int, volume_sign: int = 1) -> list[ExactMatrix]:
    """Generator matrices of an irreducible Cl_m module on R^{d(m)}.

    The matrices satisfy G_i G_j + G_j G_i = -2 delta_ij I with each G_i
    skew-symmetric and orthogonal.  For m = 3 mod 4 the product
    G_1 ... G_m equals volume_sign * I; otherwise volume_sign is ignored.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if volume_sign not in (1, -1):
        raise ValueError("volume_sign must be +1 or -1")
    gens = _build_generators_raw(m)
    if m % 4 == 3:
        d = gens[0].rows
        vol = _volume(gens)
        sign = 1 if vol == ExactMatrix.identity(d) else -1
        if sign != volume_sign:
            # m is odd, so negating every generator flips the volume sign
            gens = [-g for g in gens]
    return gens


def _build_generators_raw(m: int) -> list[ExactMatrix]:
    if m == 1:
        return [ExactMatrix([[0, -1], [1, 0]])]
    if m in (2, 3):
        return [_quat_left(i) for i in range(1, m + 1)]
    if m in (4, 5, 6, 7):
        return [_oct_left(i) for i in range(1, m + 1)]
    if m == 8:
        seven = _build_generators_raw(7)
        eye = ExactMatrix.identity(8)
        zero = ExactMatrix.zeros(8, 8)
        gens = [
            zero.hstack(g).vstack(g.hstack(zero)) for g in seven
        ]
        gens.append(zero.hstack(-eye).vstack(eye.hstack(zero)))
        return gens
    # periodicity: Cl_{m+8} = Cl_m (x) R(16) with new generators
    # {I (x) A_i} u {G_j (x) w}, w = A_1...A_8
    base = _build_generators_raw(m - 8)
    eight = _build_generators_raw(8)
    omega = _volume(eight)
    eye = ExactMatrix.identity(base[0].rows)
    out = [eye.kron(a) for a in eight]
    out.extend(g.kron(omega) for g in base)
    return out


@dataclass(frozen=True)
class CliffordClass:
    """A class of Clifford modules: dimension m of z plus multiplicity data.

    multiplicity is a plain count for m != 3 mod 4 and a pair (k_plus,
    k_minus) for m = 3 mod 4, where the sign labels the volume element
    (+I listed first; swapping the pair gives an isomorphic space).
    """

    m: int
    multiplicity: int | tuple[int, int]

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.m % 4 == 3:
            if not (isinstance(self.multiplicity, tuple) and len(self.multiplicity) == 2):
                raise ValueError(f"m = {self.m} needs a multiplicity pair (k+, k-)")
            if any(k < 0 for k in self.multiplicity):
                raise ValueError("multiplicities must be non-negative")
        else:
            if not isinstance(self.multiplicity, int) or self.multiplicity < 0:
                raise ValueError(f"m = {self.m} needs a single non-negative multiplicity")

    @property
    def total_multiplicity(self) -> int:
        if isinstance(self.multiplicity, tuple):
            return sum(self.multiplicity)
        return self.multiplicity

    @property
    def v_dim(self) -> int:
        return irreducible_dimension(self.m) * self.total_multiplicity

    def name(self, letter: str = "N") -> str:
        if isinstance(self.multiplicity, tuple):
            return f"{letter}({self.m},{self.multiplicity[0]},{self.multiplicity[1]})"
        return f"{letter}({self.m},{self.multiplicity})"

    def swapped(self) -> "CliffordClass":
        """The class with (k+, k-) swapped; identical to self for single k."""
        if isinstance(self.multiplicity, tuple):
            return CliffordClass(self.m, (self.multiplicity[1], self.multiplicity[0]))
        return self


class SpecParseError(ValueError):
    """Malformed class/space specification string."""


_SPEC_RE = re.compile(r"^\s*([NS])\(\s*(\d+)\s*,\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")


def parse_class(text: str, letter: str = "N") -> CliffordClass:
    """Parse "N(m,k)" / "N(m,k+,k-)" (or the S(...) space form)."""
    mo = _SPEC_RE.match(text)
    if not mo:
        raise SpecParseError(f"cannot parse {text!r}")
    if mo.group(1) != letter:
        raise SpecParseError(f"expected {letter}(...), got {text!r}")
    m = int(mo.group(2))
    if m % 4 == 3:
        if mo.group(4) is None:
            raise SpecParseError(
                f"m = {m} = 3 mod 4 requires the pair form {letter}(m,k+,k-)"
            )
        return CliffordClass(m, (int(mo.group(3)), int(mo.group(4))))
    if mo.group(4) is not None:
        raise SpecParseError(f"m = {m} != 3 mod 4 takes a single multiplicity")
    return CliffordClass(m, int(mo.group(3)))


@dataclass(frozen=True)
class CliffordModule:
    """m anticommuting skew-orthogonal generators on R^{v_dim}."""

    cls: CliffordClass
    v_dim: int
    generators: tuple[ExactMatrix, ...]


def _block_diag(blocks: Sequence[ExactMatrix]) -> ExactMatrix:
    n = sum(b.rows for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.rows):
            row = out[off + i]
            for j in range(b.cols):
                row[off + j] = b.entries[i][j]
        off += b.rows
    return ExactMatrix(out)


def build_module(cls: CliffordClass) -> CliffordModule:
    """Block-diagonal direct sum of irreducible generator sets."""
    if cls.total_multiplicity == 0 or cls.m == 0:
        return CliffordModule(cls, cls.v_dim, ())
    if isinstance(cls.multiplicity, tuple):
        kp, km = cls.multiplicity
        plus = build_generators(cls.m, +1)
        minus = [-g for g in plus]
        gens = tuple(
            _block_diag([plus[i]] * kp + [minus[i]] * km)
            for i in range(cls.m)
        )
    else:
        irr = build_generators(cls.m)
        gens = tuple(
            _block_diag([irr[i]] * cls.multiplicity) for i in range(cls.m)
        )
    return CliffordModule(cls, cls.v_dim, gens)


def extended_spin_generators(module: CliffordModule) -> list[ExactMatrix]:
    """Basis {G_i G_j : i < j} u {G_i} realizing spin(m+1) via Cl_m = Cl0_{m+1}.

    Only supported for a single irreducible module with m in {4, 8}, the
    cases where the extended group acts transitively on the unit sphere.
    """
    m = module.cls.m
    if m not in (4, 8) or module.cls.total_multiplicity != 1:
        raise ValueError("extended spin generators need an irreducible module, m in {4, 8}")
    gens = module.generators
    out = [gens[i] @ gens[j] for i in range(m) for j in range(i + 1, m)]
    out.extend(gens)
    return out


# -- signed-permutation machinery --------------------------------------
#
# All generators constructed above are signed permutation matrices.  The
# finite group they generate (2^{m+1} elements up to sign) makes exact
# commutant computations cheap: averaging over the group projects onto
# the commutant, and a character sum gives its exact dimension.


class SignedPerm:
    """A matrix with exactly one +-1 entry per row/column: M[i][perm[i]] = sign[i]."""

    __slots__ = ("perm", "sign")

    def __init__(self, perm: np.ndarray, sign: np.ndarray):
        self.perm = perm
        self.sign = sign

    @staticmethod
    def identity(n: int) -> "SignedPerm":
        return SignedPerm(np.arange(n), np.ones(n, dtype=np.int64))

    @staticmethod
    def from_matrix(M: ExactMatrix) -> "SignedPerm":
        n = M.rows
        perm = np.zeros(n, dtype=np.int64)
        sign = np.zeros(n, dtype=np.int64)
        for i in range(n):
            found = 0
            for j in range(n):
                x = M.entries[i][j]
                if x != 0:
                    if x not in (1, -1):
                        raise ValueError("not a signed permutation matrix")
                    perm[i] = j
                    sign[i] = 1 if x == 1 else -1
                    found += 1
            if found != 1:
                raise ValueError("not a signed permutation matrix")
        if len(set(perm.tolist())) != n:
            raise ValueError("not a signed permutation matrix")
        return SignedPerm(perm, sign)

    def compose(self, other: "SignedPerm") -> "SignedPerm":
        """Matrix product self @ other."""
        return SignedPerm(other.perm[self.perm], self.sign * other.sign[self.perm])

    def trace(self) -> int:
        fixed = self.perm == np.arange(len(self.perm))
        return int(self.sign[fixed].sum())

    def conjugate_int(self, M: np.ndarray) -> np.ndarray:
        """g M g^T for an integer numpy matrix M (g orthogonal)."""
        return np.outer(self.sign, self.sign) * M[np.ix_(self.perm, self.perm)]

    def to_dense(self) -> np.ndarray:
        n = len(self.perm)
        out = np.zeros((n, n), dtype=np.int64)
        out[np.arange(n), self.perm] = self.sign
        return out


def clifford_group_perms(module: CliffordModule) -> list[SignedPerm]:
    """Signed-perm representatives of all 2^m subset products G_{i1}...G_{ik}."""
    n = module.v_dim
    gens = [SignedPerm.from_matrix(g) for g in module.generators]
    m = len(gens)
    out = [SignedPerm.identity(n)]
    for s in range(1, 1 << m):
        low = (s & -s).bit_length() - 1
        out.append(gens[low].compose(out[s & (s - 1)]))
    return out


def skew_commutant_dimension(module: CliffordModule) -> int:
    """Exact dimension of {skew P : P G_i = G_i P for all i} via character sum."""
    perms = clifford_group_perms(module)
    total = 0
    for g in perms:
        chi = g.trace()
        chi_sq = g.compose(g).trace()
        total += (chi * chi - chi_sq)
    num, rem = divmod(total, 2 * len(perms))
    if rem:
        raise ArithmeticError("character sum is not integral; generators are corrupt")
    return num


_MODP = 2_147_483_629


class _ModPSpan:
    """Incremental rank tracking of integer row vectors modulo a large prime."""

    def __init__(self):
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def try_add(self, vec: np.ndarray) -> bool:
        v = vec.astype(np.int64) % _MODP
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                v = (v - v[p] * pow(int(row[p]), _MODP - 2, _MODP) % _MODP * row) % _MODP
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            return False
        self.rows.append(v)
        self.pivots.append(int(nz[0]))
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def skew_commutant_basis(module: CliffordModule, rng) -> list[ExactMatrix]:
    """Exact integer basis of the skew commutant of the generator set.

    Random skew integer matrices are averaged over the Clifford group
    (an exact projection onto the commutant); sampling continues until
    the span reaches the dimension certified by the character formula.
    Each returned matrix is verified to commute with every generator.
    """
    n = module.v_dim
    target = skew_commutant_dimension(module)
    if target == 0:
        return []
    perms = clifford_group_perms(module)
    gens_np = [SignedPerm.from_matrix(g).to_dense() for g in module.generators]
    span = _ModPSpan()
    basis: list[ExactMatrix] = []
    budget = 2 * target + 16
    for _ in range(budget):
        if span.rank == target:
            break
        raw = np.array(
            [[rng.randint(-10, 10) for _ in range(n)] for _ in range(n)],
            dtype=np.int64,
        )
        raw = raw - raw.T
        proj = np.zeros((n, n), dtype=np.int64)
        for g in perms:
            proj += g.conjugate_int(raw)
        if not proj.any():
            continue
        content = int(np.gcd.reduce(np.abs(proj[proj != 0]).reshape(-1)))
        if content > 1:
            proj //= content
        for g in gens_np:
            if (g @ proj != proj @ g).any():
                raise ArithmeticError("projected sample does not commute; generators corrupt")
        if span.try_add(proj.reshape(-1)):
            basis.append(ExactMatrix.from_numpy(proj))
    if span.rank != target:
        raise ArithmeticError(
            f"commutant sampling failed to reach dimension {target} (got {span.rank})"
        )
    return basis


def commutant_complex_structure(m: int) -> ExactMatrix | None:
    """An integer J with J^2 = -I commuting with the irreducible Cl_m generators.

    Exists exactly when the commutant is of complex or quaternionic type
    (m = 1, 2, 3, 4, 5 mod 8); returns None in the real cases.
    """
    r = m % 8
    if r in (0, 6, 7):
        return None
    if m > 8:
        inner = commutant_complex_structure(m - 8)
        return inner.kron(ExactMatrix.identity(16))
    if r in (1, 5):
        # volume element: for m = 1 mod 4 it commutes and squares to -I
        return _volume(build_generators(m))
    if r in (2, 3):
        # quaternion module: right multiplication commutes with left
        return _quat_right(1)
    # r == 4: product of two unused octonion generators
    return _oct_left(5) @ _oct_left(6)


def module_to_json(module: CliffordModule) -> dict:
    return {
        "class": module.cls.name(),
        "m": module.cls.m,
        "multiplicity": list(module.cls.multiplicity)
        if isinstance(module.cls.multiplicity, tuple)
        else module.cls.multiplicity,
        "v_dim": module.v_dim,
        "generators": [
            [[int(x) for x in row] for row in g.entries] for g in module.generators
        ],
    }
