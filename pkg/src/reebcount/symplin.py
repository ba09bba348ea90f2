"""Exact symplectic linear algebra.

Matrices carry :class:`fractions.Fraction` entries so that the symplectic
relation and every nondegeneracy test (``det(M - I) == 0``) are decided
exactly.  Spectra, Krein signatures and the circle map ``rho`` are computed
numerically with mpmath at escalating precision.

Coordinates are ordered ``(x_1..x_n, y_1..y_n)`` and the standard form is
``J = [[0, I], [-I, 0]]``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import sympy

from .errors import (
    DimensionError,
    InputError,
    InvariantError,
    PreconditionError,
    PrecisionError,
)

Grid = tuple[tuple[Fraction, ...], ...]

#: working precisions tried in order when separating eigenvalue clusters
PRECISION_LADDER = (128, 256, 512)
#: eigenvalues closer than this (relative) are merged into one cluster
CLUSTER_TOL = mpmath.mpf(2) ** -40
#: distinct clusters closer than this trigger a precision escalation
AMBIGUITY_TOL = mpmath.mpf(2) ** -20
DEFAULT_K_CHECK = 64


# --------------------------------------------------------------------------
# exact helpers


def to_scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"boolean is not a matrix entry: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational literal: {value!r}") from exc
    raise InputError(f"unsupported scalar type {type(value).__name__}; use int, Fraction or 'p/q'")


def as_grid(rows: Iterable[Iterable]) -> Grid:
    grid = tuple(tuple(to_scalar(x) for x in row) for row in rows)
    size = len(grid)
    if size == 0 or any(len(row) != size for row in grid):
        raise DimensionError("matrix must be square and non-empty")
    return grid


def identity_grid(size: int) -> Grid:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(size))
        for i in range(size)
    )


def standard_j(n: int) -> Grid:
    size = 2 * n
    rows = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        rows[i][n + i] = Fraction(1)
        rows[n + i][i] = Fraction(-1)
    return tuple(tuple(r) for r in rows)


def matmul(a: Grid, b: Grid) -> Grid:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def transpose(a: Grid) -> Grid:
    return tuple(zip(*a))


def sub_scalar(a: Grid, lam: Fraction) -> Grid:
    return tuple(
        tuple(x - lam if i == j else x for j, x in enumerate(row)) for i, row in enumerate(a)
    )


def matpow(a: Grid, k: int) -> Grid:
    result = identity_grid(len(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def _row_reduce(a: Grid) -> tuple[int, Fraction]:
    """Return (rank, determinant) by exact Gaussian elimination."""
    m = [list(row) for row in a]
    size = len(m)
    ncols = len(m[0]) if m else 0
    det = Fraction(1)
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, size) if m[r][col] != 0), None)
        if pivot is None:
            det = Fraction(0)
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
            det = -det
        p = m[rank][col]
        det *= p
        for r in range(rank + 1, size):
            f = m[r][col]
            if f:
                factor = f / p
                m[r] = [x - factor * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank, det if rank == size else Fraction(0)


def det(a: Grid) -> Fraction:
    return _row_reduce(a)[1]


def rank(a: Grid) -> int:
    return _row_reduce(a)[0]


# --------------------------------------------------------------------------
# the matrix type


def is_symplectic(m) -> bool:
    """True iff ``M^T J M == J`` exactly."""
    grid = m.entries if isinstance(m, SymplecticMatrix) else as_grid(m)
    size = len(grid)
    if size % 2:
        raise DimensionError(f"symplectic matrices have even dimension, got {size}")
    j = standard_j(size // 2)
    return matmul(matmul(transpose(grid), j), grid) == j


@dataclass(frozen=True)
class SymplecticMatrix:
    entries: Grid

    def __post_init__(self):
        grid = as_grid(self.entries)
        object.__setattr__(self, "entries", grid)
        if len(grid) % 2:
            raise DimensionError(f"symplectic matrices have even dimension, got {len(grid)}")
        if not is_symplectic(grid):
            raise InvariantError("matrix does not satisfy M^T J M = J")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries) // 2

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(matmul(self.entries, other.entries))

    def __pow__(self, k: int) -> "SymplecticMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        return SymplecticMatrix(matpow(self.entries, k))

    def inverse(self) -> "SymplecticMatrix":
        # M^{-1} = -J M^T J
        j = standard_j(self.n)
        inv = matmul(matmul(j, transpose(self.entries)), j)
        return SymplecticMatrix(tuple(tuple(-x for x in row) for row in inv))

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": [[_fraction_str(x) for x in row] for row in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "SymplecticMatrix":
        return parse_matrix_json(data)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"SymplecticMatrix([{rows}])"


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_matrix_json(data: dict) -> SymplecticMatrix:
    """Parse ``{"dim": 2n, "entries": [["p/q", ...], ...]}``.

    Non-reduced fractions are normalized with a warning.
    """
    try:
        dim = data["dim"]
        raw = data["entries"]
    except (KeyError, TypeError) as exc:
        raise InputError("matrix JSON needs 'dim' and 'entries'") from exc
    rows = []
    for i, row in enumerate(raw):
        parsed = []
        for j, item in enumerate(row):
            value = to_scalar(item)
            if isinstance(item, str) and "/" in item:
                num, den = item.split("/")
                if (int(num), int(den)) != (value.numerator, value.denominator):
                    warnings.warn(
                        f"entries[{i}][{j}] = {item!r} normalized to {_fraction_str(value)}",
                        stacklevel=2,
                    )
            parsed.append(value)
        rows.append(parsed)
    if len(rows) != dim:
        raise DimensionError(f"'dim' is {dim} but {len(rows)} rows were given")
    return SymplecticMatrix(as_grid(rows))


# --------------------------------------------------------------------------
# constructors for the model blocks


def identity(dim: int = 2) -> SymplecticMatrix:
    return SymplecticMatrix(identity_grid(dim))


def hyperbolic(lam) -> SymplecticMatrix:
    """diag(lam, 1/lam); ``hyperbolic(2)`` and ``hyperbolic(-2)`` are D(2), D(-2)."""
    lam = to_scalar(lam)
    if lam == 0:
        raise InputError("hyperbolic block needs lam != 0")
    return SymplecticMatrix(((lam, Fraction(0)), (Fraction(0), 1 / lam)))


def jordan_n1(lam: int, b: int) -> SymplecticMatrix:
    if lam not in (1, -1) or b not in (-1, 0, 1):
        raise InputError("N1(lam, b) needs lam = +-1 and b in {-1, 0, 1}")
    return SymplecticMatrix(((Fraction(lam), Fraction(b)), (Fraction(0), Fraction(lam))))


def rotation(cos, sin) -> SymplecticMatrix:
    """R(theta) for a rational point (cos, sin) on the unit circle."""
    c, s = to_scalar(cos), to_scalar(sin)
    if c * c + s * s != 1:
        raise InvariantError(f"({c}, {s}) is not on the unit circle")
    return SymplecticMatrix(((c, -s), (s, c)))


def rational_circle_point(theta, bits: int = 64) -> tuple[Fraction, Fraction]:
    """A rational point (cos, sin) within about 2**-bits of angle ``theta``.

    Uses the stereographic parametrisation ``t = tan(theta/2)``.
    """
    with mpmath.workprec(bits + 64):
        theta = mpmath.mpf(theta)
        turns = mpmath.floor(theta / (2 * mpmath.pi) + mpmath.mpf(1) / 2)
        reduced = theta - turns * 2 * mpmath.pi  # in [-pi, pi)
        if abs(abs(reduced) - mpmath.pi) < mpmath.mpf(2) ** (-bits):
            return Fraction(-1), Fraction(0)
        t = mpmath.tan(reduced / 2)
        scale = 2 ** bits
        tq = Fraction(int(mpmath.nint(t * scale)), scale)
    c = (1 - tq * tq) / (1 + tq * tq)
    s = 2 * tq / (1 + tq * tq)
    return c, s


def rotation_by_angle(theta, bits: int = 64) -> SymplecticMatrix:
    return rotation(*rational_circle_point(theta, bits))


def n2_block(cos, sin, shear=((1, 0), (0, 0))) -> SymplecticMatrix:
    """N2(theta, B) = [[R, B], [0, R]] with B = R S for a symmetric S.

    ``R^T B`` symmetric is what makes the block symplectic; the default
    ``S = diag(1, 0)`` gives ``b2 != b3``.
    """
    r = rotation(cos, sin).entries
    s = as_grid(shear)
    if s != transpose(s):
        raise InputError("shear S must be symmetric")
    b = matmul(r, s)
    if b[0][1] == b[1][0]:
        raise InputError("N2 needs b2 != b3")
    z = Fraction(0)
    rows = (
        (r[0][0], r[0][1], b[0][0], b[0][1]),
        (r[1][0], r[1][1], b[1][0], b[1][1]),
        (z, z, r[0][0], r[0][1]),
        (z, z, r[1][0], r[1][1]),
    )
    return SymplecticMatrix(rows)


def diamond(m1: SymplecticMatrix, m2: SymplecticMatrix) -> SymplecticMatrix:
    """The block interleaving M1 <> M2 of two symplectic matrices."""
    for m in (m1, m2):
        if not isinstance(m, SymplecticMatrix):
            raise InvariantError("diamond expects SymplecticMatrix operands")
    i, j = m1.n, m2.n
    size = 2 * (i + j)
    out = [[Fraction(0)] * size for _ in range(size)]
    # index map of each factor's (x, y) coordinates into the product
    idx1 = list(range(i)) + [i + j + a for a in range(i)]
    idx2 = [i + a for a in range(j)] + [i + j + i + a for a in range(j)]
    for idx, m in ((idx1, m1.entries), (idx2, m2.entries)):
        for a, ia in enumerate(idx):
            for b, ib in enumerate(idx):
                out[ia][ib] = m[a][b]
    return SymplecticMatrix(tuple(tuple(r) for r in out))


def diamond_all(blocks: Sequence[SymplecticMatrix]) -> SymplecticMatrix:
    if not blocks:
        raise InputError("need at least one block")
    result = blocks[0]
    for block in blocks[1:]:
        result = diamond(result, block)
    return result


# --------------------------------------------------------------------------
# exact invariants


class NondegeneracyClass(enum.Enum):
    DEGENERATE = "degenerate"
    PLUS = "plus"
    MINUS = "minus"


def nondegeneracy_class(m: SymplecticMatrix) -> NondegeneracyClass:
    d = det(sub_scalar(m.entries, Fraction(1)))
    if d == 0:
        return NondegeneracyClass.DEGENERATE
    return NondegeneracyClass.PLUS if d > 0 else NondegeneracyClass.MINUS


def _algebraic_multiplicity_exact(m: SymplecticMatrix, lam: Fraction) -> int:
    shifted = sub_scalar(m.entries, lam)
    return m.dim - rank(matpow(shifted, m.dim))


def _nu_exact(m: SymplecticMatrix, lam: Fraction) -> int:
    return m.dim - rank(sub_scalar(m.entries, lam))


# --------------------------------------------------------------------------
# numerical spectral analysis


@dataclass(frozen=True)
class UnitPair:
    """A conjugate pair exp(+-i*angle) of unit eigenvalues, angle in (0, pi).

    ``krein_positive``/``krein_negative`` give the signature of the Krein form
    on the generalized eigenspace of exp(+i*angle).
    """

    angle: mpmath.mpf
    exact: bool
    algebraic: int
    geometric: int
    krein_positive: int
    krein_negative: int

    @property
    def krein_sign(self) -> int:
        """+1 or -1 when the Krein form is definite, 0 when indefinite."""
        if self.krein_negative == 0:
            return 1
        if self.krein_positive == 0:
            return -1
        return 0

    @property
    def eigenvalue(self) -> mpmath.mpc:
        return mpmath.expj(self.angle)


@dataclass(frozen=True)
class RealPair:
    value: mpmath.mpf  # |value| > 1; 1/value is the partner
    multiplicity: int

    @property
    def sign(self) -> int:
        return 1 if self.value > 0 else -1


@dataclass(frozen=True)
class Quadruple:
    value: mpmath.mpc  # |value| > 1, Im > 0
    multiplicity: int


@dataclass(frozen=True)
class SpectrumReport:
    dim: int
    unit_pairs: tuple[UnitPair, ...]
    real_pairs: tuple[RealPair, ...]
    quadruples: tuple[Quadruple, ...]
    eig_at_plus_one: int
    eig_at_minus_one: int
    nu_one: int
    exact: bool
    precision: int = field(default=128, compare=False)

    def total_multiplicity(self) -> int:
        return (
            sum(2 * u.algebraic for u in self.unit_pairs)
            + sum(2 * p.multiplicity for p in self.real_pairs)
            + sum(4 * q.multiplicity for q in self.quadruples)
            + self.eig_at_plus_one
            + self.eig_at_minus_one
        )

    def eigenvalues(self) -> list:
        """All eigenvalues with algebraic multiplicity, as mpc numbers."""
        out = [mpmath.mpc(1)] * self.eig_at_plus_one + [mpmath.mpc(-1)] * self.eig_at_minus_one
        for u in self.unit_pairs:
            out += [u.eigenvalue, mpmath.conj(u.eigenvalue)] * u.algebraic
        for p in self.real_pairs:
            out += [mpmath.mpc(p.value), mpmath.mpc(1 / p.value)] * p.multiplicity
        for q in self.quadruples:
            v = q.value
            out += [v, mpmath.conj(v), 1 / v, 1 / mpmath.conj(v)] * q.multiplicity
        return out


@dataclass
class _Cluster:
    value: mpmath.mpc
    mult: int


def _mp_matrix(grid: Grid) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in grid])


def _cluster(values: list, tol) -> list[_Cluster]:
    remaining = sorted(values, key=lambda z: (mpmath.re(z), mpmath.im(z)))
    groups: list[list] = []
    for z in remaining:
        scale = max(mpmath.mpf(1), abs(z))
        for g in groups:
            if any(abs(z - w) <= tol * scale for w in g):
                g.append(z)
                break
        else:
            groups.append([z])
    # single linkage may need a merge pass when a later point bridges groups
    merged = True
    while merged:
        merged = False
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                scale = max(mpmath.mpf(1), abs(groups[a][0]))
                if any(abs(x - y) <= tol * scale for x in groups[a] for y in groups[b]):
                    groups[a] += groups.pop(b)
                    merged = True
                    break
            if merged:
                break
    return [_Cluster(mpmath.fsum(g) / len(g), len(g)) for g in groups]


def _nullspace(a: mpmath.matrix, tol) -> list:
    """Orthonormal basis (list of column vectors) of the numerical kernel."""
    u, s, v = mpmath.svd_c(a)
    size = a.rows
    smax = max([abs(x) for x in s] + [mpmath.mpf(1)])
    basis = []
    for k in range(size):
        if abs(s[k]) <= tol * smax:
            basis.append(mpmath.matrix([mpmath.conj(v[k, c]) for c in range(size)]))
    return basis


def _krein_signature(basis: list, n: int, tol) -> tuple[int, int]:
    """Signature of -i * v^T J conj(w) on span(basis)."""
    dim = len(basis)
    h = mpmath.matrix(dim, dim)
    for a in range(dim):
        for b in range(dim):
            va, vb = basis[a], basis[b]
            acc = mpmath.mpc(0)
            for i in range(n):
                acc += va[i] * mpmath.conj(vb[n + i]) - va[n + i] * mpmath.conj(vb[i])
            h[a, b] = -1j * acc
    # symmetrize against rounding before the Hermitian eigensolve
    for a in range(dim):
        for b in range(a, dim):
            avg = (h[a, b] + mpmath.conj(h[b, a])) / 2
            h[a, b] = avg
            h[b, a] = mpmath.conj(avg)
    evals = mpmath.eighe(h, eigvals_only=True)
    pos = sum(1 for e in evals if mpmath.re(e) > tol)
    neg = sum(1 for e in evals if mpmath.re(e) < -tol)
    if pos + neg != dim:
        raise PrecisionError("Krein form is numerically degenerate on a unit eigenspace")
    return pos, neg


def _spectral_pass(m: SymplecticMatrix, prec: int):
    """One attempt at a given precision; returns None when clusters are ambiguous."""
    with mpmath.workprec(prec):
        a = _mp_matrix(m.entries)
        evals = mpmath.eig(a, left=False, right=False)
        clusters = _cluster(list(evals), CLUSTER_TOL)
        for i, c1 in enumerate(clusters):
            for c2 in clusters[i + 1:]:
                scale = max(mpmath.mpf(1), abs(c1.value))
                if abs(c1.value - c2.value) < AMBIGUITY_TOL * scale:
                    return None
        unit, real, quad = [], [], []
        plus = minus = 0
        for c in clusters:
            z = c.value
            modulus = abs(z)
            on_circle = abs(modulus - 1) <= CLUSTER_TOL
            is_real = abs(mpmath.im(z)) <= CLUSTER_TOL * max(1, modulus)
            if is_real and on_circle:
                if mpmath.re(z) > 0:
                    plus += c.mult
                else:
                    minus += c.mult
            elif on_circle:
                if mpmath.im(z) > 0:
                    shifted = a - z * mpmath.eye(m.dim)
                    geo = len(_nullspace(shifted, CLUSTER_TOL))
                    gen = _nullspace(shifted ** c.mult, CLUSTER_TOL ** min(c.mult, 2))
                    if len(gen) != c.mult:
                        return None
                    p, q = _krein_signature(gen, m.n, CLUSTER_TOL)
                    unit.append((mpmath.arg(z), c.mult, geo, p, q))
            elif is_real:
                if modulus > 1:
                    real.append((mpmath.re(z), c.mult))
            elif modulus > 1 and mpmath.im(z) > 0:
                quad.append((z, c.mult))
        return unit, real, quad, plus, minus


def _analyse(m: SymplecticMatrix):
    for prec in PRECISION_LADDER:
        result = _spectral_pass(m, prec)
        if result is not None:
            return result, prec
    raise PrecisionError(
        f"eigenvalue clusters not separated at {PRECISION_LADDER[-1]} bits "
        f"(separation threshold {float(AMBIGUITY_TOL):.3g})"
    )


def _factor_degrees_ok(m: SymplecticMatrix) -> bool:
    x = sympy.Symbol("x")
    mat = sympy.Matrix([[sympy.Rational(e.numerator, e.denominator) for e in row] for row in m.entries])
    poly = mat.charpoly(x).as_expr()
    _, factors = sympy.factor_list(poly, x)
    return all(sympy.degree(f, x) <= 2 for f, _ in factors)


def spectrum(m: SymplecticMatrix) -> SpectrumReport:
    """Classify the eigenvalues of ``m`` with multiplicities and Krein signs."""
    (unit, real, quad, plus, minus), prec = _analyse(m)
    exact_plus = _algebraic_multiplicity_exact(m, Fraction(1))
    exact_minus = _algebraic_multiplicity_exact(m, Fraction(-1))
    if (exact_plus, exact_minus) != (plus, minus):
        raise PrecisionError("numerical multiplicity at +-1 disagrees with the exact one")
    exact = _factor_degrees_ok(m)
    report = SpectrumReport(
        dim=m.dim,
        unit_pairs=tuple(UnitPair(ang, exact, alg, geo, p, q) for ang, alg, geo, p, q in unit),
        real_pairs=tuple(RealPair(v, mult) for v, mult in real),
        quadruples=tuple(Quadruple(v, mult // 1) for v, mult in quad),
        eig_at_plus_one=exact_plus,
        eig_at_minus_one=exact_minus,
        nu_one=_nu_exact(m, Fraction(1)),
        exact=exact,
        precision=prec,
    )
    if report.total_multiplicity() != m.dim:
        raise PrecisionError("eigenvalue bookkeeping does not add up to the dimension")
    return report


def elliptic_height(m: SymplecticMatrix) -> int:
    """Total algebraic multiplicity of the eigenvalues on the unit circle."""
    rep = spectrum(m)
    return 2 * sum(u.algebraic for u in rep.unit_pairs) + rep.eig_at_plus_one + rep.eig_at_minus_one


def nu(m: SymplecticMatrix, lam) -> int:
    """Geometric multiplicity of ``lam``; 0 when ``lam`` is not an eigenvalue.

    Rational candidates are decided exactly, complex ones numerically.
    """
    if isinstance(lam, (int, Fraction)) and not isinstance(lam, bool):
        return _nu_exact(m, Fraction(lam))
    z = mpmath.mpc(lam)
    if mpmath.im(z) == 0 and mpmath.re(z) == int(mpmath.re(z)):
        return _nu_exact(m, Fraction(int(mpmath.re(z))))
    for prec in PRECISION_LADDER:
        with mpmath.workprec(prec):
            a = _mp_matrix(m.entries)
            evals = mpmath.eig(a, left=False, right=False)
            clusters = _cluster(list(evals), CLUSTER_TOL)
            near = [c for c in clusters if abs(c.value - z) <= CLUSTER_TOL * max(1, abs(z))]
            if not near:
                # tolerate a user-supplied float approximation of the eigenvalue
                near = [c for c in clusters if abs(c.value - z) <= mpmath.mpf(10) ** -12 * max(1, abs(z))]
            if not near:
                return 0
            target = near[0].value
            return len(_nullspace(a - target * mpmath.eye(m.dim), CLUSTER_TOL))
    return 0  # pragma: no cover


# --------------------------------------------------------------------------
# the circle map rho


def _rho_angle_2x2(m: SymplecticMatrix) -> mpmath.mpf:
    (a, b), (c, d) = m.entries
    tr = a + d
    if -2 < tr < 2:
        phi = mpmath.acos(mpmath.mpf(tr.numerator) / tr.denominator / 2)
        # exp(i*phi) is Krein-positive exactly when the upper-right entry is negative
        return phi if b < 0 else -phi
    return mpmath.pi if tr < 0 else mpmath.mpf(0)


def rho_angle(m: SymplecticMatrix) -> mpmath.mpf:
    """Angle of ``rho(m)`` normalized to (-pi, pi].

    ``rho`` is the product of the Krein-positive unit eigenvalues (with
    multiplicity) times ``(-1)**(m_minus/2)``, ``m_minus`` being the total
    algebraic multiplicity of negative real eigenvalues.
    """
    with mpmath.workprec(PRECISION_LADDER[0]):
        if m.dim == 2:
            angle = _rho_angle_2x2(m)
        else:
            (unit, real, _quad, _plus, minus), _ = _analyse(m)
            angle = mpmath.mpf(0)
            for phi, _alg, _geo, p, q in unit:
                angle += (p - q) * phi
            negative = minus + sum(2 * mult for v, mult in real if v < 0)
            angle += mpmath.pi * (negative // 2)
        return _normalize_angle(angle)


def _normalize_angle(angle):
    two_pi = 2 * mpmath.pi
    angle = angle - two_pi * mpmath.floor(angle / two_pi)  # [0, 2pi)
    if angle > mpmath.pi:
        angle -= two_pi
    return angle


def rho(m: SymplecticMatrix) -> mpmath.mpc:
    return mpmath.expj(rho_angle(m))


# --------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class NormalFormDecomposition:
    """Spectral signature of a totally nondegenerate matrix in basic normal forms.

    ``rotations`` and ``n2_angles`` are angles in (0, 2*pi); for a rotation the
    recorded angle is that of its Krein-positive eigenvalue.
    """

    rotations: tuple
    n2_angles: tuple
    hyperbolic_count: int
    has_negative_hyperbolic: bool
    source_dim: int

    def __post_init__(self):
        total = 2 * len(self.rotations) + 4 * len(self.n2_angles) + 2 * self.hyperbolic_count
        if total != self.source_dim:
            raise InvariantError(f"blocks cover dimension {total}, expected {self.source_dim}")
        if self.has_negative_hyperbolic and self.hyperbolic_count == 0:
            raise InvariantError("D(-2) flag set with an empty hyperbolic tail")

    def assemble(self, bits: int = 64) -> SymplecticMatrix:
        """A model matrix in the same homotopy set, angles rounded to rational points."""
        blocks = [rotation_by_angle(t, bits) for t in self.rotations]
        blocks += [n2_block(*rational_circle_point(t, bits)) for t in self.n2_angles]
        hyp = [hyperbolic(2)] * self.hyperbolic_count
        if self.has_negative_hyperbolic:
            hyp[0] = hyperbolic(-2)
        return diamond_all(blocks + hyp)


def totally_nondegenerate(m: SymplecticMatrix, k_check: int = DEFAULT_K_CHECK) -> int | None:
    """First k <= k_check with det(M^k - I) == 0, or None."""
    power = identity_grid(m.dim)
    for k in range(1, k_check + 1):
        power = matmul(power, m.entries)
        if det(sub_scalar(power, Fraction(1))) == 0:
            return k
    return None


def normal_form_decomposition(m: SymplecticMatrix, k_check: int = DEFAULT_K_CHECK) -> NormalFormDecomposition:
    bad = totally_nondegenerate(m, k_check)
    if bad is not None:
        raise PreconditionError(f"M^{bad} has eigenvalue 1; decomposition needs nondegenerate iterates")
    (unit, real, quad, plus, minus), _ = _analyse(m)
    if plus or minus:
        # +-1 would have been caught by the iterate check for k_check >= 2
        raise PreconditionError("eigenvalue +-1 present")
    rotations: list = []
    n2: list = []
    two_pi = 2 * mpmath.pi
    for phi, alg, geo, p, q in unit:
        jordan = alg - geo
        if jordan > geo:
            raise PreconditionError("Jordan blocks longer than 2 on the unit circle are not basic normal forms")
        pos, neg = p - jordan, q - jordan
        if pos < 0 or neg < 0 or pos + neg != geo - jordan:
            raise PrecisionError("Krein signature inconsistent with the Jordan structure")
        rotations += [phi] * pos + [two_pi - phi] * neg
        n2 += [phi] * jordan
    off_pairs = sum(mult for _, mult in real) + 2 * sum(mult for _, mult in quad)
    sign = 1 if det(sub_scalar(m.entries, Fraction(1))) > 0 else -1
    flag = off_pairs > 0 and (-1) ** off_pairs != sign
    return NormalFormDecomposition(
        rotations=tuple(sorted(rotations)),
        n2_angles=tuple(sorted(n2)),
        hyperbolic_count=off_pairs,
        has_negative_hyperbolic=flag,
        source_dim=m.dim,
    )


def random_symplectic(rng, n: int, size: int = 3) -> SymplecticMatrix:
    """A random exact symplectic matrix built from shears and block scalings."""
    result = identity(2 * n)
    for _ in range(size):
        kind = rng.randrange(2)
        if kind == 0:
            s = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    s[i][j] = s[j][i] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            block = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
            for i in range(2 * n):
                block[i][i] = Fraction(1)
            lower = rng.randrange(2)
            for i in range(n):
                for j in range(n):
                    if lower:
                        block[n + i][j] = s[i][j]
                    else:
                        block[i][n + j] = s[i][j]
            g = SymplecticMatrix(tuple(tuple(r) for r in block))
        else:
            a = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                a[i][i] = Fraction(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 2]))
                for j in range(i + 1, n):
                    a[i][j] = Fraction(rng.randint(-2, 2))
            a_grid = tuple(tuple(r) for r in a)
            a_inv_t = _inverse(transpose(a_grid))
            block = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
            for i in range(n):
                for j in range(n):
                    block[i][j] = a_grid[i][j]
                    block[n + i][n + j] = a_inv_t[i][j]
            g = SymplecticMatrix(tuple(tuple(r) for r in block))
        result = result @ g
    return result


def _inverse(a: Grid) -> Grid:
    size = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(a)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if m[r][col] != 0)
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(size):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[size:]) for row in m)


def angle_of(cos, sin) -> mpmath.mpf:
    """Angle in [0, 2*pi) of a rational circle point."""
    c, s = to_scalar(cos), to_scalar(sin)
    with mpmath.workprec(PRECISION_LADDER[0]):
        ang = mpmath.atan2(mpmath.mpf(s.numerator) / s.denominator, mpmath.mpf(c.numerator) / c.denominator)
        return ang if ang >= 0 else ang + 2 * mpmath.pi


__all__ = [
    "SymplecticMatrix",
    "SpectrumReport",
    "UnitPair",
    "RealPair",
    "Quadruple",
    "NormalFormDecomposition",
    "NondegeneracyClass",
    "is_symplectic",
    "diamond",
    "diamond_all",
    "spectrum",
    "elliptic_height",
    "nondegeneracy_class",
    "nu",
    "rho",
    "rho_angle",
    "normal_form_decomposition",
    "identity",
    "hyperbolic",
    "jordan_n1",
    "rotation",
    "rotation_by_angle",
    "rational_circle_point",
    "n2_block",
    "parse_matrix_json",
    "random_symplectic",
    "angle_of",
    "math",
]
