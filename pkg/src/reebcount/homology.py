"""Rank functions of positive S^1-equivariant symplectic homology.

Ranks are consumed only through closed forms: the displaceable case (a
tensor product with H_*(CP^infinity)), prequantization bundles and
Brieskorn spheres.  A :class:`RankFunction` is eventually periodic with an
even period; the mean Euler characteristic is read off one period of the
tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import mpmath
import sympy

from .errors import HypothesisError, InputError, InvariantError
from .iteration import IterationProfile, is_good, iterated_index, mean_index, mean_index_exact


# --------------------------------------------------------------------------
# Betti tables


def _int_keys(mapping: Mapping) -> dict[int, int]:
    out = {}
    for key, value in mapping.items():
        try:
            degree, rank = int(key), int(value)
        except (TypeError, ValueError) as exc:
            raise InputError(f"Betti entry {key!r}: {value!r} is not an integer pair") from exc
        if rank < 0:
            raise InputError(f"Betti number b_{degree} = {rank} is negative")
        if rank:
            out[degree] = rank
    return out


@dataclass(frozen=True)
class BettiTable:
    """Betti numbers b_i(W_0, Sigma; Q) for 0 <= i <= 2n."""

    pair_dim: int
    values: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.pair_dim < 2 or self.pair_dim % 2:
            raise InputError(f"pair_dim must be even and at least 2, got {self.pair_dim}")
        vals = _int_keys(self.values)
        bad = [i for i in vals if not 0 <= i <= self.pair_dim]
        if bad:
            raise InputError(f"degrees {sorted(bad)} lie outside [0, {self.pair_dim}]")
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    @property
    def n(self) -> int:
        return self.pair_dim // 2

    def __getitem__(self, degree: int) -> int:
        return self.values.get(degree, 0)

    def __hash__(self):
        return hash((self.pair_dim, tuple(self.values.items())))

    @classmethod
    def for_filling(cls, n: int, values: Mapping | None = None) -> "BettiTable":
        """Table of a filling pair, with b_{2n} = 1 by Lefschetz duality unless given."""
        vals = _int_keys(values or {})
        vals.setdefault(2 * n, 1)
        return cls(2 * n, vals)

    @classmethod
    def ball(cls, n: int) -> "BettiTable":
        return cls(2 * n, {2 * n: 1})

    def to_json(self) -> dict:
        return {"dim": self.pair_dim, "betti": {str(k): v for k, v in self.values.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "BettiTable":
        try:
            return cls(int(data["dim"]), data.get("betti", {}))
        except KeyError as exc:
            raise InputError("Betti JSON needs 'dim'") from exc


def validate_displaceable_betti(betti: BettiTable, sigma_betti: Mapping) -> list[str]:
    """Violations of b_{i+1}(W_0, Sigma) <= b_i(Sigma) and of H_1(W_0, Sigma) = 0."""
    sigma = _int_keys(sigma_betti)
    problems = []
    if betti[1] != 0:
        problems.append(f"b_1(W0, Sigma) = {betti[1]} but displaceability forces H_1(W0, Sigma) = 0")
    for i in range(-1, betti.pair_dim):
        if betti[i + 1] > sigma.get(i, 0):
            problems.append(f"b_{i + 1}(W0, Sigma) = {betti[i + 1]} exceeds b_{i}(Sigma) = {sigma.get(i, 0)}")
    return problems


# --------------------------------------------------------------------------
# rank functions


@dataclass(frozen=True)
class RankFunction:
    """Degree -> rank, periodic beyond ``tail_start``.

    With ``descending`` set the tail runs towards -infinity instead: degrees
    ``<= tail_start`` are periodic and ``exceptional`` holds degrees above.
    """

    exceptional: Mapping = field(default_factory=dict)
    tail_start: int = 0
    period: int = 2
    tail: tuple = (0, 0)
    descending: bool = False

    def __post_init__(self):
        exc = _int_keys(self.exceptional)
        tail = tuple(int(x) for x in self.tail)
        if any(x < 0 for x in tail):
            raise InvariantError("tail ranks must be nonnegative")
        if self.period < 1 or len(tail) != self.period:
            raise InvariantError(f"tail has {len(tail)} entries for period {self.period}")
        if self.descending:
            if any(d <= self.tail_start for d in exc):
                raise InvariantError("exceptional degrees must lie above a descending tail")
        elif any(d >= self.tail_start for d in exc):
            raise InvariantError("exceptional degrees must lie below the tail start")
        object.__setattr__(self, "exceptional", dict(sorted(exc.items())))
        object.__setattr__(self, "tail", tail)

    def __hash__(self):
        return hash((tuple(self.exceptional.items()), self.tail_start, self.period, self.tail, self.descending))

    def rank(self, degree: int) -> int:
        if self.descending:
            if degree <= self.tail_start:
                return self.tail[(self.tail_start - degree) % self.period]
        elif degree >= self.tail_start:
            return self.tail[(degree - self.tail_start) % self.period]
        return self.exceptional.get(degree, 0)

    __call__ = rank

    def window(self, lo: int, hi: int) -> dict[int, int]:
        """Nonzero ranks on [lo, hi]."""
        return {d: r for d in range(lo, hi + 1) if (r := self.rank(d))}

    @property
    def is_finite(self) -> bool:
        return not any(self.tail)

    def support_bounds(self) -> tuple[int | None, int | None]:
        """(lowest, highest) nonzero degree; None marks an unbounded side."""
        degrees = list(self.exceptional)
        if self.is_finite:
            return (min(degrees), max(degrees)) if degrees else (None, None)
        first = next(i for i, x in enumerate(self.tail) if x)
        if self.descending:
            tail_top = self.tail_start - first
            return None, max(degrees + [tail_top])
        tail_low = self.tail_start + first
        return min(degrees + [tail_low]), None

    def parities(self) -> set[int]:
        """Residues mod 2 of the support."""
        out = {d % 2 for d in self.exceptional}
        out |= {(self.tail_start + i * (-1 if self.descending else 1)) % 2 for i, x in enumerate(self.tail) if x}
        return out

    def to_json(self) -> dict:
        out = {
            "exceptional": {str(k): v for k, v in self.exceptional.items()},
            "tail_start": self.tail_start,
            "period": self.period,
            "tail": list(self.tail),
        }
        if self.descending:
            out["descending"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RankFunction":
        try:
            rf = cls(
                data.get("exceptional", {}),
                int(data["tail_start"]),
                int(data["period"]),
                tuple(data["tail"]),
                bool(data.get("descending", False)),
            )
        except KeyError as exc:
            raise InputError(f"rank function JSON is missing {exc.args[0]!r}") from exc
        return rf.normalized()

    @classmethod
    def zero(cls) -> "RankFunction":
        return cls({}, 0, 2, (0, 0))

    def normalized(self) -> "RankFunction":
        """Canonical form: earliest tail start and smallest even period."""
        sign = -1 if self.descending else 1
        p = self.period
        q = next(q for q in range(1, p + 1) if p % q == 0 and all(self.tail[i] == self.tail[i % q] for i in range(p)))
        if q % 2:
            q *= 2
        if not any(self.tail):
            exc = dict(self.exceptional)
            if not exc:
                return RankFunction({}, 0, 2, (0, 0))
            start = (max(exc) + 1) if not self.descending else (min(exc) - 1)
            return RankFunction(exc, start, 2, (0, 0), self.descending)
        start = self.tail_start
        # below every exceptional degree (and one period more) the walk must stop
        degrees = list(self.exceptional) + [start]
        limit = (min(degrees) if not self.descending else max(degrees)) - sign * (q + 1)
        while (start - sign - limit) * sign > 0 and self.rank(start - sign) == self.rank(start - sign + sign * q):
            start -= sign
        tail = tuple(self.rank(start + sign * i) for i in range(q))
        exc = {d: r for d, r in self.exceptional.items() if (d - start) * sign < 0}
        return RankFunction(exc, start, q, tail, self.descending)

    @classmethod
    def fit(cls, func: Callable[[int], int], lo: int, hi: int, period: int, descending: bool = False) -> "RankFunction":
        """Fit ``func`` (zero outside [lo, inf) or (-inf, hi]) with a given period.

        The tail is located by scanning [lo, hi] and must be confirmed over at
        least three full periods.
        """
        if hi - lo < 4 * period:
            raise InputError("fitting window too short for the period")
        values = {d: func(d) for d in range(lo, hi + 1)}
        if descending:
            order = list(range(hi, lo - 1, -1))
        else:
            order = list(range(lo, hi + 1))
        # latest point from which the sequence is periodic inside the window
        start_idx = len(order) - period
        for idx in range(len(order) - period - 1, -1, -1):
            if values[order[idx]] == values[order[idx + period]]:
                start_idx = idx
            else:
                break
        if len(order) - start_idx < 3 * period:
            raise InvariantError("rank sequence is not periodic over the fitting window")
        tail_start = order[start_idx]
        tail = tuple(values[order[start_idx + i]] for i in range(period))
        exc = {order[i]: values[order[i]] for i in range(start_idx) if values[order[i]]}
        return cls(exc, tail_start, period, tail, descending).normalized()


def chi_m_from_ranks(rf: RankFunction) -> Fraction:
    """Mean Euler characteristic: the alternating average over one tail period."""
    if rf.period % 2:
        raise InvariantError("an odd period leaves the alternating average undefined")
    step = -1 if rf.descending else 1
    total = sum((-1) ** ((rf.tail_start + step * i) % 2) * x for i, x in enumerate(rf.tail))
    return Fraction(total, rf.period)


def windowed_chi_ranks(rf: RankFunction, N: int) -> Fraction:
    """(1/N) * sum over [-N, N] of (-1)^l rank(l)."""
    return Fraction(sum((-1) ** (d % 2) * rf.rank(d) for d in range(-N, N + 1)), N)


def sh_ranks_displaceable(betti: BettiTable, n: int | None = None) -> RankFunction:
    """rank(*) = sum over m >= 0 of b_{* + n - 1 - 2m}."""
    n = betti.n if n is None else n
    if betti.pair_dim != 2 * n:
        raise InputError(f"Betti table has pair_dim {betti.pair_dim}, expected {2 * n}")
    if betti[0]:
        raise InputError("b_0(W0, Sigma) vanishes for a connected filling with nonempty boundary")

    def rank(d: int) -> int:
        top = d + n - 1
        return sum(betti[i] for i in range(top, -1, -2) if i <= 2 * n)

    return RankFunction.fit(rank, 1 - n - 2, 2 * n + 12, 2)


def chi_m_displaceable(betti: BettiTable, n: int | None = None) -> Fraction:
    """(1/2) * sum_{i=1}^{2n} (-1)^{i+n-1} b_i."""
    n = betti.n if n is None else n
    return Fraction(sum((-1) ** ((i + n - 1) % 2) * betti[i] for i in range(1, 2 * n + 1)), 2)


def _validate_q_betti(betti_q: Mapping, n: int) -> dict[int, int]:
    table = _int_keys(betti_q)
    if any(not 0 <= d <= 2 * n - 2 for d in table):
        raise InputError(f"Betti numbers of Q must live in degrees [0, {2 * n - 2}]")
    if table.get(0) != 1 or table.get(2 * n - 2) != 1:
        raise InputError("Q must be closed and connected: b_0 = b_{2n-2} = 1")
    return table


def sh_ranks_prequantization(betti_q: Mapping, c: int, n: int) -> RankFunction:
    """rank(*) = sum over N >= 1 of b_{* - (2Nc - n + 1)}(Q)."""
    if abs(c) <= n - 1:
        raise HypothesisError(f"need |c| > n - 1 = {n - 1}, got c = {c}")
    table = _validate_q_betti(betti_q, n)

    def rank(d: int) -> int:
        total = 0
        N = 1
        while True:
            shift = d - (2 * N * c - n + 1)
            if c > 0 and shift < 0:
                break
            if c < 0 and shift > 2 * n - 2:
                break
            total += table.get(shift, 0)
            N += 1
        return total

    period = 2 * abs(c)
    span = 8 * period + 2 * n
    if c > 0:
        lo = 2 * c - n + 1
        return RankFunction.fit(rank, lo - 2, lo + span, period)
    hi = 2 * c + n - 1
    return RankFunction.fit(rank, hi - span, hi + 2, period, descending=True)


# --------------------------------------------------------------------------
# Brieskorn spheres


def _check_brieskorn(a0: int, n: int, override: bool) -> None:
    if a0 < 1 or a0 % 2 == 0:
        raise InputError(f"a0 must be a positive odd integer, got {a0}")
    if a0 % 8 not in (1, 7) and not override:
        raise InputError(f"a0 = {a0} is not +-1 mod 8; pass override to explore anyway")
    if n < 2:
        raise InputError("n must be at least 2")
    if a0 != 1 and n % 2 == 0 and not override:
        raise InputError(f"n = {n} is even; Brieskorn spheres here have odd n (use override)")


def brieskorn_f(N: int, a0: int, n: int) -> int:
    return 2 * ((2 * N) // a0) + 2 * N * (n - 2) + n + 1


def brieskorn_g(N: int, a0: int) -> int:
    """The displayed closed form N + floor((2N+1)/(2 a0) + 1/2)."""
    return N + (2 * (2 * N + 1) + 2 * a0) // (4 * a0)


def nth_admissible(N: int, a0: int) -> int:
    """The N-th positive integer m with 2m + 1 not divisible by a0."""
    if a0 == 1:
        raise InputError("no admissible values when a0 = 1")
    # each block of a0 consecutive integers contains exactly one excluded value
    block, rem = divmod(N - 1, a0 - 1)
    m = block * a0
    count = 0
    while True:
        m += 1
        if (2 * m + 1) % a0:
            count += 1
            if count == rem + 1:
                return m


def brieskorn_h(N: int, a0: int, n: int) -> int:
    return (brieskorn_f(brieskorn_g(N, a0), a0, n) - (n - 1)) // 2 + N


def brieskorn_beta(a0: int, n: int) -> int:
    return a0 * a0 * n - a0 * a0 + a0 * n + 2


def brieskorn_period(a0: int, n: int) -> int:
    """Degree period of the double-rank pattern: f(N + a0) = f(N) + period."""
    return 4 + 2 * a0 * (n - 2)


def brieskorn_double_degrees(a0: int, n: int, up_to: int) -> list[int]:
    out = []
    N = 1
    while (d := brieskorn_f(N, a0, n)) <= up_to:
        if (2 * N + 1) % a0:
            out.append(d)
        N += 1
    return out


def sh_ranks_brieskorn(a0: int, n: int, override: bool = False) -> RankFunction:
    _check_brieskorn(a0, n, override)
    if a0 == 1:
        return RankFunction.fit(lambda d: 1 if d >= n + 1 and (d - n - 1) % 2 == 0 else 0, n - 3, n + 30, 2)
    period = brieskorn_period(a0, n)
    hi = n + 10 * period + 20
    doubles = set(brieskorn_double_degrees(a0, n, hi + 1))

    def rank(d: int) -> int:
        if d % 2 or d < n - 1:
            return 0
        return 2 if d in doubles else 1

    return RankFunction.fit(rank, n - 3, hi, period)


# --------------------------------------------------------------------------
# E1 page and the resonance identity


def e1_page(orbits: Iterable[tuple[int, bool]]) -> dict[tuple[int, int], int]:
    page: dict[tuple[int, int], int] = {}
    for mu, good in orbits:
        if good:
            page[(mu, 0)] = page.get((mu, 0), 0) + 1
    return dict(sorted(page.items()))


@dataclass(frozen=True)
class OrbitEntry:
    label: str
    profile: IterationProfile

    @property
    def bad_even_covers(self) -> bool:
        return self.profile.r % 2 == 1


@dataclass(frozen=True)
class OrbitSystem:
    orbits: tuple
    ambient_n: int

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        for entry in self.orbits:
            if entry.profile.ambient_n != self.ambient_n:
                raise InputError(f"orbit {entry.label!r} has ambient_n {entry.profile.ambient_n}, expected {self.ambient_n}")

    def to_json(self) -> dict:
        return {
            "n": self.ambient_n,
            "orbits": [{"label": e.label, "profile": e.profile.to_json()} for e in self.orbits],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OrbitSystem":
        try:
            entries = tuple(OrbitEntry(o["label"], IterationProfile.from_json(o["profile"])) for o in data["orbits"])
            return cls(entries, int(data["n"]))
        except KeyError as exc:
            raise InputError(f"orbit system JSON is missing {exc.args[0]!r}") from exc


def _require_positive(system: OrbitSystem) -> None:
    for entry in system.orbits:
        if mean_index(entry.profile) <= 0:
            raise HypothesisError(f"orbit {entry.label!r} has nonpositive mean index")


def chi_m_orbits(system: OrbitSystem):
    """Sum of (-1)^mu / Delta over all-good orbits plus (-1)^mu / (2 Delta) over the rest (sympy)."""
    _require_positive(system)
    total = sympy.Integer(0)
    for entry in system.orbits:
        p = entry.profile
        weight = sympy.Integer(1 if p.r % 2 == 0 else 2)
        total += sympy.Integer((-1) ** (p.mu1 % 2)) / (weight * mean_index_exact(p))
    return sympy.nsimplify(sympy.radsimp(sympy.simplify(total)))


def windowed_chi_orbits(system: OrbitSystem, N: int) -> Fraction:
    """(1/N) * sum of (-1)^mu over good covers with mu in [-N, N]."""
    _require_positive(system)
    total = 0
    for entry in system.orbits:
        p = entry.profile
        delta = mean_index(p)
        k_max = int((N + p.ambient_n) / delta) + 2
        for k in range(1, k_max + 1):
            if not is_good(p, k):
                continue
            mu = iterated_index(p, k)
            if -N <= mu <= N:
                total += (-1) ** (mu % 2)
    return Fraction(total, N)


@dataclass(frozen=True)
class ResonanceReport:
    lhs: Fraction
    rhs: object
    abs_diff: float
    windowed_lhs: Fraction
    windowed_rhs: Fraction
    tolerance: float
    passed: bool


def resonance_check(system: OrbitSystem, rf: RankFunction, N_window: int = 10_000) -> ResonanceReport:
    lhs = chi_m_from_ranks(rf)
    rhs = chi_m_orbits(system)
    diff_expr = sympy.nsimplify(sympy.radsimp(sympy.Rational(lhs.numerator, lhs.denominator) - rhs))
    with mpmath.workprec(128):
        diff = abs(float(sympy.N(diff_expr, 40)))
        const = sum(2 * e.profile.ambient_n / mean_index(e.profile) for e in system.orbits)
    tolerance = const / N_window
    return ResonanceReport(
        lhs=lhs,
        rhs=rhs,
        abs_diff=diff,
        windowed_lhs=windowed_chi_ranks(rf, N_window),
        windowed_rhs=windowed_chi_orbits(system, N_window),
        tolerance=tolerance,
        passed=diff <= tolerance,
    )
