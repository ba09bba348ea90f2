"""Index iteration for nondegenerate closed orbits.

A profile ``(r, thetas)`` gives

    mu(gamma^k) = k*r + sum_i 2*floor(k*theta_i) + j,     j = len(thetas)

with every ``theta_i`` an irrational number in (0, 1).  Angles are exact
quadratic irrationals, or rationals carrying an explicit validity guard, so
each floor is computed in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence, Union

import mpmath
import sympy

from .errors import GuardExceededError, InputError, InvariantError

DEFAULT_GUARD = 10**6


def _sign_quadratic(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d) for integers a, b and d > 0 nonsquare."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with b^2 d
    lhs, rhs = a * a, b * b * d
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def _floor_quadratic(a: int, b: int, d: int) -> int:
    """floor(a + b*sqrt(d)) for d nonsquare."""
    if b == 0:
        return a
    root = isqrt(b * b * d)
    return a + root if b > 0 else a - root - 1


@dataclass(frozen=True)
class QuadIrrational:
    """The number (p + q*sqrt(d)) / s in (0, 1)."""

    p: int
    q: int
    d: int
    s: int

    def __post_init__(self):
        for name in ("p", "q", "d", "s"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise InputError(f"QuadIrrational.{name} must be an integer")
        if self.q == 0:
            raise InputError("QuadIrrational needs q != 0")
        if self.s <= 0:
            raise InputError("QuadIrrational needs s > 0")
        if self.d <= 0 or isqrt(self.d) ** 2 == self.d:
            raise InputError(f"d = {self.d} must be a positive nonsquare")
        if _sign_quadratic(self.p, self.q, self.d) <= 0 or _sign_quadratic(self.p - self.s, self.q, self.d) >= 0:
            raise InputError(f"({self.p} + {self.q}*sqrt({self.d}))/{self.s} is not in (0, 1)")

    def floor_multiple(self, k: int) -> int:
        return _floor_quadratic(k * self.p, k * self.q, self.d) // self.s

    def compare(self, x: Fraction) -> int:
        """Sign of self - x, exactly."""
        x = Fraction(x)
        # (p + q sqrt d)/s - a/b  ->  b p - a s + b q sqrt d
        return _sign_quadratic(x.denominator * self.p - x.numerator * self.s, x.denominator * self.q, self.d)

    def shifted(self, total: Fraction) -> "QuadIrrational":
        """total - self, as a QuadIrrational (must land in (0, 1))."""
        total = Fraction(total)
        s = self.s * total.denominator
        return QuadIrrational(total.numerator * self.s - self.p * total.denominator, -self.q * total.denominator, self.d, s)

    @property
    def value(self) -> mpmath.mpf:
        with mpmath.workprec(256):
            return (self.p + self.q * mpmath.sqrt(self.d)) / self.s

    def sympy(self):
        return (sympy.Integer(self.p) + sympy.Integer(self.q) * sympy.sqrt(self.d)) / self.s

    def to_json(self) -> dict:
        return {"kind": "quad", "p": self.p, "q": self.q, "d": self.d, "s": self.s}

    def __str__(self) -> str:
        return f"({self.p}{self.q:+d}*sqrt({self.d}))/{self.s}"


@dataclass(frozen=True)
class GuardedRational:
    """A rational stand-in for an irrational angle, valid for iterates k <= guard."""

    num: int
    den: int
    guard: int = DEFAULT_GUARD

    def __post_init__(self):
        if self.den <= 0:
            raise InputError("GuardedRational needs den > 0")
        if gcd(self.num, self.den) != 1:
            raise InputError(f"{self.num}/{self.den} is not in lowest terms")
        if not 0 < self.num < self.den:
            raise InputError(f"{self.num}/{self.den} is not in (0, 1)")
        if self.guard <= 0:
            raise InputError("guard must be positive")
        if self.den <= self.guard:
            raise InputError(
                f"den = {self.den} must exceed the guard {self.guard} so that k*theta is never an integer"
            )

    def floor_multiple(self, k: int) -> int:
        if k > self.guard:
            raise GuardExceededError(f"iterate {k} exceeds guard {self.guard} of {self.num}/{self.den}")
        return (k * self.num) // self.den

    def compare(self, x: Fraction) -> int:
        diff = Fraction(self.num, self.den) - Fraction(x)
        return (diff > 0) - (diff < 0)

    @property
    def value(self) -> mpmath.mpf:
        with mpmath.workprec(256):
            return mpmath.mpf(self.num) / self.den

    def sympy(self):
        return sympy.Rational(self.num, self.den)

    def to_json(self) -> dict:
        return {"kind": "rat", "num": self.num, "den": self.den, "guard": self.guard}

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


Angle = Union[QuadIrrational, GuardedRational]


def floor_multiple(theta: Angle, k: int) -> int:
    """Exact floor(k * theta)."""
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    return theta.floor_multiple(k)


def angle_from_json(data: dict) -> Angle:
    kind = data.get("kind")
    try:
        if kind == "quad":
            return QuadIrrational(int(data["p"]), int(data["q"]), int(data["d"]), int(data["s"]))
        if kind == "rat":
            return GuardedRational(int(data["num"]), int(data["den"]), int(data.get("guard", DEFAULT_GUARD)))
    except KeyError as exc:
        raise InputError(f"angle is missing field {exc.args[0]!r}") from exc
    raise InputError(f"unknown angle kind {kind!r}")


@dataclass(frozen=True)
class LongData:
    """Raw data of the general iteration formula: odd P_i, integers W and Q."""

    P: tuple
    W: tuple
    Q: tuple
    theta_raw: tuple

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(self.P))
        object.__setattr__(self, "W", tuple(self.W))
        object.__setattr__(self, "Q", tuple(self.Q))
        object.__setattr__(self, "theta_raw", tuple(self.theta_raw))
        if any(p % 2 == 0 for p in self.P):
            raise InputError("every P_i must be odd")
        if len(self.P) != len(self.theta_raw):
            raise InputError("P and theta_raw must have equal length")

    @property
    def base_index(self) -> int:
        return sum(self.P) + sum(self.W) + sum(self.Q)

    def index(self, k: int) -> int:
        total = sum(k * (p - 1) + 2 * t.floor_multiple(k) + 1 for p, t in zip(self.P, self.theta_raw))
        return total + k * sum(self.W) + k * sum(self.Q)

    def to_json(self) -> dict:
        return {
            "P": list(self.P),
            "W": list(self.W),
            "Q": list(self.Q),
            "theta_raw": [t.to_json() for t in self.theta_raw],
        }


@dataclass(frozen=True)
class IterationProfile:
    r: int
    thetas: tuple = ()
    ambient_n: int = 2
    long_data: LongData | None = None

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(self.thetas))
        if self.ambient_n < 2:
            raise InputError("ambient_n must be at least 2")
        if self.j > self.ambient_n - 1:
            raise InputError(f"at most n-1 = {self.ambient_n - 1} angles allowed, got {self.j}")
        for t in self.thetas:
            if not isinstance(t, (QuadIrrational, GuardedRational)):
                raise InputError(f"angle {t!r} is neither QuadIrrational nor GuardedRational")
        if self.long_data is not None and self.long_data.base_index != self.mu1:
            raise InvariantError(
                f"sum P + sum W + sum Q = {self.long_data.base_index} differs from r + j = {self.mu1}"
            )

    @property
    def j(self) -> int:
        return len(self.thetas)

    @property
    def mu1(self) -> int:
        return self.r + self.j

    @property
    def guard(self) -> int | None:
        guards = [t.guard for t in self.thetas if isinstance(t, GuardedRational)]
        if self.long_data is not None:
            guards += [t.guard for t in self.long_data.theta_raw if isinstance(t, GuardedRational)]
        return min(guards) if guards else None

    def to_json(self) -> dict:
        out = {"r": self.r, "n": self.ambient_n, "thetas": [t.to_json() for t in self.thetas]}
        if self.long_data is not None:
            out["long_data"] = self.long_data.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "IterationProfile":
        try:
            thetas = tuple(angle_from_json(t) for t in data.get("thetas", []))
            long_data = None
            if data.get("long_data") is not None:
                ld = data["long_data"]
                long_data = LongData(
                    tuple(ld["P"]), tuple(ld["W"]), tuple(ld["Q"]),
                    tuple(angle_from_json(t) for t in ld["theta_raw"]),
                )
            return cls(int(data["r"]), thetas, int(data["n"]), long_data)
        except KeyError as exc:
            raise InputError(f"profile is missing field {exc.args[0]!r}") from exc


def iterated_index(profile: IterationProfile, k: int) -> int:
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    value = k * profile.r + sum(2 * t.floor_multiple(k) for t in profile.thetas) + profile.j
    if profile.long_data is not None:
        other = profile.long_data.index(k)
        if other != value:
            raise InvariantError(f"canonical form gives {value} but long form gives {other} at k = {k}")
    return value


def mean_index(profile: IterationProfile) -> float:
    with mpmath.workprec(256):
        return float(profile.r + 2 * mpmath.fsum(t.value for t in profile.thetas))


def mean_index_exact(profile: IterationProfile):
    """r + 2*sum(theta) as a simplified sympy number."""
    return sympy.nsimplify(sympy.Integer(profile.r) + 2 * sum((t.sympy() for t in profile.thetas), sympy.Integer(0)))


def is_good(profile: IterationProfile, k: int) -> bool:
    """Whether gamma^k has the parity of gamma; bad covers never contribute."""
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    guard = profile.guard
    if guard is not None and k > guard:
        raise GuardExceededError(f"iterate {k} exceeds guard {guard}")
    return ((k - 1) * profile.r) % 2 == 0


@dataclass(frozen=True)
class IndexSequence:
    profile: IterationProfile
    values: tuple
    good_flags: tuple


def index_sequence(profile: IterationProfile, K: int) -> IndexSequence:
    if K < 1:
        raise InputError("K must be positive")
    values = tuple(iterated_index(profile, k) for k in range(1, K + 1))
    flags = tuple((v - values[0]) % 2 == 0 for v in values)
    return IndexSequence(profile, values, flags)


@dataclass(frozen=True)
class SZBoundResult:
    holds: bool
    max_deviation: float
    bound: int
    worst_k: int | None = None


def verify_sz_bound(profile: IterationProfile, K: int) -> SZBoundResult:
    """Check |mu(gamma^k) - k*Delta| < n - 1 for k = 1..K."""
    bound = profile.ambient_n - 1
    worst, worst_k = mpmath.mpf(0), None
    with mpmath.workprec(256):
        values = [t.value for t in profile.thetas]
        for k in range(1, K + 1):
            # mu_k - k*Delta = sum_i (1 - 2*frac(k*theta_i))
            dev = mpmath.fsum(1 - 2 * (k * v - t.floor_multiple(k)) for v, t in zip(values, profile.thetas))
            if abs(dev) > worst or worst_k is None:
                worst, worst_k = abs(dev), k
    return SZBoundResult(bool(worst < bound), float(worst), bound, worst_k)


@dataclass(frozen=True)
class MonotonicityReport:
    nondecreasing: bool
    gap2: bool
    strict_gap_found_at: int | None
    decreasing: bool
    applicable: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        """Every applicable predicate holds."""
        return all(self.applicable.values())


def monotonicity_report(profile: IterationProfile, K: int) -> MonotonicityReport:
    if K < 2:
        raise InputError("K must be at least 2")
    v = index_sequence(profile, K).values
    steps = [b - a for a, b in zip(v, v[1:])]
    nondecreasing = all(s >= 0 for s in steps)
    gap2 = all(s >= 2 for s in steps)
    strict = next((k for k, s in enumerate(steps, start=1) if s > 2), None)
    decreasing = all(s < 0 for s in steps)
    n, mu = profile.ambient_n, profile.mu1
    applicable = {}
    if mu >= n - 1:
        applicable["nondecreasing"] = nondecreasing
    if mu == n + 1:
        applicable["gap2"] = gap2 and strict is not None
    if mu <= -n:
        applicable["decreasing"] = decreasing
    return MonotonicityReport(nondecreasing, gap2, strict, decreasing, applicable)


def profile_shapes(n: int, mu1: int) -> list[tuple[int, int]]:
    """All (j, r) with r + j = mu1 and 0 <= j <= n - 1."""
    return [(j, mu1 - j) for j in range(n)]


def sum_angles(thetas: Sequence[Angle]) -> Fraction | None:
    """Exact sum when every angle is a GuardedRational, else None."""
    if all(isinstance(t, GuardedRational) for t in thetas):
        return sum((Fraction(t.num, t.den) for t in thetas), Fraction(0))
    return None
