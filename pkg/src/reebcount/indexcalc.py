"""Maslov-type index and mean index of sampled symplectic paths.

The index is the total winding of the rho-angle (in units of pi) along the
path followed by a canonical extension into one of two model matrices:
``-I`` for endpoints in Sp+ and ``diag(2, 1/2, -1, ..., -1)`` for Sp-.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import IndexUndefinedError, InputError, InvariantError, ResolutionError
from .symplin import (
    NondegeneracyClass,
    SymplecticMatrix,
    _analyse,
    _normalize_angle,
    hyperbolic,
    identity,
    nondegeneracy_class,
    parse_matrix_json,
    rational_circle_point,
    rho_angle,
    rotation,
    to_scalar,
)

INTEGRALITY_TOL = 1e-6


def _as_time(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return to_scalar(value)


@dataclass(frozen=True)
class SymplecticPath:
    samples: tuple  # ((t, SymplecticMatrix), ...)
    tau: Fraction

    def __post_init__(self):
        samples = tuple((_as_time(t), m) for t, m in self.samples)
        tau = _as_time(self.tau)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "tau", tau)
        if tau <= 0:
            raise InputError("tau must be positive")
        if len(samples) < 3:
            # one interval cannot be checked against the density contract
            raise ResolutionError("a path needs t = 0, the endpoint and at least one interior sample")
        t0, m0 = samples[0]
        if t0 != 0 or m0 != identity(m0.dim):
            raise InputError("the first sample must be (0, identity)")
        dims = {m.dim for _, m in samples}
        if len(dims) != 1:
            raise InputError("all samples must have the same dimension")
        times = [t for t, _ in samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InputError("sample times must be strictly increasing")
        if times[-1] != tau:
            raise InputError("the last sample time must equal tau")

    @property
    def endpoint(self) -> SymplecticMatrix:
        return self.samples[-1][1]

    @property
    def dim(self) -> int:
        return self.samples[0][1].dim

    @classmethod
    def from_function(cls, func: Callable[[Fraction], SymplecticMatrix], tau=1, samples: int = 1000) -> "SymplecticPath":
        tau = _as_time(tau)
        times = [tau * Fraction(i, samples) for i in range(samples + 1)]
        pts = [(t, func(t)) for t in times]
        pts[0] = (Fraction(0), identity(pts[0][1].dim))
        return cls(tuple(pts), tau)

    def to_json(self) -> dict:
        return {
            "tau": _time_str(self.tau),
            "samples": [{"t": _time_str(t), "matrix": m.to_json()} for t, m in self.samples],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SymplecticPath":
        try:
            samples = tuple((s["t"], parse_matrix_json(s["matrix"])) for s in data["samples"])
            return cls(samples, data["tau"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"path JSON is missing {exc}") from exc


def _time_str(t: Fraction) -> str:
    return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


def rotation_path(a, samples: int = 1000, bits: int = 80) -> SymplecticPath:
    """t -> R(2*pi*a*t) on [0, 1] with exact rational circle points."""
    a = _as_time(a)

    def at(t):
        with mpmath.workprec(bits + 64):
            angle = 2 * mpmath.pi * mpmath.mpf(a.numerator) / a.denominator * mpmath.mpf(t.numerator) / t.denominator
        return rotation(*rational_circle_point(angle, bits))

    return SymplecticPath.from_function(at, 1, samples)


def hyperbolic_path(base=2, samples: int = 100, bits: int = 64) -> SymplecticPath:
    """t -> diag(base^t, base^-t) on [0, 1], entries rounded to rationals."""

    def at(t):
        with mpmath.workprec(bits + 64):
            x = mpmath.power(mpmath.mpf(base), mpmath.mpf(t.numerator) / t.denominator)
            q = Fraction(int(mpmath.nint(x * 2**bits)), 2**bits)
        return hyperbolic(q)

    path = SymplecticPath.from_function(at, 1, samples)
    samples_ = list(path.samples)
    samples_[-1] = (Fraction(1), hyperbolic(base))
    return SymplecticPath(tuple(samples_), 1)


def iterate_path(path: SymplecticPath, k: int) -> SymplecticPath:
    """The k-fold concatenation Psi^k(t) = Psi(t - j*tau) Psi(tau)^j."""
    if k < 1:
        raise InputError("k must be positive")
    end = path.endpoint
    out = list(path.samples)
    power = end
    for j in range(1, k):
        shift = j * path.tau
        out += [(t + shift, m @ power) for t, m in path.samples[1:]]
        power = power @ end
    return SymplecticPath(tuple(out), k * path.tau)


def _lift(path: SymplecticPath):
    with mpmath.workprec(128):
        angles = [rho_angle(m) for _, m in path.samples]
        total = mpmath.mpf(0)
        half_pi = mpmath.pi / 2
        for i in range(1, len(angles)):
            step = _normalize_angle(angles[i] - angles[i - 1])
            if abs(step) >= half_pi:
                raise ResolutionError(
                    f"rho-angle jumps by {float(step):.4f} rad between t = {path.samples[i - 1][0]} "
                    f"and t = {path.samples[i][0]}; refine the sampling",
                    interval=(path.samples[i - 1][0], path.samples[i][0]),
                )
            total += step
        return total


def rho_winding(path: SymplecticPath) -> float:
    """Net change of the lifted rho-angle along the path, divided by pi."""
    with mpmath.workprec(128):
        return float(_lift(path) / mpmath.pi)


def mean_index_of_path(path: SymplecticPath) -> float:
    return rho_winding(path)


def extension_winding(m: SymplecticMatrix) -> float:
    """Winding (units of pi) of the canonical extension from ``m`` to its model matrix.

    Each semisimple Krein-positive unit eigenvalue exp(i*a), a in (0, 2*pi),
    is rotated to -1, contributing (pi - a)/pi.  The collapse of
    hyperbolic, quadruple and N2 parts keeps rho constant.
    """
    cls = nondegeneracy_class(m)
    if cls is NondegeneracyClass.DEGENERATE:
        raise IndexUndefinedError("endpoint has eigenvalue 1; the index is undefined")
    if m.dim == 2:
        with mpmath.workprec(128):
            angle = rho_angle(m)
            (a, b), (c, d) = m.entries
            if -2 < a + d < 2:
                a_pos = angle if angle > 0 else angle + 2 * mpmath.pi
                return float((mpmath.pi - a_pos) / mpmath.pi)
            return 0.0
    (unit, _real, _quad, _plus, _minus), _ = _analyse(m)
    with mpmath.workprec(128):
        total = mpmath.mpf(0)
        for phi, alg, geo, p, q in unit:
            jordan = alg - geo
            total += ((p - jordan) - (q - jordan)) * (mpmath.pi - phi)
        return float(total / mpmath.pi)


def cz_index(path: SymplecticPath) -> int:
    endpoint = path.endpoint
    if nondegeneracy_class(endpoint) is NondegeneracyClass.DEGENERATE:
        raise IndexUndefinedError("endpoint has eigenvalue 1; the index is undefined")
    total = rho_winding(path) + extension_winding(endpoint)
    nearest = round(total)
    if abs(total - nearest) > INTEGRALITY_TOL:
        raise InvariantError(f"index sum {total!r} is not within {INTEGRALITY_TOL} of an integer")
    return int(nearest)


def cz_index_samples(samples: Sequence, tau) -> int:
    return cz_index(SymplecticPath(tuple(samples), tau))
