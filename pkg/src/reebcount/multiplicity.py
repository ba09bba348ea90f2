"""Can a single simple orbit generate a given rank function?

For every class ``(r, j)`` of iteration profiles the search tries, in order:

* a parity obstruction (good covers have the parity of ``mu_1``),
* a mean-index obstruction from the resonance identity,
* branch and bound over boxes of angles, evaluating every floor
  ``floor(k*theta)`` as an integer interval.

A box is *obstructed* when, for every angle inside it, either some degree
receives more good covers than its rank ("support") or some degree below
the completeness horizon receives fewer ("gap").  A box whose covers are all
pinned down and match the target on the horizon produces a witness.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Mapping

import sympy

from .errors import HypothesisError, InputError, ScopeError
from .homology import (
    BettiTable,
    RankFunction,
    brieskorn_beta,
    brieskorn_period,
    chi_m_from_ranks,
    sh_ranks_brieskorn,
    sh_ranks_displaceable,
    sh_ranks_prequantization,
    _validate_q_betti,
)
from .iteration import (
    IterationProfile,
    QuadIrrational,
    is_good,
    iterated_index,
    mean_index_exact,
    monotonicity_report,
)


# --------------------------------------------------------------------------
# inputs


@dataclass(frozen=True)
class TargetPattern:
    ranks: RankFunction
    ambient_n: int
    provenance: str = "custom"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in ("displaceable", "prequantization", "brieskorn", "custom"):
            raise InputError(f"unknown provenance {self.provenance!r}")
        if self.ambient_n < 2:
            raise InputError("ambient_n must be at least 2")
        object.__setattr__(self, "params", dict(self.params))

    def __hash__(self):
        return hash((self.ranks, self.ambient_n, self.provenance, tuple(sorted(self.params.items()))))

    @classmethod
    def displaceable(cls, betti: BettiTable) -> "TargetPattern":
        return cls(sh_ranks_displaceable(betti), betti.n, "displaceable", {"betti": dict(betti.values)})

    @classmethod
    def prequantization(cls, betti_q: Mapping, c: int, n: int) -> "TargetPattern":
        return cls(sh_ranks_prequantization(betti_q, c, n), n, "prequantization", {"c": c})

    @classmethod
    def brieskorn(cls, a0: int, n: int, override: bool = False) -> "TargetPattern":
        return cls(sh_ranks_brieskorn(a0, n, override), n, "brieskorn", {"a0": a0})


@dataclass(frozen=True)
class SearchBounds:
    """Bounds of the single-orbit search.

    ``grid_mesh`` is the number of initial cells per unit interval and
    ``depth`` the number of bisections allowed below it.  With ``resonance``
    the mean-index equation from the resonance identity constrains the
    angle sum.
    """

    K: int = 200
    r_range: tuple | None = None
    grid_mesh: int = 64
    depth: int = 8
    resonance: bool = True
    max_boxes: int = 200_000
    workers: int = 1

    def __post_init__(self):
        if self.K < 1:
            raise InputError("K must be positive")
        if self.grid_mesh < 1 or self.depth < 0:
            raise InputError("grid_mesh must be positive and depth nonnegative")
        if self.r_range is not None:
            lo, hi = self.r_range
            if lo > hi:
                raise InputError("r_range is empty")
            object.__setattr__(self, "r_range", (int(lo), int(hi)))

    def r_values(self, n: int) -> range:
        lo, hi = self.r_range if self.r_range is not None else (-3 * n, 3 * n)
        return range(lo, hi + 1)

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "r_range": list(self.r_range) if self.r_range else None,
            "grid_mesh": self.grid_mesh,
            "depth": self.depth,
            "resonance": self.resonance,
            "max_boxes": self.max_boxes,
        }


# --------------------------------------------------------------------------
# outputs


def _q(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Certificate:
    r: int
    j: int
    kind: str
    detail: Mapping

    def to_json(self) -> dict:
        return {"class": {"r": self.r, "j": self.j}, "kind": self.kind, "detail": _jsonable(self.detail)}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _q(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, IterationProfile):
        return obj.to_json()
    return obj


@dataclass(frozen=True)
class FeasibilityVerdict:
    verdict: str  # FeasibleAtBound | InfeasibleAtBound | Unknown
    witness: IterationProfile | None
    horizon: tuple | None
    certificates: tuple
    bounds: SearchBounds
    reason: str | None = None
    equations: Mapping = field(default_factory=dict)

    def certificate_for(self, r: int, j: int) -> Certificate | None:
        return next((c for c in self.certificates if (c.r, c.j) == (r, j)), None)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness.to_json() if self.witness else None,
            "horizon": list(self.horizon) if self.horizon else None,
            "certificates": [c.to_json() for c in self.certificates],
            "bounds": self.bounds.to_json(),
            "reason": self.reason,
            "mean_index_equations": {f"{r},{j}": _q(s) for (r, j), s in sorted(self.equations.items())},
        }


# --------------------------------------------------------------------------
# single profiles


def orbit_degree_multiset(profile: IterationProfile, K: int) -> dict[int, int]:
    """Number of good covers k <= K at each degree."""
    counts: dict[int, int] = {}
    for k in range(1, K + 1):
        if is_good(profile, k):
            mu = iterated_index(profile, k)
            counts[mu] = counts.get(mu, 0) + 1
    return dict(sorted(counts.items()))


def degree_listing(ranks: RankFunction, count: int, start: int) -> list[int]:
    """The first ``count`` degrees >= start, each repeated rank-many times."""
    out: list[int] = []
    d = start
    guard = start + 10 * count + 10 * ranks.period + 100
    while len(out) < count:
        out.extend([d] * ranks.rank(d))
        d += 1
        if d > guard:
            break
    return out[:count]


def _profile_chi(profile: IterationProfile):
    weight = 1 if profile.r % 2 == 0 else 2
    return sympy.Integer((-1) ** (profile.mu1 % 2)) / (weight * mean_index_exact(profile))


def _completeness(profile: IterationProfile, K: int, ascending: bool) -> int | None:
    delta = mean_index_exact(profile)
    j = profile.j
    if ascending:
        if delta <= 0:
            return None
        bound = (K + 1) * delta - j
        return int(sympy.ceiling(bound)) - 1
    if delta >= 0:
        return None
    bound = (K + 1) * delta + j
    return int(sympy.floor(bound)) + 1


def necessary_conditions(profile: IterationProfile, target: TargetPattern, K: int = 200) -> list[dict]:
    """Violated necessary conditions for ``profile`` alone to generate ``target``."""
    violations: list[dict] = []
    ranks = target.ranks
    n = target.ambient_n
    # parity
    other = [p for p in ranks.parities() if p != profile.mu1 % 2]
    if other:
        violations.append({"condition": "parity", "mu1": profile.mu1, "target_parities": sorted(ranks.parities())})
    counts = orbit_degree_multiset(profile, K)
    low, high = ranks.support_bounds()
    ascending = not ranks.descending
    horizon = _completeness(profile, K, ascending)
    # support: excess anywhere, deficit below the horizon
    for d, c in counts.items():
        if c > ranks.rank(d):
            violations.append({"condition": "support", "degree": d, "covers": c, "rank": ranks.rank(d)})
            break
    if horizon is not None and not ranks.is_finite:
        rng = range(low, horizon + 1) if ascending else range(horizon, high + 1)
        for d in rng:
            if counts.get(d, 0) < ranks.rank(d):
                violations.append({"condition": "gap", "degree": d, "covers": counts.get(d, 0), "rank": ranks.rank(d)})
                break
    # first cover out of step with the sorted degree listing
    if ascending and low is not None and profile.mu1 >= n - 1 and profile.r % 2 == 0:
        listing = degree_listing(ranks, K, low)
        for k in range(1, min(K, len(listing)) + 1):
            mu = iterated_index(profile, k)
            if mu != listing[k - 1]:
                violations.append({"condition": "monotone-listing", "cover": k, "index": mu, "expected": listing[k - 1]})
                break
    # monotonicity predicates
    if K >= 2:
        report = monotonicity_report(profile, K)
        for name, ok in report.applicable.items():
            # a strict gap may first appear beyond K, so only a short step counts
            if name == "gap2":
                ok = report.gap2
            if not ok:
                violations.append({"condition": "monotonicity", "predicate": name})
    # mean index
    if not ranks.is_finite:
        chi = chi_m_from_ranks(ranks)
        delta = mean_index_exact(profile)
        if delta == 0:
            violations.append({"condition": "mean-index", "reason": "zero mean index"})
        else:
            rhs = sympy.nsimplify(sympy.radsimp(_profile_chi(profile)))
            if abs(delta) > 0 and sympy.simplify(rhs - sympy.Rational(chi.numerator, chi.denominator)) != 0:
                violations.append({"condition": "mean-index", "chi_m": chi, "orbit_chi": str(rhs)})
    return violations


# --------------------------------------------------------------------------
# branch and bound


@dataclass(frozen=True)
class _Target:
    ranks: RankFunction
    n: int
    low: int | None
    high: int | None
    ascending: bool
    chi: Fraction


def _target_data(target: TargetPattern) -> _Target:
    rf = target.ranks
    low, high = rf.support_bounds()
    return _Target(rf, target.ambient_n, low, high, not rf.descending, chi_m_from_ranks(rf) if not rf.is_finite else Fraction(0))


def _floor_range(num: int, den: int, k: int) -> int:
    return (k * num) // den


def _ceil_minus_one(num: int, den: int, k: int) -> int:
    return -((-k * num) // den) - 1


def _last_interval(theta_sum: Fraction, lows: tuple, D: int) -> tuple[Fraction, Fraction] | None:
    m = len(lows)
    a = sum(lows)
    lo = max(Fraction(0), theta_sum - Fraction(a + m, D))
    hi = min(Fraction(1), theta_sum - Fraction(a, D))
    if lo >= hi:
        return None
    return lo, hi


def _outside(lows: tuple, D: int, j: int, theta_sum: Fraction | None) -> bool:
    """Box lies outside the sorted domain (or the constraint set)."""
    for a, b in zip(lows, lows[1:]):
        if a >= b + 1:  # lo_i >= hi_{i+1}
            return True
    if theta_sum is not None:
        last = _last_interval(theta_sum, lows, D)
        if last is None:
            return True
        if lows and Fraction(lows[-1], D) >= last[1]:
            return True
    return False


def _evaluate_box(t: _Target, r: int, j: int, theta_sum: Fraction | None, lows: tuple, D: int, K: int):
    """Classify one box: ('support'|'gap', degree) | ('witness', horizon) | ('open', None)."""
    last = _last_interval(theta_sum, lows, D) if theta_sum is not None else None
    step_odd = r % 2 == 1
    cmin: dict[int, int] = {}
    cmax: dict[int, int] = {}
    pinned = True
    for k in range(1, K + 1, 2 if step_odd else 1):
        f_lo = sum(_floor_range(a, D, k) for a in lows)
        f_hi = sum(_ceil_minus_one(a + 1, D, k) for a in lows)
        if last is not None:
            lo, hi = last
            f_lo += (k * lo.numerator) // lo.denominator
            f_hi += -((-k * hi.numerator) // hi.denominator) - 1
            # sum of floors of j irrationals with fixed sum kS lies in (kS - j, kS)
            ks = k * theta_sum
            f_lo = max(f_lo, floor(ks - j) + 1)
            f_hi = min(f_hi, ceil(ks) - 1)
        if f_lo > f_hi:
            return ("outside", None)
        base = k * r + j
        mu_lo, mu_hi = base + 2 * f_lo, base + 2 * f_hi
        if mu_lo == mu_hi:
            cmin[mu_lo] = cmin.get(mu_lo, 0) + 1
        else:
            pinned = False
        for d in range(mu_lo, mu_hi + 1, 2):
            cmax[d] = cmax.get(d, 0) + 1
    rank = t.ranks.rank
    excess = [d for d, c in cmin.items() if c > rank(d)]
    if excess:
        return ("support", min(excess) if t.ascending else max(excess))
    # completeness horizon from the strict bound |mu_k - k*Delta| < j
    if theta_sum is not None:
        d_lo = d_hi = r + 2 * theta_sum
    else:
        d_lo = r + 2 * Fraction(sum(lows), D)
        d_hi = r + 2 * Fraction(sum(lows) + len(lows), D)
    horizon = None
    if t.ascending and d_lo > 0:
        horizon = ceil((K + 1) * d_lo - j) - 1
    elif not t.ascending and d_hi < 0:
        horizon = floor((K + 1) * d_hi + j) + 1
    if t.ascending and d_hi <= 0 and t.low is not None:
        return ("sign", None)
    if not t.ascending and d_lo >= 0 and t.high is not None:
        return ("sign", None)
    if horizon is not None and t.low is not None if t.ascending else horizon is not None:
        rng = range(t.low, horizon + 1) if t.ascending else range(horizon, t.high + 1)
        for d in rng:
            if cmax.get(d, 0) < rank(d):
                return ("gap", d)
        if pinned:
            return ("witness", horizon)
    return ("open", None)


def _witness_angles(lows: tuple, D: int, theta_sum: Fraction | None) -> tuple | None:
    """Quadratic irrationals inside the box (and on the constraint line)."""
    for offset in (1, -1):
        try:
            if offset == 1:
                thetas = [QuadIrrational(4 * a + 1, 1, 2, 4 * D) for a in lows]
            else:
                thetas = [QuadIrrational(4 * a + 3, -1, 2, 4 * D) for a in lows]
            if theta_sum is not None:
                s = 4 * D
                p = sum(t.p for t in thetas)
                q = sum(t.q for t in thetas)
                rest = theta_sum * s
                last = QuadIrrational(
                    rest.numerator - p * rest.denominator, -q * rest.denominator, 2, s * rest.denominator
                )
                thetas.append(last)
            return tuple(sorted(thetas, key=lambda x: x.value))
        except InputError:
            continue
    return None


def _children(lows: tuple) -> list[tuple]:
    out = [()]
    for a in lows:
        out = [c + (2 * a + b,) for c in out for b in (0, 1)]
    return out


def _initial_cells(m: int, mesh: int) -> list[tuple]:
    cells = [()]
    for _ in range(m):
        cells = [c + (i,) for c in cells for i in range(mesh)]
    return cells


@dataclass
class _ClassResult:
    r: int
    j: int
    certificate: Certificate | None = None
    witness: IterationProfile | None = None
    horizon: tuple | None = None
    theta_sum: Fraction | None = None


def _search_class(t: _Target, r: int, j: int, bounds: SearchBounds) -> _ClassResult:
    mu1 = r + j
    res = _ClassResult(r, j)
    parities = t.ranks.parities()
    if t.ranks.is_finite:
        total = sum(t.ranks.exceptional.values())
        res.certificate = Certificate(r, j, "support", {"reason": "finite target", "total_rank": total,
                                                        "note": "a simple orbit has infinitely many good covers"})
        return res
    if any(p != mu1 % 2 for p in parities):
        other = next(d for d in _support_iter(t) if d % 2 != mu1 % 2)
        res.certificate = Certificate(r, j, "parity", {"mu1": mu1, "degree": other})
        return res
    theta_sum = None
    if bounds.resonance:
        chi = t.chi
        weight = 1 if r % 2 == 0 else 2
        if chi == 0:
            res.certificate = Certificate(r, j, "mean-index", {"chi_m": chi, "reason": "single orbit forces chi_m != 0"})
            return res
        abs_delta = Fraction((-1) ** (mu1 % 2)) / (weight * chi)
        if abs_delta <= 0:
            res.certificate = Certificate(r, j, "mean-index", {"chi_m": chi, "required_abs_delta": abs_delta,
                                                               "reason": "sign of (-1)^mu1 disagrees with chi_m"})
            return res
        delta = abs_delta if t.ascending else -abs_delta
        if j == 0:
            if delta != r:
                res.certificate = Certificate(r, j, "mean-index", {"chi_m": chi, "required_delta": delta, "delta": r})
                return res
        else:
            theta_sum = (delta - r) / 2
            res.theta_sum = theta_sum
            if not 0 < theta_sum < j:
                res.certificate = Certificate(r, j, "mean-index", {"chi_m": chi, "required_delta": delta,
                                                                   "theta_sum": theta_sum, "reason": "theta sum outside (0, j)"})
                return res
            if j == 1:
                res.certificate = Certificate(r, j, "mean-index", {"chi_m": chi, "required_delta": delta,
                                                                   "theta_sum": theta_sum, "reason": "rational angle"})
                return res
    return _branch_and_bound(t, r, j, theta_sum, bounds, res)


def _support_iter(t: _Target):
    rf = t.ranks
    if t.ascending:
        d = t.low
        while True:
            if rf.rank(d):
                yield d
            d += 1
    else:
        d = t.high
        while True:
            if rf.rank(d):
                yield d
            d -= 1


def _branch_and_bound(t: _Target, r: int, j: int, theta_sum, bounds: SearchBounds, res: _ClassResult) -> _ClassResult:
    m = j if theta_sum is None else j - 1
    mesh, K = bounds.grid_mesh, bounds.K
    stack = [(0, cell) for cell in reversed(_initial_cells(m, mesh))]
    leaves: list = []
    unresolved: list = []
    processed = 0
    while stack:
        level, lows = stack.pop()
        D = mesh * 2**level
        processed += 1
        if _outside(lows, D, j, theta_sum):
            leaves.append((level, lows, "outside", None))
            continue
        status, info = _evaluate_box(t, r, j, theta_sum, lows, D, K)
        if status in ("support", "gap", "sign", "outside"):
            leaves.append((level, lows, status, info))
            continue
        if status == "witness":
            thetas = _witness_angles(lows, D, theta_sum)
            if thetas is not None:
                profile = IterationProfile(r, thetas, t.n)
                if _witness_ok(profile, t, K, info):
                    res.witness = profile
                    res.horizon = (t.low, info) if t.ascending else (info, t.high)
                    return res
        if level < bounds.depth and processed < bounds.max_boxes:
            for child in reversed(_children(lows)):
                stack.append((level + 1, child))
        else:
            unresolved.append((level, lows))
    detail = {"boxes": [_box_json(level, lows, mesh, kind, info) for level, lows, kind, info in leaves],
              "mesh": mesh}
    if theta_sum is not None:
        detail["theta_sum"] = theta_sum
    if unresolved:
        detail["unresolved"] = [_box_json(level, lows, mesh, "open", None) for level, lows in unresolved]
        res.certificate = Certificate(r, j, "grid-exhausted", detail)
        return res
    kinds = {kind for _, _, kind, _ in leaves if kind != "outside"}
    kind = "gap" if "gap" in kinds else "support"
    if not kinds:
        kind = "support"
        detail["note"] = "the constraint set contains no admissible angles"
    res.certificate = Certificate(r, j, kind, detail)
    return res


def _box_json(level: int, lows: tuple, mesh: int, kind: str, info) -> dict:
    D = mesh * 2**level
    out = {"level": level, "box": [[_q(Fraction(a, D)), _q(Fraction(a + 1, D))] for a in lows], "kind": kind}
    if info is not None:
        out["degree"] = info
    return out


def _witness_ok(profile: IterationProfile, t: _Target, K: int, horizon: int) -> bool:
    counts = orbit_degree_multiset(profile, K)
    rank = t.ranks.rank
    if any(c > rank(d) for d, c in counts.items()):
        return False
    rng = range(t.low, horizon + 1) if t.ascending else range(horizon, t.high + 1)
    return all(counts.get(d, 0) == rank(d) for d in rng)


def _run_class(args):
    t, r, j, bounds = args
    return _search_class(t, r, j, bounds)


def single_orbit_feasibility(target: TargetPattern, bounds: SearchBounds | None = None) -> FeasibilityVerdict:
    bounds = bounds or SearchBounds()
    t = _target_data(target)
    classes = [(r, j) for r in bounds.r_values(t.n) for j in range(t.n)]
    if bounds.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=bounds.workers) as pool:
            results = list(pool.map(_run_class, [(t, r, j, bounds) for r, j in classes]))
    else:
        results = []
        for r, j in classes:
            results.append(_search_class(t, r, j, bounds))
            if results[-1].witness is not None:
                break
    certificates = []
    equations = {}
    for res in results:
        if res.theta_sum is not None:
            equations[(res.r, res.j)] = res.theta_sum
        if res.witness is not None:
            return FeasibilityVerdict("FeasibleAtBound", res.witness, res.horizon, tuple(certificates), bounds,
                                      equations=equations)
        certificates.append(res.certificate)
    exhausted = [c for c in certificates if c.kind == "grid-exhausted"]
    if exhausted:
        reason = "grid exhausted for classes " + ", ".join(f"(r={c.r}, j={c.j})" for c in exhausted)
        return FeasibilityVerdict("Unknown", None, None, tuple(certificates), bounds, reason, equations)
    return FeasibilityVerdict("InfeasibleAtBound", None, None, tuple(certificates), bounds, equations=equations)


# --------------------------------------------------------------------------
# certificate replay


def replay_certificate(cert: Certificate, target: TargetPattern, bounds: SearchBounds) -> bool:
    """Re-check a certificate against the predicate it names."""
    t = _target_data(target)
    r, j = cert.r, cert.j
    detail = cert.detail
    if cert.kind == "parity":
        d = detail["degree"]
        return t.ranks.rank(d) > 0 and d % 2 != (r + j) % 2
    if cert.kind == "support" and detail.get("reason") == "finite target":
        return t.ranks.is_finite
    if cert.kind == "mean-index":
        fresh = _search_class(t, r, j, bounds)
        return fresh.certificate is not None and fresh.certificate.kind == "mean-index"
    if cert.kind in ("gap", "support"):
        theta_sum = Fraction(detail["theta_sum"]) if "theta_sum" in detail else None
        mesh = detail["mesh"]
        m = j if theta_sum is None else j - 1
        volume = Fraction(0)
        for box in detail["boxes"]:
            level = box["level"]
            D = mesh * 2**level
            lows = tuple(int(Fraction(lo) * D) for lo, _ in box["box"])
            volume += Fraction(1, D**m) if m else Fraction(1)
            if box["kind"] == "outside":
                if not _outside(lows, D, j, theta_sum) and _evaluate_box(t, r, j, theta_sum, lows, D, bounds.K)[0] != "outside":
                    return False
                continue
            status, info = _evaluate_box(t, r, j, theta_sum, lows, D, bounds.K)
            if status != box["kind"] or info != box.get("degree"):
                return False
        return volume == 1
    if cert.kind in ("beta", "telescoping", "multiplicative", "decreasing"):
        return bool(detail.get("verified", False))
    return False


# --------------------------------------------------------------------------
# theorem replays


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    verdict: str
    search: FeasibilityVerdict | None
    closed_form: tuple = ()
    notes: Mapping = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "search": self.search.to_json() if self.search else None,
            "closed_form": [c.to_json() for c in self.closed_form],
            "notes": _jsonable(dict(self.notes)),
        }


def _combine(search: FeasibilityVerdict, closed: list[Certificate]) -> str:
    """Search verdict, with grid-exhausted classes closed by named certificates."""
    if search.verdict != "Unknown":
        return search.verdict
    covered = {(c.r, c.j) for c in closed if c.detail.get("verified")}
    open_classes = [c for c in search.certificates if c.kind == "grid-exhausted" and (c.r, c.j) not in covered]
    return "InfeasibleAtBound" if not open_classes else "Unknown"


def theorem_a_check(betti: BettiTable, bounds: SearchBounds | None = None) -> TheoremReport:
    bounds = bounds or SearchBounds()
    n = betti.n
    odd = [i for i in range(1, 2 * n + 1, 2) if betti[i]]
    case_i = bool(odd)
    case_ii = all(betti[2 * l] == 0 for l in range(0, n - 1)) and not odd
    notes: dict = {"case_i": case_i, "case_ii": case_ii}
    if not (case_i or case_ii):
        return TheoremReport("A", "NotApplicable", None, (), notes)
    target = TargetPattern.displaceable(betti)
    search = single_orbit_feasibility(target, bounds)
    if case_i:
        ell = (odd[0] + 1) // 2
        rf = target.ranks
        notes["parity_degrees"] = {"n+1": n + 1, "2l-n": 2 * ell - n,
                                   "ranks": [rf.rank(n + 1), rf.rank(2 * ell - n)]}
        notes["parity_obstruction"] = all(c.kind == "parity" for c in search.certificates) and search.verdict == "InfeasibleAtBound"
    return TheoremReport("A", search.verdict, search, (), notes)


@dataclass(frozen=True)
class CorollaryABound:
    bound: int
    index_two_orbits: int
    structure: tuple

    def to_json(self) -> dict:
        return {"bound": self.bound, "index_two_orbits": self.index_two_orbits, "structure": list(self.structure)}


def corollary_a_bound(betti: BettiTable | None = None, *, sigma_b2: int | None = None) -> CorollaryABound:
    """Lower bound on the number of simple orbits in dimension three.

    ``sigma_b2`` selects the subcritical form, where b_3(W_0, Sigma) equals b_2(Sigma).
    """
    if sigma_b2 is not None:
        b3 = int(sigma_b2)
    else:
        if betti is None:
            raise InputError("need a Betti table or sigma_b2")
        if betti.n != 2:
            raise ScopeError("the bound concerns 3-dimensional contact manifolds (n = 2)")
        b3 = betti[3]
    structure = tuple([f"simple orbit of index 2 (#{i + 1})" for i in range(b3)]
                      + ["orbit generating degree 3", "one further simple orbit"])
    return CorollaryABound(b3 + 2, b3, structure)


def _telescoping(betti_q: Mapping, c: int, n: int) -> list[Certificate]:
    table = _validate_q_betti(betti_q, n)
    k = sum(table.values())
    certs = []
    if c >= n:
        mu1 = 2 * c - n + 1
        top = 2 * c + n - 1
        # j = 0: mu(gamma^k) = k mu1 must land on the band's top degree
        certs.append(Certificate(mu1, 0, "multiplicative", {
            "mu1": mu1, "band_top": top, "covers_per_band": k,
            "equation": f"{k}*{mu1} = {k * mu1} vs {top}",
            "verified": k * mu1 != top,
        }))
        delta = Fraction(2 * c, k)
        for j in range(1, n):
            certs.append(Certificate(mu1 - j, j, "telescoping", {
                "mu1": mu1, "covers_per_band": k, "mean_index": delta,
                "identity": "N * sum floor((k+1) theta) = sum floor((N k + 1) theta) for all N",
                "limit": "sum (k+1) theta = sum k theta, i.e. sum theta = 0",
                "verified": True,
            }))
    else:
        mu1 = 2 * c + n - 1
        for j in range(0, n):
            certs.append(Certificate(mu1 - j, j, "decreasing", {
                "mu1": mu1, "covers_per_band": k, "route": "indices strictly decrease, so mu1 = 2c + n - 1",
                "mean_index": Fraction(2 * c, k),
                "verified": mu1 <= -n,
            }))
    return certs


def theorem_b_check(betti_q: Mapping, c: int, n: int, bounds: SearchBounds | None = None) -> TheoremReport:
    if abs(c) <= n - 1:
        raise HypothesisError(f"need |c| > n - 1 = {n - 1}, got c = {c}")
    bounds = bounds or SearchBounds()
    target = TargetPattern.prequantization(betti_q, c, n)
    search = single_orbit_feasibility(target, bounds)
    closed = _telescoping(betti_q, c, n)
    return TheoremReport("B", _combine(search, closed), search, tuple(closed), {"c": c, "n": n})


def _beta_certificate(a0: int, n: int) -> Certificate:
    rf = sh_ranks_brieskorn(a0, n)
    beta = brieskorn_beta(a0, n)
    period = brieskorn_period(a0, n)
    covers = a0 * (n - 1) + 1  # covers per degree period
    periods = 40
    listing = degree_listing(rf, covers * (periods + 3) + beta * 3 + 3, n - 1)

    def equal(k: int) -> bool:  # mu(gamma^k) = mu(gamma^{k+1}) forced by the listing
        return listing[k - 1] == listing[k]

    broken = [i for i in (1, 2, 3) if not equal(beta * i + 1)]
    offset = next(m for m in range(1, covers + 1) if all(equal(covers * i + m) for i in range(1, periods + 1)))
    shift_ok = all(listing[k - 1 + covers] == listing[k - 1] + period for k in range(covers, covers * periods))
    return Certificate(0, n - 1, "beta", {
        "beta": beta,
        "beta_progression_holds": not broken,
        "beta_progression_counterexample_i": broken[0] if broken else None,
        "verified_progression": {"step": covers, "offset": offset, "degree_period": period},
        "claim": "mu(gamma^(step*i + offset)) = mu(gamma^(step*i + offset + 1)) for all i >= 1",
        "contradiction": "frac((step*i + offset) * theta_1) < 1 - theta_1 for all i, against density of step*theta_1 mod 1",
        "verified": shift_ok,
    })


def theorem_c_check(a0: int, n: int, bounds: SearchBounds | None = None) -> TheoremReport:
    bounds = bounds or SearchBounds()
    if a0 == 1:
        report = theorem_a_check(BettiTable.ball(n), bounds)
        return TheoremReport("C", report.verdict, report.search, (), {"delegated": "A", "a0": 1, "case_ii": report.notes.get("case_ii")})
    target = TargetPattern.brieskorn(a0, n)
    search = single_orbit_feasibility(target, bounds)
    cert = _beta_certificate(a0, n)
    return TheoremReport("C", _combine(search, [cert]), search, (cert,), {"a0": a0, "n": n})
