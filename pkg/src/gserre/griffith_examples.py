"""Depth profiles of the varieties that are strictly ``S_rho`` through codimension n.

The variety is a product of Segre-product cones ``X_{r_i, e_i}`` with the
pairwise products of their vertices removed.  Only its ``(codim, depth)``
data matters here: off the strata ``Y_i`` it is smooth, and on ``Y_i`` a point
at offset ``c`` has codimension ``d_i + c`` and depth ``r_i + c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InvariantViolation
from .perversity_calculus import pi_min, pi_plus
from .rho_calculus import TailedFunction, _require_w, enumerate_w, inclination, wprime_violation
from .scheme_model import SchemeModel, SheafData


@dataclass(frozen=True)
class GriffithSpec:
    rho: TailedFunction
    n: int
    d: tuple[int, ...]
    e: tuple[int, ...]
    r: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"rho": self.rho.encode(), "n": self.n, "d": list(self.d), "e": list(self.e), "r": list(self.r)}


@dataclass(frozen=True, order=True)
class ProfilePoint:
    codim: int
    depth: int
    stratum: str


@dataclass(frozen=True)
class DepthProfile:
    total_dim: int
    points: tuple[ProfilePoint, ...]
    # (d_i, r_i) per singular stratum, in stratum order
    strata: tuple[tuple[int, int], ...] = ()

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((p.codim, p.depth) for p in self.points)

    def to_dict(self) -> dict:
        return {
            "total_dim": self.total_dim,
            "pairs": [[c, d] for c, d in sorted(self.pairs())],
            "strata": {
                p.stratum: [[q.codim, q.depth] for q in self.points if q.stratum == p.stratum]
                for p in self.points
            },
        }


def d_sequence(rho: TailedFunction, n: int) -> GriffithSpec:
    """Indices ``m <= n`` where ``t_n rho`` is flat on ``[m-1, m]`` and rises at ``m+1``."""
    _require_w(rho)
    if n < 3:
        raise InvariantViolation("griffith.level", f"n must be at least 3, got {n}")
    if all(rho(k) == k for k in range(n + 1)):
        raise InvariantViolation("griffith.identity", f"rho agrees with the identity on [0, {n}]", rho.encode())
    t = inclination(rho, n)
    d = tuple(m for m in range(1, n + 1) if t(m + 1) > t(m) == t(m - 1))
    r = tuple(rho(m) for m in d)
    e = tuple(m - rho(m) for m in d)
    assert d and all(ri < di for ri, di in zip(r, d))
    return GriffithSpec(rho, n, d, e, r)


def segre_depth_axioms(a: int, b: int) -> tuple[int, int, int]:
    """``(dim, vertex codim, vertex depth)`` of ``X_{a,b}``, taken as given:
    it is ``S_a`` but not ``S_{a+1}``, singular only at the vertex."""
    if a < 2 or b < 1:
        raise ValueError(f"need a >= 2 and b >= 1, got a={a}, b={b}")
    return a + b, a + b, a


def build_profile(spec: GriffithSpec) -> DepthProfile:
    total = sum(spec.d)
    points = [ProfilePoint(c, c, "smooth") for c in range(total + 1)]
    for i, (di, ri, ei) in enumerate(zip(spec.d, spec.r, spec.e), start=1):
        dim, vertex_codim, vertex_depth = segre_depth_axioms(ri, ei)
        assert dim == vertex_codim == di and vertex_depth == ri
        for c in range(total - di + 1):
            points.append(ProfilePoint(di + c, ri + c, f"Y{i}"))
    return DepthProfile(total, tuple(sorted(points)), tuple(zip(spec.d, spec.r)))


def first_violation(profile: DepthProfile, sigma: TailedFunction) -> ProfilePoint | None:
    for p in sorted(profile.points):
        if p.depth < sigma(p.codim):
            return p
    return None


def profile_is_S(profile: DepthProfile, sigma: TailedFunction) -> bool:
    """Structure-sheaf ``S_sigma``: ``depth >= sigma(codim)`` at every pair."""
    problem = wprime_violation(sigma)
    if problem is not None:
        raise problem
    return first_violation(profile, sigma) is None


def profile_satisfies_relative(profile: DepthProfile, rho: TailedFunction, n: int) -> bool:
    """Profile pairs against ``p_rho+`` computed from ``pi_min`` and the plus-shift."""
    plus = pi_plus(pi_min(rho, n), n)
    return all(p.depth >= plus(p.codim) for p in profile.points)


@dataclass(frozen=True)
class StrictnessReport:
    spec: GriffithSpec
    checked: int
    # rho' for which no violated pair was found
    exceptions: tuple[TailedFunction, ...]
    witnesses: tuple[tuple[TailedFunction, ProfilePoint], ...]

    @property
    def passed(self) -> bool:
        return not self.exceptions

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "checked": self.checked,
            "exceptions": [f.encode() for f in self.exceptions],
            "first_witness": (
                {"rho_prime": self.witnesses[0][0].encode(), "codim": self.witnesses[0][1].codim,
                 "depth": self.witnesses[0][1].depth, "stratum": self.witnesses[0][1].stratum}
                if self.witnesses else None
            ),
        }


def strictness_check(spec: GriffithSpec, horizon: int) -> StrictnessReport:
    """Every ``rho'`` in W (prefix horizon <= ``horizon``) with
    ``t_n rho' > t_n rho`` must fail ``S_rho'`` on the profile."""
    if horizon < spec.n + 2:
        raise ValueError(f"horizon must be at least n + 2 = {spec.n + 2}")
    profile = build_profile(spec)
    base = inclination(spec.rho, spec.n)
    checked = 0
    exceptions, witnesses = [], []
    for rho2 in enumerate_w(horizon):
        if not inclination(rho2, spec.n) > base:
            continue
        checked += 1
        bad = first_violation(profile, rho2)
        if bad is None:
            exceptions.append(rho2)
        else:
            witnesses.append((rho2, bad))
    return StrictnessReport(spec, checked, tuple(exceptions), tuple(witnesses))


def export_model(spec: GriffithSpec) -> tuple[SchemeModel, SheafData, frozenset[str]]:
    """A point model realizing the profile, its structure sheaf, and the
    smooth locus as an open set.

    One chain of specializations per stratum; the singular chain ``Y_i``
    starts below the smooth point of codimension ``d_i - 1``.
    """
    profile = build_profile(spec)
    total = profile.total_dim
    points = []
    stalks = {}
    for c in range(total + 1):
        nxt = [f"s{c + 1}"] if c < total else []
        points.append({"id": f"s{c}", "codim": c, "components": ["X"], "specializes_to": nxt})
        stalks[f"s{c}"] = (c, c)
    for i, (di, ri) in enumerate(zip(spec.d, spec.r), start=1):
        span = total - di
        points[di - 1]["specializes_to"].append(f"y{i}_0")
        for c in range(span + 1):
            nxt = [f"y{i}_{c + 1}"] if c < span else []
            points.append({"id": f"y{i}_{c}", "codim": di + c, "components": ["X"], "specializes_to": nxt})
            stalks[f"y{i}_{c}"] = (di + c, ri + c)
    model = SchemeModel.build({"X": total}, points)
    smooth = frozenset(f"s{c}" for c in range(total + 1))
    return model, SheafData(stalks), smooth


def enumerate_specs(horizon: int, levels: Iterable[int]) -> list[GriffithSpec]:
    """Every valid ``(rho, n)`` with ``rho`` in W of prefix horizon <= ``horizon``."""
    out = []
    for rho in enumerate_w(horizon):
        for n in levels:
            if n >= 3 and any(rho(k) != k for k in range(n + 1)):
                out.append(d_sequence(rho, n))
    return out
