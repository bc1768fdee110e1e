"""Exhaustive and randomized verification suites.

Each suite returns a :class:`SuiteResult`; the ``verify`` CLI subcommands and
the acceptance tests both run these.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable

from .decision_engine import ExtensionProblem, certify_extension, relative_srho
from .errors import InvariantViolation
from .griffith_examples import (
    build_profile,
    d_sequence,
    enumerate_specs,
    first_violation,
    profile_is_S,
    strictness_check,
)
from .perversity_calculus import (
    NumericalPerversity,
    dual_by_conjugation,
    enumerate_Pn_rho,
    exists_pi_plus_eq_rho,
    in_Pn,
    numerical_dual,
    p_rho_criterion,
    phi,
    pi_max,
    pi_min,
    pi_plus,
)
from .rho_calculus import (
    TailedFunction,
    dual,
    enumerate_w,
    enumerate_wprime,
    identity,
    in_W,
    inclination,
    rho_r,
)
from .sampling import random_certificate, random_model, random_open_dense, random_sheaf
from .scheme_model import (
    SchemeModel,
    SheafData,
    in_pD_ge0,
    induced_perversity,
    validate_sheaf,
)

MAX_REPORTED = 20


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    exceptions: list[str] = field(default_factory=list)
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.exceptions and self.checked > 0

    def fail(self, message: str) -> None:
        self.exceptions.append(message)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: checked={self.checked} exceptions={len(self.exceptions)}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "exceptions": self.exceptions[:MAX_REPORTED],
            "exception_count": len(self.exceptions),
            "notes": self.notes,
        }


def _timed(fn: Callable[..., SuiteResult]) -> Callable[..., SuiteResult]:
    def run(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- lattice of perversities ----------------------------------------------


@_timed
def prop33_nonempty(horizon: int = 8) -> SuiteResult:
    """``P_2(f)`` nonempty iff ``f`` in W, over W' with ``f(1) = 1``."""
    res = SuiteResult("prop33.nonempty")
    for f in enumerate_wprime(horizon):
        if f(1) != 1:
            continue
        res.checked += 1
        if bool(enumerate_Pn_rho(f, 2, horizon)) != in_W(f):
            res.fail(f"{f}: P_2 nonempty={not in_W(f)} but in_W={in_W(f)}")
    return res


@_timed
def prop33_nonempty_wide(horizon: int = 6) -> SuiteResult:
    """Same equivalence over prefixes with increments in ``{-1, 0, 1, 2}``,
    so decreasing and jumping functions are covered too."""
    res = SuiteResult("prop33.nonempty-wide")
    for word in itertools.product((-1, 0, 1, 2), repeat=horizon - 1):
        values = [0, 1]
        for step in word:
            values.append(values[-1] + step)
        if min(values) < 0:
            continue
        for slope in (0, 1):
            f = TailedFunction(tuple(values), slope)
            res.checked += 1
            if bool(enumerate_Pn_rho(f, 2, horizon)) != in_W(f):
                res.fail(f"{f}: P_2 nonempty disagrees with membership in W")
    return res


def _pn_table(horizon: int, levels) -> dict:
    return {(rho, n): enumerate_Pn_rho(rho, n, horizon) for rho in enumerate_w(horizon) for n in levels}


@_timed
def prop33_extremes(horizon: int = 8, levels=range(2, 7), compare_upto: int = 16, table=None) -> SuiteResult:
    """Min and max of the enumerated ``P_n(rho)`` are ``pi_min`` and ``pi_max``."""
    res = SuiteResult("prop33.extremes")
    table = table if table is not None else _pn_table(horizon, levels)
    ks = range(compare_upto + 1)
    for (rho, n), elems in table.items():
        res.checked += 1
        lo, hi = pi_min(rho, n), pi_max(rho, n)
        if not elems:
            res.fail(f"{rho}, n={n}: P_n(rho) empty")
            continue
        low = [min(p(k) for p in elems) for k in ks]
        high = [max(p(k) for p in elems) for k in ks]
        if low != [lo(k) for k in ks] or lo not in elems:
            res.fail(f"{rho}, n={n}: minimum {low} vs pi_min {lo}")
        if high != [hi(k) for k in ks] or hi not in elems:
            res.fail(f"{rho}, n={n}: maximum {high} vs pi_max {hi}")
    return res


@_timed
def prop33_plus_equals(horizon: int = 8, levels=range(2, 7), table=None) -> SuiteResult:
    """Some ``pi`` in ``P_n(rho)`` has ``pi+ = rho`` iff ``rho(n-1) < rho(n)``."""
    res = SuiteResult("prop33.plus-equals-rho")
    table = table if table is not None else _pn_table(horizon, levels)
    for (rho, n), elems in table.items():
        res.checked += 1
        brute = any(pi_plus(p, n).func == rho for p in elems)
        if brute != exists_pi_plus_eq_rho(rho, n):
            res.fail(f"{rho}, n={n}: brute force {brute}, closed form {not brute}")
    return res


@_timed
def prop33_phi(horizon: int = 8, conj_horizon: int = 10) -> SuiteResult:
    """``phi`` is two-to-one onto W with the stated fibres; duality facts."""
    res = SuiteResult("prop33.phi")
    level2 = [NumericalPerversity(f) for f in enumerate_wprime(horizon) if in_Pn(f, 2)]
    fibres: dict[TailedFunction, set] = defaultdict(set)
    for p in level2:
        fibres[phi(p)].add(p)
    w = set(enumerate_w(horizon))
    res.checked += 1
    if set(fibres) != w:
        res.fail(f"image of phi differs from W: {len(set(fibres) ^ w)} mismatches")
    for rho in sorted(w, key=lambda f: (f.increments(), f.slope)):
        res.checked += 1
        if fibres.get(rho) != {pi_min(rho, 2), pi_max(rho, 2)}:
            res.fail(f"{rho}: fibre {sorted(map(str, fibres.get(rho, ())))}")
    for f in enumerate_wprime(conj_horizon):
        if not in_Pn(f, 2):
            continue
        res.checked += 1
        p = NumericalPerversity(f)
        if phi(numerical_dual(p)) != dual(phi(p)):
            res.fail(f"{p}: phi(id - pi) != dual(phi(pi))")
    for rho in enumerate_w(conj_horizon):
        res.checked += 1
        if dual(dual(rho)) != rho:
            res.fail(f"{rho}: dual is not an involution")
    for r in range(2, 9):
        res.checked += 1
        shown = TailedFunction.from_callable(lambda k: k if k <= 1 else (2 if k <= r else k - (r - 2)), r + 1, 1)
        if dual(rho_r(r)) != shown:
            res.fail(f"dual(rho_{r}) = {dual(rho_r(r))}, expected {shown}")
    res.checked += 1
    if dual(identity()) != rho_r(2):
        res.fail(f"dual(id) = {dual(identity())}")
    return res


def prop33(horizon: int = 8, levels=range(2, 7)) -> list[SuiteResult]:
    table = _pn_table(horizon, levels)
    return [
        prop33_nonempty(horizon),
        prop33_nonempty_wide(),
        prop33_extremes(horizon, levels, table=table),
        prop33_plus_equals(horizon, levels, table=table),
        prop33_phi(horizon),
    ]


@_timed
def duality(horizon: int = 10) -> SuiteResult:
    """Closed-form dual vs conjugation; involution; order reversal."""
    res = SuiteResult("duality")
    ws = list(enumerate_w(horizon))
    duals = {rho: dual(rho) for rho in ws}
    for rho in ws:
        res.checked += 1
        if duals[rho] != dual_by_conjugation(rho):
            res.fail(f"{rho}: closed form {duals[rho]} vs conjugation {dual_by_conjugation(rho)}")
        if not in_W(duals[rho]) or dual(duals[rho]) != rho:
            res.fail(f"{rho}: dual not an involution on W")
    for a in ws:
        for b in ws:
            res.checked += 1
            if a.le(b) != duals[b].le(duals[a]):
                res.fail(f"{a} <= {b} is {a.le(b)} but duals compare the other way")
    return res


@_timed
def prho_paths(horizon: int = 8, levels=range(2, 9), codims=range(0, 17)) -> SuiteResult:
    """Piecewise depth bound vs ``pi_plus(pi_min(rho, n), n)``."""
    res = SuiteResult("prho.two-paths")
    for rho in enumerate_w(horizon):
        for n in levels:
            plus = pi_plus(pi_min(rho, n), n)
            for c in codims:
                res.checked += 1
                a, b = p_rho_criterion(c, rho, n), plus(c)
                if a != b:
                    res.fail(f"{rho}, n={n}, codim={c}: formula {a} vs definitional {b}")
    return res


# -- example family ---------------------------------------------------------


@_timed
def griffith_suite(horizon: int = 6, levels=range(3, 7), strict_horizon: int = 10) -> SuiteResult:
    """Profiles satisfy ``S_{t_n rho}`` and fail every strictly larger condition."""
    res = SuiteResult("griffith.strictness")
    specs = enumerate_specs(horizon, levels)
    res.notes["specs"] = len(specs)
    exhaustive = 0
    for spec in specs:
        res.checked += 1
        t = inclination(spec.rho, spec.n)
        for m in spec.d:
            if not (m <= spec.n and t(m - 1) == t(m) < t(m + 1)):
                res.fail(f"{spec.rho}, n={spec.n}: index {m} is not a flat-then-rise point")
        profile = build_profile(spec)
        if not profile_is_S(profile, t):
            res.fail(f"{spec.rho}, n={spec.n}: profile fails S_(t_n rho) at {first_violation(profile, t)}")
        report = strictness_check(spec, strict_horizon)
        exhaustive += report.checked
        for bad in report.exceptions:
            res.fail(f"{spec.rho}, n={spec.n}: profile satisfies the larger condition {bad}")
    res.notes["rho_prime_checked"] = exhaustive
    return res


@_timed
def griffith_golden() -> SuiteResult:
    """``(rho_2, n = 3)``."""
    res = SuiteResult("griffith.golden")
    spec = d_sequence(rho_r(2), 3)
    profile = build_profile(spec)
    checks = [
        ((spec.d, spec.e, spec.r) == ((3,), (1,), (2,)), f"d, e, r = {spec.d}, {spec.e}, {spec.r}"),
        (profile.pairs() == {(0, 0), (1, 1), (2, 2), (3, 3), (3, 2)}, f"pairs {sorted(profile.pairs())}"),
        (profile_is_S(profile, rho_r(2)), "S_2 fails"),
    ]
    bad = first_violation(profile, rho_r(3))
    checks.append((bad is not None and (bad.codim, bad.depth) == (3, 2), f"S_3 witness {bad}"))
    for ok, msg in checks:
        res.checked += 1
        if not ok:
            res.fail(msg)
    return res


# -- randomized model corpus -------------------------------------------------


def model_corpus(count: int, seed: int):
    rng = random.Random(seed)
    for _ in range(count):
        model = random_model(rng)
        yield rng, model, random_open_dense(rng, model)


@_timed
def bridge(count: int = 1000, seed: int = 20261014, w_horizon: int = 6) -> SuiteResult:
    """``relative_srho`` agrees with membership in ``p_rho+ D>=0``."""
    res = SuiteResult("bridge")
    ws = list(enumerate_w(w_horizon))
    fails = 0
    for rng, model, U in model_corpus(count, seed):
        F = random_sheaf(rng, model, full_support=rng.random() < 0.3)
        rho = rng.choice(ws)
        problem = ExtensionProblem(model, U, F.restrict(U), rho)
        n = int(problem.n)
        verdict = relative_srho(F, problem)
        p = induced_perversity(pi_plus(pi_min(rho, n), n), model)
        embedded = F.embed()
        member = in_pD_ge0(embedded, p, model)
        bad = {x for x in model.points if min(embedded.shriek(x), default=math.inf) < p[x]}
        res.checked += 1
        fails += not member
        if verdict.passed != member or {v.point for v in verdict.violations} != bad:
            res.fail(f"model #{res.checked}: relative={verdict.passed}, pD>=0={member}")
    res.notes["failing_models"] = fails
    res.notes["passing_models"] = res.checked - fails
    return res


@_timed
def monotonicity(count: int = 1000, seed: int = 20261015, w_horizon: int = 6, per_model: int = 6) -> SuiteResult:
    """A certificate passing for ``rho`` passes for every smaller ``sigma`` and for ``rho_2``."""
    res = SuiteResult("certificate.monotonicity")
    ws = list(enumerate_w(w_horizon))
    passing = 0
    for rng, model, U in model_corpus(count, seed):
        cert = random_certificate(rng, model)
        push = cert.restrict(U)
        for rho in rng.sample(ws, per_model):
            verdict = certify_extension(ExtensionProblem(model, U, push, rho), cert)
            if not verdict.passed:
                continue
            passing += 1
            for sigma in [s for s in ws if s.le(rho)] + [rho_r(2)]:
                res.checked += 1
                if not certify_extension(ExtensionProblem(model, U, push, sigma), cert).passed:
                    res.fail(f"passes for {rho} but not for {sigma}")
    res.notes["passing_certificates"] = passing
    return res


# -- validators --------------------------------------------------------------


def _tiny_model(edges_from_p1=()) -> dict:
    return {
        "components": [{"id": "X", "dim": 3}],
        "points": [
            {"id": "g", "codim": 0, "components": ["X"]},
            {"id": "p1", "codim": 1, "components": ["X"], "specializes_to": list(edges_from_p1)},
            {"id": "p2", "codim": 2, "components": ["X"], "specializes_to": ["p3"]},
            {"id": "p3", "codim": 3, "components": ["X"]},
        ],
    }


def rejection_cases() -> list[tuple[str, Callable[[], object], str]]:
    ok = SchemeModel.from_dict(_tiny_model())
    inverted = _tiny_model()
    inverted["points"][3]["specializes_to"] = ["p2"]
    return [
        ("non-monotone rho", lambda: TailedFunction.parse("0,1,2,1;+1"), "wprime.monotone"),
        ("slope-2 jump", lambda: TailedFunction.parse("0,2;+0"), "wprime.slope"),
        ("nonzero origin", lambda: TailedFunction.parse("1,2;+0"), "wprime.origin"),
        ("non-canonical encoding", lambda: TailedFunction.parse("0,1,2,2;+0"), "encoding.non-canonical"),
        ("bad syntax", lambda: TailedFunction.parse("0,1;1"), "encoding.syntax"),
        ("codim inversion", lambda: SchemeModel.from_dict(inverted), "model.codim-specialization"),
        ("depth > dim", lambda: validate_sheaf(ok, SheafData({"p3": (2, 3)})), "sheaf.depth-exceeds-dim"),
        ("dim > codim", lambda: validate_sheaf(ok, SheafData({"p3": (3, 1), "p2": (3, 1)})),
         "sheaf.dim-exceeds-codim"),
        ("non-open U", lambda: ExtensionProblem(ok, frozenset({"g", "p1", "p3"}), SheafData(), rho_r(2)),
         "open.not-open"),
        ("non-dense U", lambda: ExtensionProblem(ok, frozenset(), SheafData(), rho_r(2)),
         "open.not-dense"),
        ("not in W", lambda: dual(rho_r(1)), "w.below-rho2"),
    ]


@_timed
def rejections() -> SuiteResult:
    res = SuiteResult("validator.rejections")
    for name, thunk, code in rejection_cases():
        res.checked += 1
        try:
            thunk()
        except InvariantViolation as exc:
            if exc.code != code:
                res.fail(f"{name}: got {exc.code}, expected {code}")
        else:
            res.fail(f"{name}: accepted")
    return res
