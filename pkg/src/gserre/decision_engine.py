"""Certificate checks for ``S_rho``-extension and finite ``S_rho``-ification.

The engine never builds the intermediate extension; it checks a supplied
candidate sheaf.  A candidate that restricts to the given data on ``U`` and
meets the ``p_rho+`` depth bounds everywhere is, up to isomorphism, the
intermediate extension, and it is a sheaf, so a PASS certifies existence.

Clause ids used in verdicts:

``hyp.open-dense``, ``hyp.ccodim``
    hypotheses on the open set and its closed complement.
``rel.bound``
    depth at every stalk meets the ``p_rho+`` bound.
``rel.plain-srho``
    depth at every stalk meets ``rho(dim)``.
``ic.defined``, ``ic.full-support-srho``
    the data on ``U`` lies in ``p_rho+ D>=0``; the sufficient condition
    "support is all of ``U`` and ``S_rho``".
``ext.sheaf``, ``ext.restriction``, ``ext.relative``, ``ext.s2``
    candidate is valid sheaf data; agrees with the data on ``U``; meets the
    relative bounds; also meets them for ``rho_2``.
``srif.*``
    finite ``S_rho``-ification bookkeeping, see :func:`certify_srification`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InvariantViolation
from .perversity_calculus import p_rho_criterion
from .rho_calculus import TailedFunction, _require_w, rho_r
from .scheme_model import (
    SchemeModel,
    SheafData,
    ccodim,
    is_S_rho,
    locus_openness,
    open_interior,
    require_open_dense,
    s_rho_locus,
    validate_sheaf,
)
from .verdict import Status, Verdict, Violation, sort_violations


@dataclass(frozen=True)
class ExtensionProblem:
    """Open dense ``U``, the pushforward of the structure sheaf of the cover
    of ``U`` (as sheaf data on ``U``), and the condition ``rho``."""

    model: SchemeModel
    U: frozenset[str]
    pushforward: SheafData
    rho: TailedFunction

    def __post_init__(self):
        _require_w(self.rho)
        object.__setattr__(self, "U", require_open_dense(self.model, self.U))
        validate_sheaf(self.model, self.pushforward, domain=self.U)

    @property
    def Z(self) -> frozenset[str]:
        return self.model.complement(self.U)

    @property
    def n(self) -> float:
        return ccodim(self.model, self.Z)

    @property
    def full_support(self) -> bool:
        return self.pushforward.support == self.U


def _fmt_n(n: float):
    return None if n == math.inf else int(n)


def required_bound(codim: int, rho: TailedFunction, n: float) -> int:
    """Depth bound at codimension ``codim``.  Below c-codimension 2 every
    point needs ``rho(codim)``."""
    if n == math.inf or n < 2:
        return rho(codim)
    return p_rho_criterion(codim, rho, int(n))


def relative_srho(F: SheafData, problem: ExtensionProblem) -> Verdict:
    """Depth conditions for a finite cover to be ``S_rho`` relative to ``U``.

    The ``rel.bound`` clause is the verdict.  ``rel.plain-srho`` is reported
    alongside; the two can only differ where some stalk has ``dim < codim``.
    """
    model, rho, n = problem.model, problem.rho, problem.n
    validate_sheaf(model, F)
    violations = []
    for pid in F:
        s = F[pid]
        # empty complement: nothing to extend over, plain S_rho
        need = rho(s.dim) if n == math.inf else required_bound(model.codim(pid), rho, n)
        if s.depth < need:
            violations.append(
                Violation(pid, "rel.bound", need, s.depth, f"codim {model.codim(pid)}, c-codim {_fmt_n(n)}")
            )
    plain = is_S_rho(F, rho, model)
    violations = sort_violations(violations)
    return Verdict(
        Status.FAIL if violations else Status.PASS,
        {"rel.bound": not violations, "rel.plain-srho": plain.passed},
        violations,
        {
            "rho": rho.encode(),
            "ccodim": _fmt_n(n),
            # below c-codim 2 there is no S_rho-perversity to compare with
            "equivalent_to_pD_ge0": n >= 2 and n != math.inf,
            "plain_srho_violations": [v.to_dict() for v in plain.violations],
        },
    )


def _require_ccodim2(problem: ExtensionProblem) -> Verdict | None:
    n = problem.n
    if n >= 2:
        return None
    return Verdict(
        Status.NOT_APPLICABLE,
        {"hyp.ccodim": False},
        (),
        {"ccodim": _fmt_n(n), "reason": f"c-codimension of the complement is {_fmt_n(n)}, needs >= 2"},
    )


def ic_defined(problem: ExtensionProblem) -> Verdict:
    """Whether the intermediate extension of the pushforward is defined."""
    na = _require_ccodim2(problem)
    if na is not None:
        return na
    model, rho, n = problem.model, problem.rho, problem.n
    violations = []
    for pid in problem.pushforward:
        need = required_bound(model.codim(pid), rho, n)
        s = problem.pushforward[pid]
        if s.depth < need:
            violations.append(Violation(pid, "ic.defined", need, s.depth, f"codim {model.codim(pid)}"))
    sufficient = problem.full_support and is_S_rho(problem.pushforward, rho, model).passed
    violations = sort_violations(violations)
    return Verdict(
        Status.FAIL if violations else Status.PASS,
        {"hyp.ccodim": True, "ic.defined": not violations, "ic.full-support-srho": sufficient},
        violations,
        {"ccodim": _fmt_n(n), "rho": rho.encode()},
    )


def certify_extension(problem: ExtensionProblem, candidate: SheafData) -> Verdict:
    """Check a candidate for the pushforward of the ``S_rho``-extension."""
    na = _require_ccodim2(problem)
    if na is not None:
        return na
    model = problem.model
    clauses = {"hyp.ccodim": True, "hyp.open-dense": True}
    violations: list[Violation] = []
    try:
        validate_sheaf(model, candidate)
        clauses["ext.sheaf"] = True
    except InvariantViolation as exc:
        clauses["ext.sheaf"] = False
        return Verdict(
            Status.FAIL,
            clauses,
            (Violation(exc.subject or "", "ext.sheaf", detail=str(exc)),),
            {"diagnostic": exc.code},
        )

    restricted = candidate.restrict(problem.U)
    mismatched = []
    for pid in sorted(problem.U):
        want, got = problem.pushforward.get(pid), restricted.get(pid)
        if want != got:
            mismatched.append(
                Violation(pid, "ext.restriction", detail=f"expected {_stalk(want)}, candidate has {_stalk(got)}")
            )
    clauses["ext.restriction"] = not mismatched
    violations += mismatched

    rel = relative_srho(candidate, problem)
    clauses["ext.relative"] = rel.passed
    violations += [Violation(v.point, "ext.relative", v.required, v.actual, v.detail) for v in rel.violations]

    passed = clauses["ext.restriction"] and clauses["ext.relative"]
    data = {"rho": problem.rho.encode(), "ccodim": _fmt_n(problem.n)}
    if passed:
        # consequence: the same sheaf is the S_2-extension
        s2 = relative_srho(candidate, ExtensionProblem(model, problem.U, problem.pushforward, rho_r(2)))
        clauses["ext.s2"] = s2.passed
        data["unique_weak_extension"] = True
    return Verdict(Status.PASS if passed else Status.FAIL, clauses, sort_violations(violations), data)


def _stalk(s) -> str:
    return "zero stalk" if s is None else f"(dim {s.dim}, depth {s.depth})"


def bound_table(model: SchemeModel, U: Iterable[str], rho: TailedFunction) -> dict[str, int]:
    """Depth each point outside ``U`` must have in any certificate."""
    U = frozenset(U)
    Z = model.complement(U)
    n = ccodim(model, Z)
    return {z: required_bound(model.codim(z), rho, n) for z in sorted(Z)}


def certify_srification(
    model: SchemeModel,
    F: SheafData,
    rho: TailedFunction,
    candidate: SheafData | None = None,
    U: Iterable[str] | None = None,
) -> Verdict:
    """Finite ``S_rho``-ification that is an isomorphism off c-codimension >= 2.

    ``U`` defaults to the largest open subset of the ``S_rho`` locus of ``F``;
    a supplied ``U`` must be open, dense and inside the locus.  Without a
    candidate, ``F`` itself is tried (an identity ification); if it fails the
    verdict is INCONCLUSIVE and carries the bound table a certificate must meet.
    """
    _require_w(rho)
    validate_sheaf(model, F)
    locus = s_rho_locus(F, rho, model)
    s2_locus = s_rho_locus(F, rho_r(2), model)
    non_open = locus_openness(model, locus)
    interior = open_interior(model, locus)
    chosen = interior if U is None else frozenset(U)
    data = {
        "rho": rho.encode(),
        "locus": sorted(locus),
        "locus_open": not non_open,
        "locus_non_open_witnesses": [list(p) for p in non_open],
        "s2_locus": sorted(s2_locus),
        "open_set": sorted(chosen),
    }
    clauses = {"srif.locus-coincides-s2": locus == s2_locus}

    inside = chosen <= locus
    clauses["srif.open-in-locus"] = inside
    try:
        require_open_dense(model, chosen)
        clauses["hyp.open-dense"] = True
    except InvariantViolation as exc:
        clauses["hyp.open-dense"] = False
        data["reason"] = str(exc)
        return Verdict(Status.NOT_APPLICABLE, clauses, (), data)
    if not inside:
        data["reason"] = "the open set is not contained in the S_rho locus"
        return Verdict(Status.NOT_APPLICABLE, clauses, (), data)
    n = ccodim(model, model.complement(chosen))
    data["ccodim"] = _fmt_n(n)
    clauses["hyp.ccodim"] = n >= 2
    if n < 2:
        data["reason"] = "open dense subsets of the S_rho locus have complement of c-codimension < 2"
        return Verdict(Status.NOT_APPLICABLE, clauses, (), data)

    data["bound_table"] = bound_table(model, chosen, rho)
    problem = ExtensionProblem(model, chosen, F.restrict(chosen), rho)
    supplied = candidate is not None
    result = certify_extension(problem, candidate if supplied else F)
    clauses.update({k: v for k, v in result.clauses.items() if k.startswith("ext.")})
    data["candidate"] = "supplied" if supplied else "identity"
    if result.passed:
        return Verdict(Status.PASS, clauses, (), data)
    if supplied:
        return Verdict(Status.FAIL, clauses, result.violations, data)
    return Verdict(Status.INCONCLUSIVE, clauses, result.violations, data)
