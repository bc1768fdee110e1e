import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gserre.decision_engine import (
    ExtensionProblem,
    bound_table,
    certify_extension,
    certify_srification,
    ic_defined,
    relative_srho,
)
from gserre.errors import InvariantViolation
from gserre.griffith_examples import build_profile, d_sequence, enumerate_specs, export_model, profile_satisfies_relative
from gserre.perversity_calculus import pi_min, pi_plus
from gserre.rho_calculus import enumerate_w, identity, rho_r
from gserre.sampling import random_certificate, random_model, random_open_dense, random_sheaf
from gserre.scheme_model import SchemeModel, SheafData, ccodim, in_pD_ge0, induced_perversity
from gserre.verdict import Status


def chain(dim=4):
    """One component, a chain of points of every codimension."""
    points = [
        {"id": f"x{c}", "codim": c, "components": ["X"], "specializes_to": [f"x{c + 1}"] if c < dim else []}
        for c in range(dim + 1)
    ]
    return SchemeModel.build({"X": dim}, points)


def cm(model):
    return SheafData({p: (model.codim(p), model.codim(p)) for p in model.points})


def test_cohen_macaulay_passes_everything():
    m = chain()
    U = {"x0", "x1"}
    for rho in enumerate_w(6):
        problem = ExtensionProblem(m, U, cm(m).restrict(U), rho)
        assert relative_srho(cm(m), problem).passed
        assert ic_defined(problem).passed
        v = certify_extension(problem, cm(m))
        assert v.status is Status.PASS
        assert v.clauses["ext.s2"] and v.data["unique_weak_extension"]


def test_depth_bound_example_witness():
    m = chain(5)
    U = {"x0", "x1", "x2", "x3"}
    F = SheafData({"x2": (2, 0), "x3": (3, 3), "x4": (4, 4), "x5": (5, 5)})
    problem = ExtensionProblem(m, U, F.restrict(U), rho_r(3))
    assert problem.n == 4
    v = relative_srho(F, problem)
    assert v.status is Status.FAIL
    assert (v.witness.point, v.witness.required, v.witness.actual) == ("x2", 1, 0)


def test_empty_complement_is_plain_srho():
    m = chain(3)
    F = SheafData({"x3": (3, 1)})
    problem = ExtensionProblem(m, frozenset(m.points), F, rho_r(2))
    assert problem.n == float("inf")
    v = relative_srho(F, problem)
    assert not v.passed and v.witness.required == 2
    assert v.clauses["rel.plain-srho"] is False


def test_ic_defined_needs_ccodim_two():
    m = chain(3)
    U = {"x0"}
    v = ic_defined(ExtensionProblem(m, U, cm(m).restrict(U), rho_r(2)))
    assert v.status is Status.NOT_APPLICABLE and v.clauses == {"hyp.ccodim": False}


def test_ic_defined_failure_witness():
    m = chain(4)
    U = {"x0", "x1", "x2"}
    push = SheafData({"x2": (2, 0)})
    v = ic_defined(ExtensionProblem(m, U, push, rho_r(2)))
    # shift 3 - 2 + 1 = 2: codim 2 needs rho(3) - 1 = 1
    assert v.status is Status.FAIL and v.witness.point == "x2" and v.witness.required == 1
    assert v.clauses["ic.full-support-srho"] is False


def test_certificate_failures():
    m = chain(4)
    U = {"x0", "x1"}
    problem = ExtensionProblem(m, U, cm(m).restrict(U), identity())
    shallow = SheafData({p: (m.codim(p), m.codim(p) if p != "x3" else 1) for p in m.points})
    v = certify_extension(problem, shallow)
    assert v.status is Status.FAIL and v.witness.point == "x3" and v.witness.clause == "ext.relative"
    wrong = SheafData({p: (m.codim(p), 0 if p == "x1" else m.codim(p)) for p in m.points})
    v = certify_extension(problem, wrong)
    assert not v.clauses["ext.restriction"]
    broken = SheafData({"x1": (2, 2)})
    v = certify_extension(problem, broken)
    assert v.clauses["ext.sheaf"] is False and v.data["diagnostic"] == "sheaf.dim-exceeds-codim"


def test_problem_validation():
    m = chain(3)
    with pytest.raises(InvariantViolation) as exc:
        ExtensionProblem(m, {"x1"}, SheafData(), rho_r(2))
    assert exc.value.code == "open.not-open"
    with pytest.raises(InvariantViolation) as exc:
        ExtensionProblem(m, {"x0"}, SheafData(), rho_r(1))
    assert exc.value.code == "w.below-rho2"


@pytest.mark.parametrize("spec", enumerate_specs(5, range(3, 6)), ids=lambda s: f"{s.rho}-n{s.n}")
def test_griffith_export_cross_check(spec):
    model, O, smooth = export_model(spec)
    profile = build_profile(spec)
    n = int(ccodim(model, model.complement(smooth)))
    for rho in enumerate_w(6):
        problem = ExtensionProblem(model, smooth, O.restrict(smooth), rho)
        engine = certify_extension(problem, O).passed
        assert engine == profile_satisfies_relative(profile, rho, n), rho


def test_griffith_srification_needs_a_certificate():
    model, O, smooth = export_model(d_sequence(rho_r(2), 3))
    v = certify_srification(model, O, rho_r(3))
    assert v.status is Status.INCONCLUSIVE
    assert v.data["locus"] == sorted(smooth) and v.data["ccodim"] == 3
    assert v.data["bound_table"] == {"y1_0": 3}
    assert v.witness.point == "y1_0"
    assert v.clauses["srif.locus-coincides-s2"] is False
    deeper = SheafData({p: (model.codim(p), model.codim(p)) for p in model.points})
    assert certify_srification(model, O, rho_r(3), candidate=deeper).status is Status.PASS
    assert certify_srification(model, O, rho_r(3), candidate=O).status is Status.FAIL
    assert certify_srification(model, O, rho_r(2)).status is Status.PASS


def test_srification_not_applicable_below_ccodim_two():
    m = chain(3)
    F = SheafData({"x1": (1, 0), "x2": (2, 0), "x3": (3, 0)})
    v = certify_srification(m, F, rho_r(2))
    assert v.status is Status.NOT_APPLICABLE and v.clauses["hyp.ccodim"] is False


def test_srification_rejects_open_set_outside_locus():
    model, O, smooth = export_model(d_sequence(rho_r(2), 3))
    v = certify_srification(model, O, rho_r(3), U=model.points.keys())
    assert v.status is Status.NOT_APPLICABLE and v.clauses["srif.open-in-locus"] is False


def test_cohen_macaulay_self_certifies():
    m = chain(5)
    v = certify_srification(m, cm(m), identity())
    assert v.status is Status.PASS and v.data["candidate"] == "identity"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bound_tables_do_not_depend_on_the_open_set(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    U, V = random_open_dense(rng, m), random_open_dense(rng, m)
    rho = rng.choice(list(enumerate_w(6)))
    tu, tv = bound_table(m, U, rho), bound_table(m, V, rho)
    for z in set(tu) & set(tv):
        assert tu[z] == tv[z] == rho(m.codim(z))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bridge_property(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    U = random_open_dense(rng, m)
    F = random_sheaf(rng, m)
    rho = rng.choice(list(enumerate_w(6)))
    problem = ExtensionProblem(m, U, F.restrict(U), rho)
    n = int(problem.n)
    p = induced_perversity(pi_plus(pi_min(rho, n), n), m)
    assert relative_srho(F, problem).passed == in_pD_ge0(F.embed(), p, m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_certificate_monotone_in_rho(seed):
    rng = random.Random(seed)
    m = random_model(rng, max_points=20)
    U = random_open_dense(rng, m)
    cert = random_certificate(rng, m, slack=1)
    ws = list(enumerate_w(5))
    rho = rng.choice(ws)
    if certify_extension(ExtensionProblem(m, U, cert.restrict(U), rho), cert).passed:
        for sigma in [s for s in ws if s <= rho] + [rho_r(2)]:
            assert certify_extension(ExtensionProblem(m, U, cert.restrict(U), sigma), cert).passed


def test_verdicts_are_deterministic():
    model, O, _ = export_model(d_sequence(rho_r(2), 3))
    a = certify_srification(model, O, rho_r(3)).to_dict()
    b = certify_srification(model, O, rho_r(3)).to_dict()
    assert a == b
