"""Finite depth-poset models of equidimensional schemes.

A model is a finite set of points, each with a codimension and the set of
irreducible components containing it, ordered by specialization
(``x <= y`` when ``y`` lies in the closure of ``x``).  The generic point of a
component implicitly specializes to every point of that component.

Sheaves are recorded by ``(dim, depth)`` of their stalks; complexes by the
degrees in which the ``i^*_x`` and ``i^!_x`` cohomology is nonzero.  That is all
the data the depth and t-structure predicates below look at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvariantViolation
from .perversity_calculus import NumericalPerversity
from .rho_calculus import TailedFunction, wprime_violation
from .verdict import Status, Verdict, Violation, sort_violations


@dataclass(frozen=True)
class PointRecord:
    id: str
    codim: int
    components: frozenset[str]


class SchemeModel:
    """Validated, immutable point model.

    Build with :meth:`build` or :meth:`from_dict`; both raise
    :class:`InvariantViolation` naming the offending point.
    """

    def __init__(self, dim: int, components: tuple[str, ...], points: dict[str, PointRecord],
                 edges: dict[str, frozenset[str]]):
        self.dim = dim
        self.components = components
        self.points = points
        self._edges = edges
        self._up = _closure(points, edges)
        down: dict[str, set[str]] = {p: set() for p in points}
        for x, ys in self._up.items():
            for y in ys:
                down[y].add(x)
        self._down = {p: frozenset(s) for p, s in down.items()}
        self.generic = {
            c: next(p.id for p in points.values() if p.codim == 0 and c in p.components)
            for c in components
        }

    @classmethod
    def build(cls, components: Mapping[str, int], points: Iterable[Mapping],
              ) -> "SchemeModel":
        """``components`` maps id to dimension; each point is a mapping with
        ``id``, ``codim``, ``components`` and optional ``specializes_to``."""
        dims = {str(c): int(d) for c, d in components.items()}
        if not dims:
            raise InvariantViolation("model.no-components", "a model needs at least one component")
        if len(set(dims.values())) != 1:
            raise InvariantViolation("model.equidim", f"component dimensions differ: {dims}")
        dim = next(iter(dims.values()))

        records: dict[str, PointRecord] = {}
        raw_edges: dict[str, list[str]] = {}
        for spec in points:
            pid = str(spec["id"])
            if pid in records:
                raise InvariantViolation("model.duplicate-id", "point id used twice", pid)
            comps = frozenset(str(c) for c in spec.get("components", ()))
            if not comps:
                raise InvariantViolation("model.no-component", "point lies on no component", pid)
            unknown = sorted(comps - dims.keys())
            if unknown:
                raise InvariantViolation("model.unknown-component", f"unknown components {unknown}", pid)
            codim = int(spec["codim"])
            if not 0 <= codim <= dim:
                raise InvariantViolation("model.codim-range", f"codim {codim} outside [0, {dim}]", pid)
            records[pid] = PointRecord(pid, codim, comps)
            raw_edges[pid] = [str(y) for y in spec.get("specializes_to", ())]

        for c in sorted(dims):
            generic = [p.id for p in records.values() if p.codim == 0 and c in p.components]
            if len(generic) != 1:
                raise InvariantViolation(
                    "model.generic-point", f"component has {len(generic)} codim-0 points, needs 1", c
                )
        for p in records.values():
            if p.codim == 0 and len(p.components) != 1:
                raise InvariantViolation("model.generic-point", "a codim-0 point lies on one component", p.id)

        edges: dict[str, set[str]] = {pid: set() for pid in records}
        for x, ys in raw_edges.items():
            for y in ys:
                if y not in records:
                    raise InvariantViolation("model.unknown-point", f"specializes to unknown point {y!r}", x)
                edges[x].add(y)
        for p in records.values():
            if p.codim == 0:
                (c,) = p.components
                edges[p.id].update(q.id for q in records.values() if c in q.components and q.id != p.id)
        for x in sorted(edges):
            for y in sorted(edges[x]):
                if records[x].codim >= records[y].codim:
                    raise InvariantViolation(
                        "model.codim-specialization",
                        f"specializes to {y!r} but codim {records[x].codim} >= {records[y].codim}",
                        x,
                    )
                if not records[x].components <= records[y].components:
                    raise InvariantViolation(
                        "model.component-specialization",
                        f"specialization {y!r} misses some of its components",
                        x,
                    )
        return cls(dim, tuple(sorted(dims)), records, {k: frozenset(v) for k, v in edges.items()})

    @classmethod
    def from_dict(cls, data: Mapping) -> "SchemeModel":
        try:
            components = {c["id"]: c["dim"] for c in data["components"]}
            points = data["points"]
        except (KeyError, TypeError) as exc:
            raise InvariantViolation("model.schema", f"missing or malformed field: {exc}") from exc
        return cls.build(components, points)

    def to_dict(self) -> dict:
        explicit = {
            x: sorted(ys - (self._implicit(x))) for x, ys in self._edges.items()
        }
        return {
            "components": [{"id": c, "dim": self.dim} for c in self.components],
            "points": [
                {
                    "id": p.id,
                    "codim": p.codim,
                    "components": sorted(p.components),
                    "specializes_to": explicit[p.id],
                }
                for p in sorted(self.points.values(), key=lambda p: (p.codim, p.id))
            ],
        }

    def _implicit(self, x: str) -> set[str]:
        p = self.points[x]
        if p.codim != 0:
            return set()
        (c,) = p.components
        return {q.id for q in self.points.values() if c in q.components and q.id != x}

    # -- order ------------------------------------------------------------

    def codim(self, x: str) -> int:
        return self.points[x].codim

    def specializations(self, x: str) -> frozenset[str]:
        """Points in the closure of ``x``, including ``x``."""
        return self._up[x]

    def generizations(self, x: str) -> frozenset[str]:
        """Points whose closure contains ``x``, including ``x``."""
        return self._down[x]

    def leq(self, x: str, y: str) -> bool:
        return y in self._up[x]

    def closure(self, pts: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for p in pts:
            out |= self._up[p]
        return frozenset(out)

    def complement(self, pts: Iterable[str]) -> frozenset[str]:
        return frozenset(self.points) - frozenset(pts)

    def __repr__(self) -> str:
        return f"SchemeModel(dim={self.dim}, components={len(self.components)}, points={len(self.points)})"


def _closure(points, edges) -> dict[str, frozenset[str]]:
    up: dict[str, frozenset[str]] = {}
    # codim strictly increases along edges, so descending codim is a valid order
    for p in sorted(points.values(), key=lambda p: -p.codim):
        acc = {p.id}
        for y in edges[p.id]:
            acc |= up[y]
        up[p.id] = frozenset(acc)
    return up


# -- sheaf and complex data ---------------------------------------------


@dataclass(frozen=True)
class Stalk:
    dim: int
    depth: int


class SheafData(Mapping):
    """Point id -> :class:`Stalk`; points not present have zero stalk."""

    def __init__(self, stalks: Mapping[str, Stalk | Mapping | tuple] = ()):
        data = {}
        for pid, s in dict(stalks).items():
            if isinstance(s, Stalk):
                data[str(pid)] = s
            elif isinstance(s, Mapping):
                data[str(pid)] = Stalk(int(s["dim"]), int(s["depth"]))
            else:
                data[str(pid)] = Stalk(int(s[0]), int(s[1]))
        self._stalks = data

    def __getitem__(self, key):
        return self._stalks[key]

    def __iter__(self):
        return iter(self._stalks)

    def __len__(self):
        return len(self._stalks)

    def __eq__(self, other):
        if isinstance(other, SheafData):
            return self._stalks == other._stalks
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._stalks.items()))

    def __repr__(self):
        return f"SheafData({self._stalks!r})"

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._stalks)

    def restrict(self, pts: Iterable[str]) -> "SheafData":
        keep = set(pts)
        return SheafData({p: s for p, s in self._stalks.items() if p in keep})

    def to_dict(self) -> dict:
        return {p: {"dim": s.dim, "depth": s.depth} for p, s in sorted(self._stalks.items())}

    def embed(self) -> "ComplexData":
        """The sheaf as a complex in degree 0.  Local cohomology is nonzero
        in degrees ``depth`` and ``dim`` (and possibly between)."""
        return ComplexData({p: ({0}, {s.depth, s.dim}) for p, s in self._stalks.items()})


class ComplexData(Mapping):
    """Point id -> ``(star_support, shriek_support)`` as frozensets of degrees."""

    def __init__(self, entries: Mapping = ()):
        data = {}
        for pid, e in dict(entries).items():
            if isinstance(e, Mapping):
                star, shriek = e.get("star", ()), e.get("shriek", ())
            else:
                star, shriek = e
            data[str(pid)] = (frozenset(int(k) for k in star), frozenset(int(k) for k in shriek))
        self._entries = data

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def star(self, x: str) -> frozenset[int]:
        return self._entries.get(x, (frozenset(), frozenset()))[0]

    def shriek(self, x: str) -> frozenset[int]:
        return self._entries.get(x, (frozenset(), frozenset()))[1]

    def to_dict(self) -> dict:
        return {p: {"star": sorted(a), "shriek": sorted(b)} for p, (a, b) in sorted(self._entries.items())}


def validate_sheaf(model: SchemeModel, F: SheafData, domain: Iterable[str] | None = None) -> None:
    """Check ``depth <= dim <= codim`` and that the support is closed in ``domain``."""
    dom = frozenset(model.points) if domain is None else frozenset(domain)
    for pid in sorted(F):
        if pid not in model.points:
            raise InvariantViolation("sheaf.unknown-point", "no such point in the model", pid)
        if pid not in dom:
            raise InvariantViolation("sheaf.outside-domain", "stalk given outside the sheaf's domain", pid)
        s = F[pid]
        if s.depth < 0 or s.dim < 0:
            raise InvariantViolation("sheaf.negative", "dim and depth must be nonnegative", pid)
        if s.depth > s.dim:
            raise InvariantViolation("sheaf.depth-exceeds-dim", f"depth {s.depth} > dim {s.dim}", pid)
        if s.dim > model.codim(pid):
            raise InvariantViolation(
                "sheaf.dim-exceeds-codim", f"dim {s.dim} > codim {model.codim(pid)}", pid
            )
    for pid in sorted(F):
        missing = sorted((model.specializations(pid) & dom) - F.support)
        if missing:
            raise InvariantViolation(
                "sheaf.support-not-closed", f"support omits specializations {missing}", pid
            )


def validate_complex(model: SchemeModel, F: ComplexData) -> None:
    for pid in sorted(F):
        if pid not in model.points:
            raise InvariantViolation("complex.unknown-point", "no such point in the model", pid)


# -- topology -----------------------------------------------------------


def is_open(model: SchemeModel, U: Iterable[str]) -> bool:
    """Closed under generization."""
    U = frozenset(U)
    return U <= frozenset(model.points) and all(model.generizations(u) <= U for u in U)


def is_closed(model: SchemeModel, Z: Iterable[str]) -> bool:
    Z = frozenset(Z)
    return Z <= frozenset(model.points) and all(model.specializations(z) <= Z for z in Z)


def is_dense(model: SchemeModel, U: Iterable[str]) -> bool:
    """Contains every generic point."""
    return set(model.generic.values()) <= set(U)


def require_open_dense(model: SchemeModel, U: Iterable[str]) -> frozenset[str]:
    U = frozenset(U)
    unknown = sorted(U - frozenset(model.points))
    if unknown:
        raise InvariantViolation("open.unknown-point", f"unknown points {unknown}")
    if not is_open(model, U):
        bad = sorted(u for u in U if not model.generizations(u) <= U)[0]
        raise InvariantViolation("open.not-open", "a generization of this point is missing", bad)
    if not is_dense(model, U):
        bad = sorted(set(model.generic.values()) - U)[0]
        raise InvariantViolation("open.not-dense", "generic point missing from the open set", bad)
    return U


def open_interior(model: SchemeModel, S: Iterable[str]) -> frozenset[str]:
    """Largest open subset of ``S``."""
    S = frozenset(S)
    return frozenset(x for x in S if model.generizations(x) <= S)


def ccodim(model: SchemeModel, Z: Iterable[str]) -> float:
    """Componentwise codimension; ``math.inf`` for the empty set."""
    Z = frozenset(Z)
    if not is_closed(model, Z):
        raise InvariantViolation("closed.not-closed", "set is not closed under specialization")
    best = math.inf
    for c in model.components:
        in_c = [model.codim(z) for z in Z if c in model.points[z].components]
        if in_c:
            best = min(best, min(in_c))
    return best


def closed_codim(model: SchemeModel, S: Iterable[str]) -> float:
    """``min`` codim of the points of ``S`` (codimension of its closure)."""
    S = list(S)
    return min((model.codim(s) for s in S), default=math.inf)


# -- perversities -------------------------------------------------------


def perversity_check(p: Mapping[str, int], model: SchemeModel) -> bool:
    pts = list(model.points.values())
    for x in pts:
        for y in pts:
            if y.codim >= x.codim:
                if p[y.id] < p[x.id] or y.codim - p[y.id] < x.codim - p[x.id]:
                    return False
    return True


def induced_perversity(pi: NumericalPerversity, model: SchemeModel) -> dict[str, int]:
    return {pid: pi(p.codim) for pid, p in model.points.items()}


def _standard_threshold(model: SchemeModel, U: Iterable[str]) -> int:
    U = require_open_dense(model, U)
    n = ccodim(model, model.complement(U))
    if n < 2:
        raise InvariantViolation("ccodim.too-small", f"c-codimension of the complement is {n}, needs >= 2")
    return n


def standard_s(model: SchemeModel, U: Iterable[str]) -> dict[str, int]:
    """Minimal standard perversity: 0 below the c-codimension of the
    complement, 1 from there on."""
    n = _standard_threshold(model, U)
    return {pid: 0 if p.codim < n else 1 for pid, p in model.points.items()}


def standard_c(model: SchemeModel, U: Iterable[str]) -> dict[str, int]:
    """Maximal standard perversity."""
    n = _standard_threshold(model, U)
    return {pid: p.codim if p.codim < n else p.codim - 1 for pid, p in model.points.items()}


def in_pD_le0(F: ComplexData, p: Mapping[str, int], model: SchemeModel) -> bool:
    return all(max(F.star(x), default=-math.inf) <= p[x] for x in model.points)


def in_pD_ge0(F: ComplexData, p: Mapping[str, int], model: SchemeModel) -> bool:
    return all(min(F.shriek(x), default=math.inf) >= p[x] for x in model.points)


# -- generalized Serre condition ----------------------------------------


def is_S_rho(F: SheafData, rho: TailedFunction, model: SchemeModel) -> Verdict:
    """``depth_x >= rho(dim_x)`` at every point carrying a stalk."""
    problem = wprime_violation(rho)
    if problem is not None:
        raise problem
    violations = []
    for pid in F:
        s = F[pid]
        need = rho(s.dim)
        if s.depth < need:
            violations.append(Violation(pid, "srho.depth", need, s.depth, f"dim {s.dim}"))
    violations = sort_violations(violations)
    return Verdict(
        Status.FAIL if violations else Status.PASS,
        {"srho.depth": not violations},
        violations,
        {"rho": rho.encode()},
    )


def s_rho_locus(F: SheafData, rho: TailedFunction, model: SchemeModel) -> frozenset[str]:
    """Points at which ``F`` is ``S_rho`` (zero stalks pass vacuously).

    Not necessarily open; see :func:`locus_openness`.
    """
    bad = {v.point for v in is_S_rho(F, rho, model).violations}
    return frozenset(model.points) - bad


def locus_openness(model: SchemeModel, locus: Iterable[str]) -> list[tuple[str, str]]:
    """Pairs ``(x, g)`` with ``x`` in the locus and ``g`` a generization of
    ``x`` outside it.  Empty exactly when the locus is open."""
    locus = frozenset(locus)
    return sorted(
        (x, g) for x in locus for g in model.generizations(x) if g not in locus
    )


def triviality_warning(model: SchemeModel, U: Iterable[str]) -> str | None:
    """Warn when the intermediate-extension domain over an irreducible ``U``
    collapses to zero, i.e. ``codim(Z) <= codim(U) + 1``."""
    U = frozenset(U)
    maximal = [u for u in U if model.codim(u) == 0]
    if len(maximal) != 1:
        return None
    Z = model.complement(U)
    if not Z:
        return None
    codim_z = closed_codim(model, Z)
    codim_u = closed_codim(model, U)
    if codim_z <= codim_u + 1:
        return (
            f"codim(Z) = {codim_z} <= codim(U) + 1 = {codim_u + 1}: "
            "the domain of the intermediate extension is zero"
        )
    return None


# -- model files --------------------------------------------------------


@dataclass(frozen=True)
class ModelBundle:
    """A model file: the model plus its named sheaves and complexes."""

    model: SchemeModel
    sheaves: dict[str, SheafData]
    complexes: dict[str, ComplexData]

    def sheaf(self, name: str) -> SheafData:
        if name not in self.sheaves:
            raise InvariantViolation("bundle.unknown-sheaf", f"available: {sorted(self.sheaves)}", name)
        return self.sheaves[name]

    def complex(self, name: str) -> ComplexData:
        if name not in self.complexes:
            raise InvariantViolation("bundle.unknown-complex", f"available: {sorted(self.complexes)}", name)
        return self.complexes[name]

    def to_dict(self) -> dict:
        out = self.model.to_dict()
        if self.sheaves:
            out["sheaves"] = {k: v.to_dict() for k, v in sorted(self.sheaves.items())}
        if self.complexes:
            out["complexes"] = {k: v.to_dict() for k, v in sorted(self.complexes.items())}
        return out


def load_bundle(data: Mapping, *, validate_sheaves: bool = True) -> ModelBundle:
    """Build and validate a :class:`ModelBundle` from the JSON dialect.

    Sheaves are checked against the whole model; pass
    ``validate_sheaves=False`` for data that only lives on an open subset and
    validate it there yourself.
    """
    model = SchemeModel.from_dict(data)
    sheaves = {str(k): SheafData(v) for k, v in dict(data.get("sheaves", {})).items()}
    complexes = {str(k): ComplexData(v) for k, v in dict(data.get("complexes", {})).items()}
    for name in sorted(sheaves):
        for pid in sheaves[name]:
            if pid not in model.points:
                raise InvariantViolation("sheaf.unknown-point", f"in sheaf {name!r}", pid)
        if validate_sheaves:
            validate_sheaf(model, sheaves[name])
    for name in sorted(complexes):
        validate_complex(model, complexes[name])
    return ModelBundle(model, sheaves, complexes)
