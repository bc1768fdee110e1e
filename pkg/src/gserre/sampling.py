"""Seeded random point models, sheaves and certificates for property checks."""

from __future__ import annotations

import random

from .scheme_model import SchemeModel, SheafData


def random_model(rng: random.Random, max_points: int = 40, max_codim: int = 10) -> SchemeModel:
    dim = rng.randint(2, max_codim)
    comps = [f"C{i}" for i in range(rng.randint(1, 3))]
    points = [{"id": f"g{i}", "codim": 0, "components": [c]} for i, c in enumerate(comps)]
    extra = rng.randint(1, max(1, max_points - 2 * len(comps)))
    for j in range(extra):
        members = rng.sample(comps, rng.randint(1, len(comps)))
        points.append({"id": f"p{j:02d}", "codim": rng.randint(1, dim), "components": members})
    # a point of top codimension on every component keeps Z choices nonempty
    for c in comps:
        points.append({"id": f"q{c}", "codim": dim, "components": [c]})
    for x in points:
        x["specializes_to"] = [
            y["id"]
            for y in points
            if y["codim"] > x["codim"] and set(x["components"]) <= set(y["components"]) and rng.random() < 0.3
        ]
    return SchemeModel.build({c: dim for c in comps}, points)


def random_open_dense(rng: random.Random, model: SchemeModel, min_ccodim: int = 2) -> frozenset[str]:
    """Complement of the closure of a few points of codim >= ``min_ccodim``;
    the complement is nonempty."""
    candidates = sorted(p for p, rec in model.points.items() if rec.codim >= min_ccodim)
    seeds = rng.sample(candidates, rng.randint(1, min(4, len(candidates))))
    return model.complement(model.closure(seeds))


def random_sheaf(rng: random.Random, model: SchemeModel, full_support: bool = False) -> SheafData:
    pts = sorted(model.points)
    if full_support:
        support = frozenset(pts)
    else:
        support = model.closure(rng.sample(pts, rng.randint(1, len(pts))))
    stalks = {}
    for p in sorted(support):
        codim = model.codim(p)
        dim = codim if full_support or rng.random() < 0.5 else rng.randint(0, codim)
        # mostly deep stalks so both verdicts occur
        depth = dim if rng.random() < 0.9 else rng.randint(0, dim)
        stalks[p] = (dim, depth)
    return SheafData(stalks)


def random_certificate(rng: random.Random, model: SchemeModel, slack: int = 2) -> SheafData:
    """Full-support data with ``dim = codim`` and depth within ``slack`` of it."""
    stalks = {}
    for p in sorted(model.points):
        codim = model.codim(p)
        stalks[p] = (codim, rng.randint(max(0, codim - slack), codim))
    return SheafData(stalks)
