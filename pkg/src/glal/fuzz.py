"""Seeded random models and formulas for the property suites.

Everything here is driven by an explicit random.Random so that suites and
CLI runs are reproducible.
"""

from __future__ import annotations

import random

from . import syntax as sx
from .model import KripkeModel, PointedModel
from .semantics import EvalContext

FRAGMENTS = ("propositional", "epistemic", "pal", "full")


def random_partition(rng: random.Random, items) -> list:
    """A uniformly-shaped random partition via a random growth code."""
    items = list(items)
    cells = {}
    blocks = 0
    for item in items:
        c = rng.randint(0, blocks)  # a fresh block when c == blocks
        blocks = max(blocks, c + 1)
        cells.setdefault(c, []).append(item)
    return list(cells.values())


def random_model(
    rng: random.Random, n_worlds: int, agents, atoms, connected: bool = False
) -> KripkeModel:
    worlds = [f"u{i}" for i in range(n_worlds)]
    for _ in range(40):
        partitions = {a: random_partition(rng, worlds) for a in agents}
        valuation = {
            p: [w for w in worlds if rng.random() < 0.5] for p in atoms
        }
        model = KripkeModel.from_partitions(worlds, agents, partitions, valuation)
        if not connected or _is_connected(model):
            return model
    # Force connectivity by coarsening the first agent's relation.
    partitions[agents[0]] = [list(worlds)]
    return KripkeModel.from_partitions(worlds, agents, partitions, valuation)


def _is_connected(model: KripkeModel) -> bool:
    ctx = EvalContext()
    comps = ctx._component_list(model, tuple(model.agents))
    return len(comps) == 1


def random_pointed(rng: random.Random, model: KripkeModel) -> PointedModel:
    return PointedModel(model, rng.choice(model.worlds))


def random_coalition(rng: random.Random, agents, allow_empty: bool = False) -> sx.Coalition:
    agents = list(agents)
    k_min = 0 if allow_empty else 1
    k = rng.randint(k_min, len(agents))
    return sx.Coalition(frozenset(rng.sample(agents, k)))


def random_formula(
    rng: random.Random, max_depth: int, atoms, agents, fragment: str = "full"
) -> sx.Formula:
    """Random AST of at most the given depth over the vocabulary."""
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")
    atoms = list(atoms)
    agents = list(agents)

    def leaf():
        roll = rng.random()
        if atoms and roll < 0.8:
            return sx.Atom(rng.choice(atoms))
        return sx.TOP if roll < 0.9 else sx.BOT

    def go(budget):
        if budget <= 1 or rng.random() < 0.25:
            return leaf()
        ops = ["not", "and", "or", "implies", "iff"]
        if fragment != "propositional" and agents:
            ops += ["know", "kw", "dual", "common", "everybody"]
        if fragment == "pal":
            ops += ["pal", "pal"]
        if fragment == "full" and agents:
            ops += ["distributed", "ann_local", "ann_global", "dia_local", "dia_global"]
        op = rng.choice(ops)
        if op == "not":
            return sx.Not(go(budget - 1))
        if op in ("and", "or", "implies", "iff"):
            cls = {"and": sx.And, "or": sx.Or, "implies": sx.Implies, "iff": sx.Iff}[op]
            return cls(go(budget - 1), go(budget - 1))
        if op in ("know", "kw", "dual"):
            cls = {"know": sx.Know, "kw": sx.KnowWhether, "dual": sx.Dual}[op]
            return cls(rng.choice(agents), go(budget - 1))
        if op in ("common", "everybody", "distributed"):
            cls = {
                "common": sx.Common,
                "everybody": sx.Everybody,
                "distributed": sx.Distributed,
            }[op]
            return cls(random_coalition(rng, agents, allow_empty=op != "distributed"),
                       go(budget - 1))
        if op == "pal":
            return sx.PalAnn(go(budget - 1), go(budget - 1))
        cls = {
            "ann_local": sx.AnnLocal,
            "ann_global": sx.AnnGlobal,
            "dia_local": sx.DiaLocal,
            "dia_global": sx.DiaGlobal,
        }[op]
        return cls(go(budget - 1), random_coalition(rng, agents, allow_empty=True),
                   go(budget - 1))

    return go(max_depth)


def duplicate_worlds(rng: random.Random, model: KripkeModel, copies: int = 1) -> tuple:
    """Clone random worlds as universal twins (same valuation, same classes).

    The twin joins every class of its original for every agent, so exact
    agent profiles are preserved and the identity-plus-twin relation is an
    exact-profile bisimulation between the model and its extension.
    Returns (extended model, {original: twin}).
    """
    worlds = list(model.worlds)
    chosen = rng.sample(worlds, min(copies, len(worlds)))
    twin_of = {w: f"{w}_twin" for w in chosen}
    new_worlds = worlds + [twin_of[w] for w in chosen]

    def extend(group):
        return [g for w in group for g in ([w, twin_of[w]] if w in twin_of else [w])]

    partitions = {}
    for k, agent in enumerate(model.agents):
        seen, cells = set(), []
        for w in model.worlds:
            if w in seen:
                continue
            cell = sorted(v for (u, v) in model.relations[k] if u == w)
            seen.update(cell)
            cells.append(extend(cell))
        partitions[agent] = cells
    valuation = {atom: extend(sorted(ws)) for atom, ws in model.valuation}
    extended = KripkeModel.from_partitions(new_worlds, model.agents, partitions, valuation)
    return extended, twin_of
