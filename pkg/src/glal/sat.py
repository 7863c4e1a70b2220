"""Desk-scale satisfiability and validity by bounded model enumeration.

Models are enumerated by world count, then per-agent set partitions
(restricted growth strings), then valuations, in a fixed lexicographic
order; the first satisfying pointed model in that order is the witness.
Candidates are pruned up to isomorphism by a canonical relabeling that
sorts worlds by (valuation bit vector, partition signature).  Status is
reported as unsat-up-to-bound, never as plain unsat.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import syntax as sx
from .errors import BoundExceeded
from .model import KripkeModel, PointedModel
from .semantics import EvalContext

MAX_WORLDS = 6
DEFAULT_BUDGET = 10_000_000


def bell_number(n: int) -> int:
    """Number of set partitions of n items."""
    table = [1]
    for _ in range(n):
        row = [table[-1]]
        for value in table:
            row.append(row[-1] + value)
        table = row
    return table[0] if n else 1


def restricted_growth_strings(n: int):
    """All partition codes of length n: a[0]=0, a[i] <= max(a[:i]) + 1."""
    if n == 0:
        yield ()
        return
    code = [0] * n
    while True:
        yield tuple(code)
        i = n - 1
        while i > 0:
            if code[i] <= max(code[:i]):
                code[i] += 1
                for j in range(i + 1, n):
                    code[j] = 0
                break
            code[i] = 0
            i -= 1
        else:
            return


def partitions_as_cells(n: int):
    for code in restricted_growth_strings(n):
        cells = {}
        for i, c in enumerate(code):
            cells.setdefault(c, []).append(i)
        yield tuple(tuple(cells[c]) for c in sorted(cells))


@dataclass(frozen=True)
class SatQuery:
    formula: sx.Formula
    max_worlds: int = 4
    agents: tuple | None = None
    atoms: tuple | None = None
    allow_large: bool = False
    budget: int = DEFAULT_BUDGET
    prune_isomorphic: bool = True

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")
        if self.max_worlds > MAX_WORLDS and not self.allow_large:
            raise BoundExceeded(
                f"max_worlds {self.max_worlds} exceeds the cap of {MAX_WORLDS}; "
                "pass allow_large=True to override"
            )
        if self.max_worlds > MAX_WORLDS:
            warnings.warn("enumeration beyond 6 worlds grows as a Bell-number power",
                          stacklevel=2)

    def vocabulary(self) -> tuple:
        agents = self.agents if self.agents is not None else tuple(
            sorted(sx.agents(self.formula))
        )
        atoms = self.atoms if self.atoms is not None else tuple(
            sorted(sx.atoms(self.formula))
        )
        return tuple(agents), tuple(atoms)


@dataclass(frozen=True)
class SatResult:
    status: str  # "sat" | "unsat-up-to-bound"
    witness: PointedModel | None
    models_examined: int

    @property
    def satisfiable(self) -> bool:
        return self.status == "sat"


@dataclass(frozen=True)
class ValidResult:
    status: str  # "valid-up-to-bound" | "counterexample"
    counterexample: PointedModel | None
    models_examined: int

    @property
    def valid(self) -> bool:
        return self.status == "valid-up-to-bound"


def estimated_candidates(max_worlds: int, n_agents: int, n_atoms: int) -> int:
    total = 0
    for n in range(1, max_worlds + 1):
        total += bell_number(n) ** n_agents * 2 ** (n * n_atoms)
    return total


def sat_bounded(query: SatQuery) -> SatResult:
    """First pointed model (in enumeration order) satisfying the formula."""
    agents, atoms = query.vocabulary()
    estimate = estimated_candidates(query.max_worlds, len(agents), len(atoms))
    if estimate > query.budget:
        raise BoundExceeded(
            f"estimated {estimate} candidate models exceeds budget {query.budget}"
        )
    examined = 0
    ctx = EvalContext()
    for n in range(1, query.max_worlds + 1):
        worlds = tuple(f"s{i}" for i in range(n))
        seen = set()
        partition_choices = list(partitions_as_cells(n))
        for combo in _product(partition_choices, len(agents)):
            for vals in _product(list(range(2 ** n)), len(atoms)):
                examined += 1
                if query.prune_isomorphic:
                    key = _canonical_key(n, combo, vals)
                    if key in seen:
                        continue
                    seen.add(key)
                model = _build(worlds, agents, combo, atoms, vals)
                mask = ctx.mask(ctx.intern(model), query.formula)
                if mask:
                    point = worlds[next(i for i in range(n) if mask >> i & 1)]
                    return SatResult("sat", PointedModel(model, point), examined)
    return SatResult("unsat-up-to-bound", None, examined)


def valid_bounded(formula: sx.Formula, max_worlds: int, **kwargs) -> ValidResult:
    """Dual of sat_bounded on the negated formula.

    The vocabulary is taken from the formula itself unless supplied, so
    validity is relative to models over exactly its agents and atoms.
    """
    query = SatQuery(sx.Not(formula), max_worlds, **kwargs)
    result = sat_bounded(query)
    if result.satisfiable:
        return ValidResult("counterexample", result.witness, result.models_examined)
    return ValidResult("valid-up-to-bound", None, result.models_examined)


def _product(choices, repeat):
    if repeat == 0:
        yield ()
        return
    for rest in _product(choices, repeat - 1):
        for item in choices:
            yield rest + (item,)


def _build(worlds, agents, partition_combo, atoms, val_combo) -> KripkeModel:
    partitions = {
        agent: [[worlds[i] for i in cell] for cell in cells]
        for agent, cells in zip(agents, partition_combo)
    }
    valuation = {
        atom: [worlds[i] for i in range(len(worlds)) if bits >> i & 1]
        for atom, bits in zip(atoms, val_combo)
    }
    return KripkeModel.from_partitions(worlds, agents, partitions, valuation)


def _canonical_key(n, partition_combo, val_combo):
    """Relabel worlds canonically; equal keys imply isomorphic candidates."""
    cell_of = []
    for cells in partition_combo:
        owner = [0] * n
        for c, cell in enumerate(cells):
            for i in cell:
                owner[i] = c
        cell_of.append(owner)

    def val_vec(i):
        return tuple(bits >> i & 1 for bits in val_combo)

    def world_sig(i):
        cellmates = []
        for owner, cells in zip(cell_of, partition_combo):
            cell = cells[owner[i]]
            cellmates.append(tuple(sorted(val_vec(j) for j in cell)))
        return (val_vec(i), tuple(cellmates))

    order = sorted(range(n), key=lambda i: (world_sig(i), i))
    rank = {old: new for new, old in enumerate(order)}
    new_vals = tuple(
        sum(1 << rank[i] for i in range(n) if bits >> i & 1) for bits in val_combo
    )
    new_parts = tuple(
        tuple(sorted(tuple(sorted(rank[i] for i in cell)) for cell in cells))
        for cells in partition_combo
    )
    return new_vals, new_parts
