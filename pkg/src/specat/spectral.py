"""Spectral decompositions of endo-arrows, and constructors for them.

A decomposition of ``f: c -> c`` splits the carrier into blocks, each with a
projection out of the carrier, an injection back in (the block's
eigeninjection), and a local arrow describing the action of ``f`` on the
block.  The verifier checks the defining equations; the constructors cover
relation component separation, block detection in matrices under
permutation, and equitable graph partitions with their reduced random-walk
matrices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import (
    DEFAULT_TOL_ABS,
    ArrowTypeError,
    Arrow,
    DecompositionError,
    LawReport,
    PreconditionError,
    SemiadditiveCategory,
    SpecatError,
    Tolerance,
    UnsupportedDomainError,
    fold_biproduct,
)
from .matrices import ScalarMatrix
from .relations import LRelation


@dataclass(frozen=True)
class Block:
    """One invariant block: its space and the three arrows tying it to the carrier."""

    space: Any
    project: Arrow   # carrier -> space
    inject: Arrow    # space -> carrier (the block's eigeninjection)
    local: Arrow     # space -> space (the action on the block)


@dataclass(frozen=True)
class SpectralDecomposition:
    """A family of blocks decomposing an endo-arrow on ``carrier``.

    Two blocks is the primitive form; longer families fold down to it via
    :func:`fold_to_binary`.  When known, the decomposed arrow itself is kept
    on the ``arrow`` field so combinators can produce the arrow of their
    result.
    """

    carrier: Any
    blocks: tuple[Block, ...]
    arrow: Arrow | None = None

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise DecompositionError("a decomposition needs at least one block")

    @property
    def spaces(self) -> tuple:
        return tuple(b.space for b in self.blocks)


@dataclass(frozen=True)
class Partition:
    """Disjoint cells covering a carrier, in canonical order.

    Cells are ordered by their smallest member's position in the carrier and
    each cell lists its members in carrier order.
    """

    carrier: tuple
    cells: tuple[tuple, ...]

    def __post_init__(self):
        carrier = tuple(self.carrier)
        position = {label: i for i, label in enumerate(carrier)}
        if len(position) != len(carrier):
            raise PreconditionError("carrier labels must be pairwise distinct")
        seen: set = set()
        cells = []
        for cell in self.cells:
            members = tuple(sorted(cell, key=position.__getitem__))
            if not members:
                raise PreconditionError("partition cells must be non-empty")
            for label in members:
                if label not in position:
                    raise PreconditionError(f"unknown carrier label {label!r}")
                if label in seen:
                    raise PreconditionError(f"label {label!r} appears in two cells")
                seen.add(label)
            cells.append(members)
        if len(seen) != len(carrier):
            missing = [l for l in carrier if l not in seen]
            raise PreconditionError(f"partition does not cover {missing!r}")
        cells.sort(key=lambda members: position[members[0]])
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "cells", tuple(cells))

    def positions(self) -> list[list[int]]:
        position = {label: i for i, label in enumerate(self.carrier)}
        return [[position[label] for label in cell] for cell in self.cells]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(cell) for cell in self.cells)


# ---------------------------------------------------------------------------
# verifier and combinators


def verify_decomposition(cat: SemiadditiveCategory, f: Arrow,
                         dec: SpectralDecomposition,
                         tol: Tolerance | None = None) -> LawReport:
    """Check the decomposition equations, plus the intertwining they imply.

    Conditions: (a) each projection retracts its injection, (b) mixed
    projection/injection composites vanish, (c) the injections and
    projections partition the identity on the carrier, (d) the blocks
    reassemble ``f``.  The intertwining equations ``project.f =
    local.project`` and ``f.inject = inject.local`` must follow whenever
    (a)-(d) hold and are reported alongside them.
    """
    if f.source != dec.carrier or f.target != dec.carrier:
        raise ArrowTypeError(
            f"arrow must be an endo-arrow on {dec.carrier!r}, "
            f"got {f.source!r} -> {f.target!r}")
    for i, blk in enumerate(dec.blocks, start=1):
        if blk.project.source != dec.carrier or blk.project.target != blk.space:
            raise ArrowTypeError(f"block {i}: project must map carrier -> space")
        if blk.inject.source != blk.space or blk.inject.target != dec.carrier:
            raise ArrowTypeError(f"block {i}: inject must map space -> carrier")
        if blk.local.source != blk.space or blk.local.target != blk.space:
            raise ArrowTypeError(f"block {i}: local must be an endo-arrow on its space")

    report = LawReport()

    def record(law: str, got: Arrow, want: Arrow) -> None:
        ok = cat.equal(got, want, tol)
        report.record(
            law, ok, max_residual=cat.residual(got, want),
            counterexample=None if ok else {
                "lhs": cat.describe_arrow(got),
                "rhs": cat.describe_arrow(want),
            })

    blocks = dec.blocks
    for i, blk in enumerate(blocks, start=1):
        record(f"a[{i}]", cat.compose(blk.project, blk.inject),
               cat.identity(blk.space))
    for i, blk_i in enumerate(blocks, start=1):
        for j, blk_j in enumerate(blocks, start=1):
            if i != j:
                record(f"b[{i},{j}]", cat.compose(blk_i.project, blk_j.inject),
                       cat.zero(blk_j.space, blk_i.space))

    total = None
    recon = None
    for blk in blocks:
        piece = cat.compose(blk.inject, blk.project)
        total = piece if total is None else cat.add(total, piece)
        piece_f = cat.compose(blk.inject, cat.compose(blk.local, blk.project))
        recon = piece_f if recon is None else cat.add(recon, piece_f)
    record("c", total, cat.identity(dec.carrier))
    record("d", recon, f)

    for i, blk in enumerate(blocks, start=1):
        record(f"intertwine_project[{i}]", cat.compose(blk.project, f),
               cat.compose(blk.local, blk.project))
        record(f"intertwine_inject[{i}]", cat.compose(f, blk.inject),
               cat.compose(blk.inject, blk.local))
    return report


def _matched_blocks(cat: SemiadditiveCategory, first: SpectralDecomposition,
                    second: SpectralDecomposition) -> None:
    if first.carrier != second.carrier:
        raise DecompositionError(
            f"carriers differ: {first.carrier!r} vs {second.carrier!r}")
    if len(first.blocks) != len(second.blocks):
        raise DecompositionError("decompositions have different block counts")
    for i, (b1, b2) in enumerate(zip(first.blocks, second.blocks), start=1):
        if b1.space != b2.space:
            raise DecompositionError(f"block {i}: spaces differ")
        if not cat.equal(b1.inject, b2.inject):
            raise DecompositionError(f"block {i}: eigeninjections differ")
        if not cat.equal(b1.project, b2.project):
            raise DecompositionError(f"block {i}: projections differ")


def compose_decompositions(cat: SemiadditiveCategory,
                           first: SpectralDecomposition,
                           second: SpectralDecomposition) -> SpectralDecomposition:
    """Decomposition of ``second.arrow . first.arrow``.

    Both inputs must share carrier, spaces, projections, and
    eigeninjections; the result keeps them and composes the local arrows.
    """
    _matched_blocks(cat, first, second)
    blocks = tuple(
        Block(b1.space, b1.project, b1.inject, cat.compose(b2.local, b1.local))
        for b1, b2 in zip(first.blocks, second.blocks))
    arrow = None
    if first.arrow is not None and second.arrow is not None:
        arrow = cat.compose(second.arrow, first.arrow)
    return SpectralDecomposition(first.carrier, blocks, arrow=arrow)


def sum_decompositions(cat: SemiadditiveCategory,
                       first: SpectralDecomposition,
                       second: SpectralDecomposition) -> SpectralDecomposition:
    """Decomposition of ``first.arrow + second.arrow`` (same sharing rules)."""
    _matched_blocks(cat, first, second)
    blocks = tuple(
        Block(b1.space, b1.project, b1.inject, cat.add(b1.local, b2.local))
        for b1, b2 in zip(first.blocks, second.blocks))
    arrow = None
    if first.arrow is not None and second.arrow is not None:
        arrow = cat.add(first.arrow, second.arrow)
    return SpectralDecomposition(first.carrier, blocks, arrow=arrow)


def fold_to_binary(cat: SemiadditiveCategory,
                   dec: SpectralDecomposition) -> SpectralDecomposition:
    """View an n-block decomposition as a two-block one.

    Blocks after the first are grouped on their left-folded biproduct; a
    single-block decomposition is padded with the zero object.
    """
    if len(dec.blocks) == 2:
        return dec
    head = dec.blocks[0]
    rest = dec.blocks[1:]
    if not rest:
        z = cat.zero_object()
        pad = Block(z, cat.zero(dec.carrier, z), cat.zero(z, dec.carrier),
                    cat.identity(z))
        return SpectralDecomposition(dec.carrier, (head, pad), arrow=dec.arrow)
    grouped, pis, iotas = fold_biproduct(cat, [b.space for b in rest])
    project = None
    inject = None
    local = None
    for blk, pi, iota in zip(rest, pis, iotas):
        p = cat.compose(iota, blk.project)
        q = cat.compose(blk.inject, pi)
        l = cat.compose(iota, cat.compose(blk.local, pi))
        project = p if project is None else cat.add(project, p)
        inject = q if inject is None else cat.add(inject, q)
        local = l if local is None else cat.add(local, l)
    tail = Block(grouped, project, inject, local)
    return SpectralDecomposition(dec.carrier, (head, tail), arrow=dec.arrow)


# ---------------------------------------------------------------------------
# component separation


def _component_cells(sym: np.ndarray) -> list[list[int]]:
    """Connected components of a symmetric boolean adjacency, by BFS.

    Cells come out ordered by smallest member, members ascending.
    """
    n = sym.shape[0]
    seen = [False] * n
    cells: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        queue = deque([start])
        seen[start] = True
        members = []
        while queue:
            v = queue.popleft()
            members.append(v)
            for u in np.nonzero(sym[v])[0]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(int(u))
        cells.append(sorted(members))
    return cells


def separate_components(f: LRelation) -> tuple[Partition, SpectralDecomposition]:
    """Split an endo-relation along the weakly connected components of its support.

    Each component becomes a block whose projection and injection are the
    top-valued inclusion of the component, with the local arrow the
    restriction of ``f``; the result reconstructs ``f`` exactly.
    """
    if f.source != f.target:
        raise ArrowTypeError("component separation needs an endo-relation")
    alg = f.algebra
    carrier = f.source
    if not carrier:
        # no vertices: empty partition, one block on the zero object
        zero = LRelation.zero(alg, (), ())
        block = Block((), zero, zero, zero)
        return (Partition((), ()),
                SpectralDecomposition((), (block,), arrow=f))
    support = f.values != alg.bottom
    sym = support | support.T
    cells_idx = _component_cells(sym)
    blocks = []
    for cell in cells_idx:
        space = tuple(carrier[i] for i in cell)
        grid = np.full((len(cell), len(carrier)), alg.bottom, dtype=np.int16)
        grid[np.arange(len(cell)), cell] = alg.top
        project = LRelation(alg, carrier, space, grid)
        local = LRelation(alg, space, space, f.values[np.ix_(cell, cell)])
        blocks.append(Block(space, project, project.converse(), local))
    partition = Partition(carrier,
                          tuple(tuple(carrier[i] for i in cell)
                                for cell in cells_idx))
    return partition, SpectralDecomposition(carrier, tuple(blocks), arrow=f)


def detect_blocks(f: ScalarMatrix, zero_tol: float | None = None
                  ) -> tuple[Partition, SpectralDecomposition]:
    """Find block-diagonal structure of a square matrix, up to permutation.

    An entry counts as zero iff its magnitude is at most ``zero_tol``
    (default the package-wide absolute tolerance); blocks are the connected
    components of the symmetrized nonzero-support graph.  Projections are
    0/1 coordinate selections and the local arrows principal submatrices.
    """
    if f.rows != f.cols:
        raise ArrowTypeError("block detection needs a square matrix")
    if zero_tol is None:
        zero_tol = DEFAULT_TOL_ABS
    if f.rows == 0:
        zero = ScalarMatrix.zeros(0, 0, f.domain)
        block = Block(0, zero, zero, zero)
        return (Partition((), ()),
                SpectralDecomposition(0, (block,), arrow=f))
    support = np.abs(f.values) > zero_tol
    sym = support | support.T
    cells_idx = _component_cells(sym)
    n = f.rows
    blocks = []
    for cell in cells_idx:
        sel = np.zeros((len(cell), n))
        sel[np.arange(len(cell)), cell] = 1.0
        project = ScalarMatrix(sel, f.domain)
        local = ScalarMatrix(f.values[np.ix_(cell, cell)], f.domain)
        blocks.append(Block(len(cell), project, project.transpose(), local))
    partition = Partition(tuple(range(n)),
                          tuple(tuple(cell) for cell in cells_idx))
    return partition, SpectralDecomposition(n, tuple(blocks), arrow=f)


# ---------------------------------------------------------------------------
# equitable partitions of undirected graphs


def _as_adjacency(adjacency) -> np.ndarray:
    values = adjacency.values if isinstance(adjacency, ScalarMatrix) else adjacency
    adj = np.asarray(values)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise PreconditionError("adjacency must be a square matrix")
    if adj.shape[0] == 0:
        raise PreconditionError("adjacency must have at least one vertex")
    if not np.array_equal(adj, adj.T):
        raise PreconditionError("adjacency must be symmetric (undirected graph)")
    adj = adj.astype(np.int64, copy=True)
    if not np.all((adj == 0) | (adj == 1)):
        raise PreconditionError("adjacency entries must be 0 or 1")
    return adj


def _require_connected(adj: np.ndarray) -> None:
    if len(_component_cells(adj.astype(bool))) != 1:
        raise PreconditionError("graph not connected")


def coarsest_equitable_partition(adjacency) -> Partition:
    """Iteratively refine vertex cells by neighbour counts until stable.

    Starting from the single-cell partition, vertices whose count-per-cell
    signatures differ are split apart; new sub-cells are ordered by their
    sorted signature and the cell list is kept ordered by smallest member,
    so the output is deterministic.  The fixed point is the coarsest
    partition in which neighbour counts into every cell are constant on each
    cell.
    """
    adj = _as_adjacency(adjacency)
    _require_connected(adj)
    n = adj.shape[0]
    cells: list[list[int]] = [list(range(n))]
    while True:
        signatures = [
            tuple(int(adj[v, cell].sum()) for cell in cells) for v in range(n)
        ]
        refined: list[list[int]] = []
        for cell in cells:
            groups: dict[tuple, list[int]] = {}
            for v in cell:
                groups.setdefault(signatures[v], []).append(v)
            for signature in sorted(groups):
                refined.append(groups[signature])
        if len(refined) == len(cells):
            break
        refined.sort(key=lambda members: members[0])
        cells = refined
    return Partition(tuple(range(n)), tuple(tuple(cell) for cell in cells))


@dataclass(frozen=True)
class EquitableQuotient:
    """Cell-level view of a random walk on an equitably partitioned graph.

    ``degrees[j, k]`` counts the neighbours any vertex of cell ``j`` has in
    cell ``k``.  ``reduced`` is the row-stochastic cell transition matrix,
    ``average`` maps vertex space to cell space by averaging over cells, and
    ``indicator`` embeds cell space back via 0/1 cell indicators.
    """

    partition: Partition
    degrees: np.ndarray
    reduced: ScalarMatrix
    average: ScalarMatrix
    indicator: ScalarMatrix

    @property
    def cell_sizes(self) -> tuple[int, ...]:
        return self.partition.sizes

    def quotient_block(self) -> Block:
        return Block(len(self.partition.cells), self.average, self.indicator,
                     self.reduced)


def walk_matrix(adjacency) -> ScalarMatrix:
    """Transition matrix of the simple random walk: row ``j`` spreads ``1/d_j``."""
    adj = _as_adjacency(adjacency)
    degrees = adj.sum(axis=1)
    if np.any(degrees == 0):
        v = int(np.nonzero(degrees == 0)[0][0])
        raise PreconditionError(
            f"vertex {v} has no neighbours; the walk matrix needs positive degree")
    return ScalarMatrix(adj / degrees[:, None])


def reduced_transition_matrix(adjacency, partition: Partition) -> EquitableQuotient:
    """Quotient walk data for an equitable partition; validates equitability.

    Raises a precondition error naming a violating vertex if some vertex's
    neighbour count into some cell deviates from its cell's constant.
    """
    adj = _as_adjacency(adjacency)
    n = adj.shape[0]
    if partition.carrier != tuple(range(n)):
        raise PreconditionError(
            "partition carrier must be the vertex range of the adjacency")
    cells = partition.positions()
    num = len(cells)
    degrees = np.zeros((num, num), dtype=np.int64)
    for j, cell in enumerate(cells):
        for k, other in enumerate(cells):
            counts = adj[np.ix_(cell, other)].sum(axis=1)
            expected = int(counts[0])
            bad = np.nonzero(counts != expected)[0]
            if bad.size:
                v = cell[int(bad[0])]
                raise PreconditionError(
                    f"partition is not equitable: vertex {v} has "
                    f"{int(counts[bad[0]])} neighbours in cell {k}, "
                    f"expected {expected}")
            degrees[j, k] = expected
    row_degrees = degrees.sum(axis=1)
    if np.any(row_degrees == 0):
        j = int(np.nonzero(row_degrees == 0)[0][0])
        raise PreconditionError(
            f"cell {j} has degree zero; the walk matrix needs positive degree")
    sizes = np.array([len(cell) for cell in cells], dtype=np.int64)
    balance = sizes[:, None] * degrees
    if not np.array_equal(balance, balance.T):
        raise SpecatError("edge-count conservation violated between cells")
    reduced = ScalarMatrix(degrees / row_degrees[:, None])
    average_vals = np.zeros((num, n))
    indicator_vals = np.zeros((n, num))
    for j, cell in enumerate(cells):
        average_vals[j, cell] = 1.0 / len(cell)
        indicator_vals[cell, j] = 1.0
    degrees.flags.writeable = False
    return EquitableQuotient(partition, degrees, reduced,
                             ScalarMatrix(average_vals),
                             ScalarMatrix(indicator_vals))


def residual_part(f: ScalarMatrix, quotient: EquitableQuotient) -> ScalarMatrix:
    """What remains of ``f`` after removing the cell-level walk component.

    Returns ``f - indicator . reduced . average``; adding the removed
    composite back recovers ``f``, and the averaging map annihilates the
    result.  Needs a scalar domain with negation.
    """
    if not f.domain.has_negation:
        raise UnsupportedDomainError(
            "residual needs subtraction; the non-negative domain has none")
    n = len(quotient.partition.carrier)
    if f.rows != n or f.cols != n:
        raise ArrowTypeError(
            f"arrow must be an endo-matrix on {n} vertices, "
            f"got {f.rows}x{f.cols}")
    removed = (quotient.indicator.values
               @ quotient.reduced.values
               @ quotient.average.values)
    return ScalarMatrix(f.values - removed, f.domain)
