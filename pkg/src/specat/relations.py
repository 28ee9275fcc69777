"""Lattice-valued relations over finite complete Heyting algebras.

An arrow from carrier ``A`` to carrier ``B`` is a grid of lattice elements
indexed by ``B x A`` (target rows, source columns).  Composition takes the
join over the middle carrier of pairwise meets; homset addition is the
pointwise join.  Ordinary relations are the instance over the two-element
lattice.

Only finite algebras are supported: every lattice law, and residuation for
the derived implication, is checked exhaustively at construction time, so a
``HeytingTable`` that exists is known to be a complete Heyting algebra.
"""

from __future__ import annotations

import functools
import random
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .core import (
    ArrowSampler,
    ArrowTypeError,
    BiproductWitness,
    LatticeError,
    SemiadditiveCategory,
    Tolerance,
)

Label = Any
Carrier = tuple


def as_carrier(labels: Iterable[Label]) -> Carrier:
    carrier = tuple(labels)
    if len(set(carrier)) != len(carrier):
        raise ArrowTypeError(f"carrier labels must be pairwise distinct: {carrier!r}")
    return carrier


class HeytingTable:
    """A finite complete Heyting algebra given by explicit meet/join tables.

    ``meet`` and ``join`` are square index tables over ``elements``.  The
    bottom and top elements and the implication table are derived, never
    taken as input: the implication of ``a`` and ``b`` is the join of all
    ``x`` with ``x meet a <= b``, and construction fails loudly (naming a
    violating triple) unless that operation actually residuates the meet.
    """

    __slots__ = ("name", "elements", "meet", "join", "implication",
                 "bottom", "top", "_index")

    def __init__(self, elements: Sequence[str], meet, join, *,
                 name: str = "custom", validate: bool = True):
        self.name = name
        self.elements = tuple(str(e) for e in elements)
        if len(set(self.elements)) != len(self.elements):
            raise LatticeError("lattice elements must be pairwise distinct")
        k = len(self.elements)
        if k == 0:
            raise LatticeError("a lattice needs at least one element")
        self.meet = self._table(meet, k, "meet")
        self.join = self._table(join, k, "join")
        self._index = {label: i for i, label in enumerate(self.elements)}
        if validate:
            self._check_lattice_laws()
        self.bottom = self._find_unit(self.join, "join")
        self.top = self._find_unit(self.meet, "meet")
        self.implication = self._derive_implication()
        if validate:
            self._check_residuation()

    @staticmethod
    def _table(table, k: int, which: str) -> np.ndarray:
        arr = np.array(table, dtype=np.int16)
        if arr.shape != (k, k):
            raise LatticeError(f"{which} table must be {k}x{k}, got {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise LatticeError(f"{which} table contains an out-of-range index")
        arr.flags.writeable = False
        return arr

    # -- elementary queries -----------------------------------------------------

    def index(self, label: str) -> int:
        return self._index[str(label)]

    def label(self, i: int) -> str:
        return self.elements[i]

    def leq(self, i: int, j: int) -> bool:
        return self.meet[i, j] == i

    def meet_of(self, i: int, j: int) -> int:
        return int(self.meet[i, j])

    def join_of(self, i: int, j: int) -> int:
        return int(self.join[i, j])

    def implies(self, i: int, j: int) -> int:
        return int(self.implication[i, j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeytingTable):
            return NotImplemented
        return (self.elements == other.elements
                and np.array_equal(self.meet, other.meet)
                and np.array_equal(self.join, other.join))

    def __hash__(self):
        return hash((self.elements, self.meet.tobytes(), self.join.tobytes()))

    def __repr__(self) -> str:
        return f"HeytingTable({self.name!r}, {len(self.elements)} elements)"

    def to_dict(self) -> dict:
        label = self.label
        return {
            "name": self.name,
            "elements": list(self.elements),
            "meet": [[label(v) for v in row] for row in self.meet.tolist()],
            "join": [[label(v) for v in row] for row in self.join.tolist()],
        }

    # -- construction-time checks ------------------------------------------------

    def _violation(self, what: str, labels: tuple) -> LatticeError:
        pretty = ", ".join(repr(l) for l in labels)
        return LatticeError(f"{what} fails at ({pretty})")

    def _check_lattice_laws(self) -> None:
        k = len(self.elements)
        idx = np.arange(k)
        for which, table in (("meet", self.meet), ("join", self.join)):
            if not np.array_equal(table, table.T):
                x, y = np.argwhere(table != table.T)[0]
                raise self._violation(f"{which} commutativity",
                                      (self.label(x), self.label(y)))
            if not np.array_equal(np.diagonal(table), idx):
                x = int(np.nonzero(np.diagonal(table) != idx)[0][0])
                raise self._violation(f"{which} idempotency", (self.label(x),))
            left = table[table[:, :, None], idx[None, None, :]]   # (x?y)?z
            right = table[idx[:, None, None], table[None, :, :]]  # x?(y?z)
            if not np.array_equal(left, right):
                x, y, z = np.argwhere(left != right)[0]
                raise self._violation(
                    f"{which} associativity",
                    (self.label(x), self.label(y), self.label(z)))
        absorb1 = self.join[idx[:, None], self.meet]
        if not np.array_equal(absorb1, np.broadcast_to(idx[:, None], (k, k))):
            x, y = np.argwhere(absorb1 != idx[:, None])[0]
            raise self._violation("absorption x v (x ^ y) = x",
                                  (self.label(x), self.label(y)))
        absorb2 = self.meet[idx[:, None], self.join]
        if not np.array_equal(absorb2, np.broadcast_to(idx[:, None], (k, k))):
            x, y = np.argwhere(absorb2 != idx[:, None])[0]
            raise self._violation("absorption x ^ (x v y) = x",
                                  (self.label(x), self.label(y)))

    def _find_unit(self, table: np.ndarray, which: str) -> int:
        k = len(self.elements)
        idx = np.arange(k)
        for e in range(k):
            if np.array_equal(table[e], idx):
                return e
        raise LatticeError(f"no unit element for {which} (lattice is unbounded)")

    def _derive_implication(self) -> np.ndarray:
        k = len(self.elements)
        imp = np.empty((k, k), dtype=np.int16)
        for a in range(k):
            for b in range(k):
                value = self.bottom
                for x in range(k):
                    if self.leq(self.meet_of(x, a), b):
                        value = self.join_of(value, x)
                imp[a, b] = value
        imp.flags.writeable = False
        return imp

    def _check_residuation(self) -> None:
        k = len(self.elements)
        for x in range(k):
            for a in range(k):
                for b in range(k):
                    lhs = self.leq(self.meet_of(x, a), b)
                    rhs = self.leq(x, self.implies(a, b))
                    if lhs != rhs:
                        raise self._violation(
                            "residuation (x ^ a) <= b iff x <= (a => b)",
                            (self.label(x), self.label(a), self.label(b)))

    @classmethod
    def from_label_tables(cls, elements: Sequence[str], meet, join, *,
                          name: str = "custom") -> "HeytingTable":
        """Build from tables whose cells are element labels rather than indices."""
        pos = {str(e): i for i, e in enumerate(elements)}
        try:
            meet_idx = [[pos[str(v)] for v in row] for row in meet]
            join_idx = [[pos[str(v)] for v in row] for row in join]
        except KeyError as exc:
            raise LatticeError(f"unknown lattice element {exc.args[0]!r}") from exc
        return cls(elements, meet_idx, join_idx, name=name)


@functools.lru_cache(maxsize=None)
def chain(k: int) -> HeytingTable:
    """The k-element chain with min/max structure.

    Its derived implication sends ``a => b`` to top when ``a <= b`` and to
    ``b`` otherwise, which is the usual truncation semantics for graded
    truth values; growing ``k`` refines the approximation of the unit
    interval.
    """
    if k < 1:
        raise LatticeError("a chain needs at least one element")
    if k == 1:
        labels = ["0"]
    elif k == 2:
        labels = ["0", "1"]
    else:
        labels = [str(Fraction(i, k - 1)) for i in range(k)]
    idx = np.arange(k)
    meet = np.minimum(idx[:, None], idx[None, :])
    join = np.maximum(idx[:, None], idx[None, :])
    return HeytingTable(labels, meet, join, name=f"chain{k}")


@functools.lru_cache(maxsize=None)
def bool_algebra() -> HeytingTable:
    table = chain(2)
    return HeytingTable(table.elements, table.meet, table.join, name="bool")


@functools.lru_cache(maxsize=None)
def b4() -> HeytingTable:
    """The four-element Boolean algebra {0, a, b, 1} with a, b incomparable."""
    elements = ("0", "a", "b", "1")
    meet = [
        [0, 0, 0, 0],
        [0, 1, 0, 1],
        [0, 0, 2, 2],
        [0, 1, 2, 3],
    ]
    join = [
        [0, 1, 2, 3],
        [1, 1, 3, 3],
        [2, 3, 2, 3],
        [3, 3, 3, 3],
    ]
    return HeytingTable(elements, meet, join, name="b4")


class LRelation:
    """A lattice-valued relation: a (target x source) grid of algebra elements.

    The cell at row ``b`` (a target label) and column ``a`` (a source label)
    holds the degree to which ``a`` relates to ``b``.
    """

    __slots__ = ("algebra", "source", "target", "values")

    def __init__(self, algebra: HeytingTable, source: Iterable[Label],
                 target: Iterable[Label], values):
        self.algebra = algebra
        self.source = as_carrier(source)
        self.target = as_carrier(target)
        try:
            arr = np.array(values, dtype=np.int16).reshape(len(self.target),
                                                           len(self.source))
        except ValueError as exc:
            raise ArrowTypeError(
                f"relation grid must be {len(self.target)}x{len(self.source)}"
            ) from exc
        if arr.size and (arr.min() < 0 or arr.max() >= len(algebra.elements)):
            raise ArrowTypeError("relation grid contains an out-of-range element")
        arr.flags.writeable = False
        self.values = arr

    # -- constructors -------------------------------------------------------------

    @classmethod
    def zero(cls, algebra: HeytingTable, source, target) -> "LRelation":
        source = as_carrier(source)
        target = as_carrier(target)
        grid = np.full((len(target), len(source)), algebra.bottom, dtype=np.int16)
        return cls(algebra, source, target, grid)

    @classmethod
    def identity(cls, algebra: HeytingTable, carrier) -> "LRelation":
        carrier = as_carrier(carrier)
        n = len(carrier)
        grid = np.full((n, n), algebra.bottom, dtype=np.int16)
        np.fill_diagonal(grid, algebra.top)
        return cls(algebra, carrier, carrier, grid)

    @classmethod
    def from_labels(cls, algebra: HeytingTable, source, target, grid) -> "LRelation":
        idx = [[algebra.index(v) for v in row] for row in grid]
        return cls(algebra, source, target, idx)

    @classmethod
    def from_pairs(cls, algebra: HeytingTable, source, target,
                   pairs: Iterable[tuple[Label, Label]]) -> "LRelation":
        """Build from (target, source) label pairs held at the top element."""
        source = as_carrier(source)
        target = as_carrier(target)
        grid = np.full((len(target), len(source)), algebra.bottom, dtype=np.int16)
        srcpos = {lab: i for i, lab in enumerate(source)}
        tgtpos = {lab: i for i, lab in enumerate(target)}
        for t, s in pairs:
            grid[tgtpos[t], srcpos[s]] = algebra.top
        return cls(algebra, source, target, grid)

    def to_pairs(self) -> set[tuple[Label, Label]]:
        """The (target, source) pairs holding a value other than bottom."""
        ts, ss = np.nonzero(self.values != self.algebra.bottom)
        return {(self.target[t], self.source[s]) for t, s in zip(ts, ss)}

    def value(self, target_label: Label, source_label: Label) -> str:
        t = self.target.index(target_label)
        s = self.source.index(source_label)
        return self.algebra.label(int(self.values[t, s]))

    # -- algebra ----------------------------------------------------------------

    def _check_algebra(self, other: "LRelation") -> None:
        if self.algebra != other.algebra:
            raise ArrowTypeError("relations live over different algebras")

    def __matmul__(self, other: "LRelation") -> "LRelation":
        """Composition: join over the middle carrier of pairwise meets."""
        self._check_algebra(other)
        if self.source != other.target:
            raise ArrowTypeError(
                f"cannot compose: middle carriers differ "
                f"({self.source!r} vs {other.target!r})")
        alg = self.algebra
        mid = len(self.source)
        out = np.full((len(self.target), len(other.source)), alg.bottom,
                      dtype=np.int16)
        for b in range(mid):
            term = alg.meet[self.values[:, b][:, None], other.values[b, :][None, :]]
            out = alg.join[out, term]
        return LRelation(alg, other.source, self.target, out)

    def __or__(self, other: "LRelation") -> "LRelation":
        """Pointwise join of parallel relations."""
        self._check_algebra(other)
        if self.source != other.source or self.target != other.target:
            raise ArrowTypeError("cannot join relations with different carriers")
        return LRelation(self.algebra, self.source, self.target,
                         self.algebra.join[self.values, other.values])

    def converse(self) -> "LRelation":
        return LRelation(self.algebra, self.target, self.source, self.values.T)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LRelation):
            return NotImplemented
        return (self.algebra == other.algebra
                and self.source == other.source
                and self.target == other.target
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self) -> str:
        grid = [[self.algebra.label(v) for v in row] for row in self.values.tolist()]
        return (f"LRelation({self.algebra.name!r}, source={self.source!r}, "
                f"target={self.target!r}, values={grid!r})")


def tagged_union(left: Carrier, right: Carrier) -> Carrier:
    """Disjoint union carrier: left elements tagged 1, right elements tagged 2."""
    return tuple((1, a) for a in left) + tuple((2, b) for b in right)


class RelationCategory(SemiadditiveCategory):
    """Relations valued in one finite Heyting algebra, with carrier objects."""

    exact = True

    def __init__(self, algebra: HeytingTable):
        self.algebra = algebra
        self.name = "rel" if algebra == bool_algebra() else f"rel-{algebra.name}"

    def compose(self, g: LRelation, f: LRelation) -> LRelation:
        return g @ f

    def add(self, f: LRelation, g: LRelation) -> LRelation:
        return f | g

    def zero(self, src, tgt) -> LRelation:
        return LRelation.zero(self.algebra, src, tgt)

    def identity(self, obj) -> LRelation:
        return LRelation.identity(self.algebra, obj)

    def zero_object(self) -> Carrier:
        return ()

    def canonical_biproduct(self, left, right) -> BiproductWitness:
        return self.generalized_biproduct(left, right)

    def generalized_biproduct(self, left, right,
                              left_iso: LRelation | None = None,
                              right_iso: LRelation | None = None) -> BiproductWitness:
        """Biproduct on the tagged disjoint union, with optional bijections.

        ``left_iso`` and ``right_iso`` must be self-inverse-under-converse
        relations on the factors; identities are used when omitted.
        """
        left = as_carrier(left)
        right = as_carrier(right)
        carrier = tagged_union(left, right)
        n1, n2 = len(left), len(right)
        alg = self.algebra
        p1 = np.full((n1, n1 + n2), alg.bottom, dtype=np.int16)
        p1[np.arange(n1), np.arange(n1)] = alg.top
        p2 = np.full((n2, n1 + n2), alg.bottom, dtype=np.int16)
        p2[np.arange(n2), n1 + np.arange(n2)] = alg.top
        pi1 = LRelation(alg, carrier, left, p1)
        pi2 = LRelation(alg, carrier, right, p2)
        for iso, obj, name in ((left_iso, left, "left_iso"),
                               (right_iso, right, "right_iso")):
            if iso is not None:
                if iso.source != obj or iso.target != obj:
                    raise ArrowTypeError(f"{name} must be an endo-relation on {obj!r}")
                ident = self.identity(obj)
                if not (iso @ iso.converse() == ident
                        and iso.converse() @ iso == ident):
                    raise ArrowTypeError(f"{name} is not a bijective relation")
        if left_iso is not None:
            pi1 = left_iso @ pi1
        if right_iso is not None:
            pi2 = right_iso @ pi2
        return BiproductWitness(left, right, carrier, pi1, pi2,
                                pi1.converse(), pi2.converse())

    def equal(self, f: LRelation, g: LRelation,
              tol: Tolerance | None = None) -> bool:
        return (f.source == g.source and f.target == g.target
                and np.array_equal(f.values, g.values))

    def residual(self, f: LRelation, g: LRelation) -> float:
        return float(np.count_nonzero(f.values != g.values))

    def describe_arrow(self, f: LRelation) -> dict:
        label = self.algebra.label
        return {
            "source": [encode_label(l) for l in f.source],
            "target": [encode_label(l) for l in f.target],
            "values": [[label(v) for v in row] for row in f.values.tolist()],
        }

    def describe_object(self, obj) -> list:
        return [encode_label(l) for l in obj]

    def default_sampler(self, max_size: int | None = None) -> "RelationSampler":
        return RelationSampler(self.algebra, max_carrier=max_size or 6)


def encode_label(label: Label):
    """JSON-safe image of a carrier label; tuples become lists."""
    if isinstance(label, tuple):
        return [encode_label(part) for part in label]
    return label


def decode_label(payload) -> Label:
    if isinstance(payload, list):
        return tuple(decode_label(part) for part in payload)
    return payload


class RelationSampler(ArrowSampler):
    """Random carriers up to a bound, cell values uniform over the algebra."""

    def __init__(self, algebra: HeytingTable, max_carrier: int = 6,
                 bottom_bias: float = 0.0):
        self.algebra = algebra
        self.max_carrier = max_carrier
        self.bottom_bias = bottom_bias

    def random_object(self, rng: random.Random) -> Carrier:
        size = rng.randrange(self.max_carrier + 1)
        return tuple(f"v{i}" for i in range(size))

    def _cell(self, rng: random.Random) -> int:
        if self.bottom_bias and rng.random() < self.bottom_bias:
            return self.algebra.bottom
        return rng.randrange(len(self.algebra.elements))

    def random_arrow(self, rng: random.Random, src, tgt) -> LRelation:
        src = as_carrier(src)
        tgt = as_carrier(tgt)
        grid = [[self._cell(rng) for _ in range(len(src))] for _ in range(len(tgt))]
        arr = np.array(grid, dtype=np.int16).reshape(len(tgt), len(src))
        return LRelation(self.algebra, src, tgt, arr)


REL = RelationCategory(bool_algebra())
