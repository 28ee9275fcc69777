"""Structure-preserving functors between relation instances.

A lattice homomorphism (preserving bottom, top, binary meet, and binary
join) applied entrywise induces a functor between the corresponding
relation categories that is additive on homsets, and therefore carries any
verified decomposition of an endo-arrow to a verified decomposition of its
image.  Caller-supplied functors between arbitrary instances may be plugged
in and put through the same checker.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .core import (
    Arrow,
    ArrowSampler,
    ArrowTypeError,
    DecompositionError,
    LatticeError,
    LawReport,
    SemiadditiveCategory,
    Tolerance,
    oplus,
)
from .relations import HeytingTable, LRelation, RelationCategory, bool_algebra
from .spectral import Block, SpectralDecomposition, verify_decomposition


@dataclass(frozen=True)
class LatticeHom:
    """A map between finite Heyting algebras preserving the lattice structure.

    Preservation of bottom, top, binary meet, and binary join is checked
    exhaustively at construction; on a finite algebra that also covers the
    joins taken during relation composition.
    """

    source: HeytingTable
    target: HeytingTable
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))
        if len(self.mapping) != len(self.source.elements):
            raise LatticeError("lattice map must cover every source element")
        for v in self.mapping:
            if not 0 <= v < len(self.target.elements):
                raise LatticeError("lattice map hits an unknown target element")
        self._check_preservation()

    def _check_preservation(self) -> None:
        src, tgt, h = self.source, self.target, self.mapping
        if h[src.bottom] != tgt.bottom:
            raise LatticeError(
                f"map does not preserve bottom: "
                f"{src.label(src.bottom)!r} -> {tgt.label(h[src.bottom])!r}")
        if h[src.top] != tgt.top:
            raise LatticeError(
                f"map does not preserve top: "
                f"{src.label(src.top)!r} -> {tgt.label(h[src.top])!r}")
        k = len(src.elements)
        for x in range(k):
            for y in range(k):
                if h[src.meet_of(x, y)] != tgt.meet_of(h[x], h[y]):
                    raise LatticeError(
                        f"map does not preserve meet at "
                        f"({src.label(x)!r}, {src.label(y)!r})")
                if h[src.join_of(x, y)] != tgt.join_of(h[x], h[y]):
                    raise LatticeError(
                        f"map does not preserve join at "
                        f"({src.label(x)!r}, {src.label(y)!r})")

    @classmethod
    def from_labels(cls, source: HeytingTable, target: HeytingTable,
                    mapping: dict) -> "LatticeHom":
        table = [None] * len(source.elements)
        for key, value in mapping.items():
            try:
                table[source.index(key)] = target.index(value)
            except KeyError as exc:
                raise LatticeError(f"unknown lattice element {exc.args[0]!r}") from exc
        if any(v is None for v in table):
            missing = [source.elements[i] for i, v in enumerate(table) if v is None]
            raise LatticeError(f"lattice map misses elements {missing!r}")
        return cls(source, target, tuple(table))

    def apply(self, i: int) -> int:
        return self.mapping[i]


def identity_hom(algebra: HeytingTable) -> LatticeHom:
    return LatticeHom(algebra, algebra, tuple(range(len(algebra.elements))))


def principal_filter_hom(algebra: HeytingTable, label: str,
                         target: HeytingTable | None = None) -> LatticeHom:
    """Threshold map sending x to top iff the named element lies below x.

    Valid exactly when the element's upper set is closed the right way
    under meet and join; an invalid choice is rejected with the violating
    pair.
    """
    if target is None:
        target = bool_algebra()
    cut = algebra.index(label)
    mapping = tuple(
        target.top if algebra.leq(cut, x) else target.bottom
        for x in range(len(algebra.elements)))
    return LatticeHom(algebra, target, mapping)


@dataclass(frozen=True)
class SemiadditiveFunctor:
    """Object and arrow actions between two category instances.

    ``kind`` records how the functor arose (``lattice-hom-induced`` or
    ``caller-supplied``); the checker treats both alike.
    """

    kind: str
    source: SemiadditiveCategory
    target: SemiadditiveCategory
    object_map: Callable[[Any], Any]
    arrow_map: Callable[[Arrow], Arrow]

    def apply_object(self, obj: Any) -> Any:
        return self.object_map(obj)

    def apply_arrow(self, f: Arrow) -> Arrow:
        image = self.arrow_map(f)
        if (image.source != self.object_map(f.source)
                or image.target != self.object_map(f.target)):
            raise ArrowTypeError(
                "functor image endpoints disagree with the object action")
        return image


def induced_functor(hom: LatticeHom) -> SemiadditiveFunctor:
    """Entrywise application of a lattice homomorphism, identity on carriers."""
    source_cat = RelationCategory(hom.source)
    target_cat = RelationCategory(hom.target)
    table = np.array(hom.mapping, dtype=np.int16)

    def map_arrow(f: LRelation) -> LRelation:
        if f.algebra != hom.source:
            raise ArrowTypeError("arrow lives over a different algebra")
        return LRelation(hom.target, f.source, f.target, table[f.values])

    return SemiadditiveFunctor(
        kind="lattice-hom-induced",
        source=source_cat,
        target=target_cat,
        object_map=lambda obj: obj,
        arrow_map=map_arrow,
    )


class _FunctorChecker:
    """Accumulates per-law tallies for functor checks."""

    def __init__(self, functor: SemiadditiveFunctor, tol: Tolerance | None):
        self.functor = functor
        self.tol = tol
        self.order: list[str] = []
        self.tallies: dict[str, dict] = {}

    def check(self, law: str, got: Arrow, want: Arrow, inputs: dict) -> None:
        entry = self.tallies.get(law)
        if entry is None:
            entry = self.tallies[law] = {
                "trials": 0, "failures": 0, "max_residual": 0.0,
                "counterexample": None,
            }
            self.order.append(law)
        tgt = self.functor.target
        entry["trials"] += 1
        ok = tgt.equal(got, want, self.tol)
        entry["max_residual"] = max(entry["max_residual"],
                                    tgt.residual(got, want))
        if not ok:
            entry["failures"] += 1
            if entry["counterexample"] is None:
                src = self.functor.source
                entry["counterexample"] = {
                    "inputs": {k: src.describe_arrow(v)
                               for k, v in inputs.items()},
                    "lhs": tgt.describe_arrow(got),
                    "rhs": tgt.describe_arrow(want),
                }

    def check_zero_object(self) -> None:
        fz = self.functor.apply_object(self.functor.source.zero_object())
        self.check("zero_object", self.functor.target.zero(fz, fz),
                   self.functor.target.identity(fz), {})

    def check_laws_on(self, f: Arrow, g: Arrow, u: Arrow) -> None:
        """Functor laws on a parallel pair f, g and a post-composable u."""
        functor, src, tgt = self.functor, self.functor.source, self.functor.target
        fx = functor.apply_object(f.source)
        fy = functor.apply_object(f.target)
        self.check("additive", functor.apply_arrow(src.add(f, g)),
                   tgt.add(functor.apply_arrow(f), functor.apply_arrow(g)),
                   {"f": f, "g": g})
        self.check("zero_arrow", functor.apply_arrow(src.zero(f.source, f.target)),
                   tgt.zero(fx, fy), {})
        self.check("identity", functor.apply_arrow(src.identity(f.source)),
                   tgt.identity(fx), {})
        self.check("composition", functor.apply_arrow(src.compose(u, f)),
                   tgt.compose(functor.apply_arrow(u), functor.apply_arrow(f)),
                   {"f": f, "u": u})

    def check_witness_transport(self, x: Any, y: Any) -> "tuple[Any, Any, Arrow]":
        """Comparison arrow between the images of canonical witnesses."""
        functor, tgt = self.functor, self.functor.target
        src = self.functor.source
        wit = src.canonical_biproduct(x, y)
        wit_t = tgt.canonical_biproduct(functor.apply_object(x),
                                        functor.apply_object(y))
        f_pi1 = functor.apply_arrow(wit.pi1)
        f_pi2 = functor.apply_arrow(wit.pi2)
        f_iota1 = functor.apply_arrow(wit.iota1)
        f_iota2 = functor.apply_arrow(wit.iota2)
        gamma = tgt.add(tgt.compose(wit_t.iota1, f_pi1),
                        tgt.compose(wit_t.iota2, f_pi2))
        self.check("gamma_pi1", tgt.compose(wit_t.pi1, gamma), f_pi1, {})
        self.check("gamma_pi2", tgt.compose(wit_t.pi2, gamma), f_pi2, {})
        self.check("gamma_iota1", tgt.compose(gamma, f_iota1), wit_t.iota1, {})
        self.check("gamma_iota2", tgt.compose(gamma, f_iota2), wit_t.iota2, {})
        gamma_inv = tgt.add(tgt.compose(f_iota1, wit_t.pi1),
                            tgt.compose(f_iota2, wit_t.pi2))
        fcarrier = functor.apply_object(wit.carrier)
        self.check("gamma_invertible_left", tgt.compose(gamma_inv, gamma),
                   tgt.identity(fcarrier), {})
        self.check("gamma_invertible_right", tgt.compose(gamma, gamma_inv),
                   tgt.identity(wit_t.carrier), {})
        return wit, wit_t, gamma

    def check_naturality(self, wit, wit_t, gamma, a1: Arrow, a2: Arrow) -> None:
        functor, src, tgt = self.functor, self.functor.source, self.functor.target
        wit_d = src.canonical_biproduct(a1.target, a2.target)
        wit_dt = tgt.canonical_biproduct(functor.apply_object(a1.target),
                                         functor.apply_object(a2.target))
        block_src = oplus(src, a1, a2, wit, wit_d)
        gamma_d = tgt.add(
            tgt.compose(wit_dt.iota1, functor.apply_arrow(wit_d.pi1)),
            tgt.compose(wit_dt.iota2, functor.apply_arrow(wit_d.pi2)))
        block_tgt = oplus(tgt, functor.apply_arrow(a1),
                          functor.apply_arrow(a2), wit_t, wit_dt)
        self.check("gamma_natural",
                   tgt.compose(gamma_d, functor.apply_arrow(block_src)),
                   tgt.compose(block_tgt, gamma), {"a1": a1, "a2": a2})

    def report(self) -> LawReport:
        report = LawReport()
        for law in self.order:
            entry = self.tallies[law]
            report.record(law, entry["failures"] == 0, trials=entry["trials"],
                          max_residual=entry["max_residual"],
                          counterexample=entry["counterexample"])
        return report


def _enumerate_relation_arrows(algebra, source, target):
    k = len(algebra.elements)
    cells = len(source) * len(target)
    for assignment in itertools.product(range(k), repeat=cells):
        grid = np.array(assignment, dtype=np.int16).reshape(len(target),
                                                            len(source))
        yield LRelation(algebra, source, target, grid)


def _exhaustive_shapes(max_cells: int):
    for rows in range(1, max_cells + 1):
        for cols in range(1, max_cells + 1):
            if rows * cols <= max_cells:
                yield rows, cols


def _run_exhaustive_pass(checker: _FunctorChecker, max_cells: int) -> None:
    """Enumerate every arrow between small carriers and check the laws.

    Covers each shape whose grid has at most ``max_cells`` cells:
    additivity over all parallel pairs, composition through a one-element
    middle carrier (which meets every lattice value combination), plus
    identity, zero, and witness transport once per shape.
    """
    functor = checker.functor
    src, tgt = functor.source, functor.target
    algebra = src.algebra
    for rows, cols in _exhaustive_shapes(max_cells):
        source = tuple(f"s{i}" for i in range(cols))
        target = tuple(f"t{i}" for i in range(rows))
        arrows = list(_enumerate_relation_arrows(algebra, source, target))
        images = [functor.apply_arrow(f) for f in arrows]
        for f, f_img in zip(arrows, images):
            for g, g_img in zip(arrows, images):
                checker.check("additive", functor.apply_arrow(src.add(f, g)),
                              tgt.add(f_img, g_img), {"f": f, "g": g})
        checker.check("zero_arrow",
                      functor.apply_arrow(src.zero(source, target)),
                      tgt.zero(functor.apply_object(source),
                               functor.apply_object(target)), {})
        checker.check("identity", functor.apply_arrow(src.identity(source)),
                      tgt.identity(functor.apply_object(source)), {})
        mid = ("m0",)
        outgoing = list(_enumerate_relation_arrows(algebra, mid, target))
        out_images = [functor.apply_arrow(g) for g in outgoing]
        incoming = list(_enumerate_relation_arrows(algebra, source, mid))
        in_images = [functor.apply_arrow(f) for f in incoming]
        for g, g_img in zip(outgoing, out_images):
            for f, f_img in zip(incoming, in_images):
                checker.check("composition",
                              functor.apply_arrow(src.compose(g, f)),
                              tgt.compose(g_img, f_img), {"f": f, "g": g})
        checker.check_witness_transport(source, target)


def check_cmon_functor(functor: SemiadditiveFunctor,
                       sampler: ArrowSampler | None = None,
                       trials: int = 100, tol: Tolerance | None = None,
                       seed: int = 0, exhaustive_cells: int = 2) -> LawReport:
    """Functor laws plus transport of canonical biproduct witnesses.

    Per sampled trial: additivity on a parallel pair, preservation of zero
    arrows, identities, and composition; then, on a sampled object pair, the
    comparison arrow built from the image projections is checked to commute
    with the canonical witnesses on both sides, to be invertible, and to be
    natural in a sampled square.  Preservation of the zero object is checked
    once.  For relation-instance sources the finite homsets between carriers
    with at most ``exhaustive_cells`` grid cells are additionally enumerated
    in full; scalar homsets are infinite, so those instances stay purely
    sampling-based.
    """
    src = functor.source
    rng = random.Random(seed)
    if sampler is None:
        sampler = src.default_sampler()
    checker = _FunctorChecker(functor, tol)
    checker.check_zero_object()

    for _ in range(trials):
        x = sampler.random_object(rng)
        y = sampler.random_object(rng)
        w = sampler.random_object(rng)
        f = sampler.random_arrow(rng, x, y)
        g = sampler.random_arrow(rng, x, y)
        u = sampler.random_arrow(rng, y, w)
        checker.check_laws_on(f, g, u)
        wit, wit_t, gamma = checker.check_witness_transport(x, y)
        d1 = sampler.random_object(rng)
        d2 = sampler.random_object(rng)
        a1 = sampler.random_arrow(rng, x, d1)
        a2 = sampler.random_arrow(rng, y, d2)
        checker.check_naturality(wit, wit_t, gamma, a1, a2)

    if exhaustive_cells > 0 and isinstance(src, RelationCategory):
        _run_exhaustive_pass(checker, exhaustive_cells)
    return checker.report()


def check_cmon_functor_exhaustive(functor: SemiadditiveFunctor,
                                  max_cells: int = 4,
                                  tol: Tolerance | None = None) -> LawReport:
    """Exhaustive functor laws over all small finite homsets.

    Only available for relation-instance sources.  Enumerates every arrow
    between carriers whose grid has at most ``max_cells`` cells; because
    induced functors act entrywise, this meets every combination of lattice
    values the laws can involve.
    """
    if not isinstance(functor.source, RelationCategory):
        raise ArrowTypeError(
            "exhaustive functor checking needs finite homsets "
            "(a relation-instance source)")
    checker = _FunctorChecker(functor, tol)
    checker.check_zero_object()
    _run_exhaustive_pass(checker, max_cells)
    return checker.report()


def map_decomposition(functor: SemiadditiveFunctor, f: Arrow,
                      dec: SpectralDecomposition,
                      tol: Tolerance | None = None
                      ) -> tuple[Arrow, SpectralDecomposition]:
    """Carry a verified decomposition through a functor.

    The input must verify in the source instance (a failing input is
    rejected); the image consists of the functor applied to every arrow of
    the decomposition and decomposes the image of ``f``.
    """
    source_report = verify_decomposition(functor.source, f, dec, tol)
    if not source_report.passed:
        failing = ", ".join(c.law for c in source_report.failures())
        raise DecompositionError(
            f"input decomposition does not verify (failing: {failing})")
    blocks = tuple(
        Block(functor.apply_object(b.space),
              functor.apply_arrow(b.project),
              functor.apply_arrow(b.inject),
              functor.apply_arrow(b.local))
        for b in dec.blocks)
    image = functor.apply_arrow(f)
    mapped = SpectralDecomposition(functor.apply_object(dec.carrier), blocks,
                                   arrow=image)
    return image, mapped
