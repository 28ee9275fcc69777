"""Dense matrix instances over real, complex, and non-negative real scalars.

A matrix with ``t`` rows and ``s`` columns is an arrow from ``s`` to ``t``;
objects are the non-negative integers.  Composition is the matrix product,
homset addition the entrywise sum.  No solvers are shipped: inverses for
generalized biproduct witnesses are either supplied by the caller or, for
monomial matrices, read off directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import (
    ArrowSampler,
    ArrowTypeError,
    BiproductWitness,
    SemiadditiveCategory,
    Tolerance,
    UnsupportedDomainError,
)


@dataclass(frozen=True)
class ScalarDomain:
    """A coefficient domain for dense matrices."""

    name: str
    dtype: Any
    nonnegative: bool = False

    @property
    def has_negation(self) -> bool:
        return not self.nonnegative

    @property
    def zero(self):
        return self.dtype(0)

    @property
    def one(self):
        return self.dtype(1)

    def validate(self, values: np.ndarray) -> None:
        if not np.all(np.isfinite(values)):
            raise ArrowTypeError(f"{self.name} matrix entries must be finite")
        if self.nonnegative and values.size and np.min(values) < 0:
            raise ArrowTypeError("non-negative domain rejects negative entries")

    def close(self, x, y, tol: Tolerance) -> bool:
        return abs(x - y) <= tol.abs + tol.rel * max(abs(x), abs(y))


REAL = ScalarDomain("real", np.float64)
COMPLEX = ScalarDomain("complex", np.complex128)
NONNEGATIVE = ScalarDomain("nonnegative", np.float64, nonnegative=True)


class ScalarMatrix:
    """Immutable dense matrix; as an arrow it maps its columns to its rows."""

    __slots__ = ("values", "domain")

    def __init__(self, values, domain: ScalarDomain = REAL):
        arr = np.array(values, dtype=domain.dtype)
        if arr.ndim != 2:
            raise ArrowTypeError(f"matrix must be 2-d, got shape {arr.shape}")
        domain.validate(arr)
        arr.flags.writeable = False
        self.values = arr
        self.domain = domain

    # -- arrow interface ------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def source(self) -> int:
        return self.cols

    @property
    def target(self) -> int:
        return self.rows

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, domain: ScalarDomain = REAL) -> "ScalarMatrix":
        return cls(np.zeros((rows, cols)), domain)

    @classmethod
    def identity(cls, n: int, domain: ScalarDomain = REAL) -> "ScalarMatrix":
        return cls(np.eye(n), domain)

    # -- algebra ----------------------------------------------------------------

    def _check_domain(self, other: "ScalarMatrix") -> None:
        if self.domain != other.domain:
            raise ArrowTypeError(
                f"domain mismatch: {self.domain.name} vs {other.domain.name}")

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        self._check_domain(other)
        if self.cols != other.rows:
            raise ArrowTypeError(
                f"cannot compose: left has {self.cols} columns, "
                f"right has {other.rows} rows")
        return ScalarMatrix(self.values @ other.values, self.domain)

    def __add__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        self._check_domain(other)
        if self.values.shape != other.values.shape:
            raise ArrowTypeError(
                f"cannot add shapes {self.values.shape} and {other.values.shape}")
        return ScalarMatrix(self.values + other.values, self.domain)

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        self._check_domain(other)
        if not self.domain.has_negation:
            raise UnsupportedDomainError(
                "subtraction is unavailable in the non-negative domain")
        if self.values.shape != other.values.shape:
            raise ArrowTypeError(
                f"cannot subtract shapes {self.values.shape} and {other.values.shape}")
        return ScalarMatrix(self.values - other.values, self.domain)

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix(self.values.T, self.domain)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return (self.domain == other.domain
                and self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"ScalarMatrix({self.values.tolist()!r}, "
                f"domain={self.domain.name!r})")


def is_monomial(m: ScalarMatrix) -> bool:
    """True when the matrix is square with exactly one nonzero per row and column."""
    if m.rows != m.cols:
        return False
    nz = m.values != 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


def monomial_inverse(m: ScalarMatrix) -> ScalarMatrix:
    """Inverse of a monomial matrix: transposed position pattern, reciprocal entries.

    General inversion is deliberately not provided; callers supply inverses
    for non-monomial basis changes.
    """
    if not is_monomial(m):
        raise ArrowTypeError("monomial_inverse requires a monomial matrix")
    inv = np.zeros_like(np.asarray(m.values))
    rows, cols = np.nonzero(m.values)
    inv[cols, rows] = 1.0 / m.values[rows, cols]
    return ScalarMatrix(inv, m.domain)


class MatrixCategory(SemiadditiveCategory):
    """Matrices over one scalar domain, with dimension objects."""

    exact = False

    def __init__(self, domain: ScalarDomain):
        self.domain = domain
        self.name = {"real": "mat-r", "complex": "mat-c",
                     "nonnegative": "mat-nn"}[domain.name]

    def compose(self, g: ScalarMatrix, f: ScalarMatrix) -> ScalarMatrix:
        return g @ f

    def add(self, f: ScalarMatrix, g: ScalarMatrix) -> ScalarMatrix:
        return f + g

    def zero(self, src: int, tgt: int) -> ScalarMatrix:
        return ScalarMatrix.zeros(tgt, src, self.domain)

    def identity(self, obj: int) -> ScalarMatrix:
        return ScalarMatrix.identity(obj, self.domain)

    def zero_object(self) -> int:
        return 0

    def canonical_biproduct(self, left: int, right: int) -> BiproductWitness:
        if left < 0 or right < 0:
            raise ArrowTypeError("dimensions must be non-negative")
        pi1 = ScalarMatrix(
            np.hstack([np.eye(left), np.zeros((left, right))]), self.domain)
        pi2 = ScalarMatrix(
            np.hstack([np.zeros((right, left)), np.eye(right)]), self.domain)
        return BiproductWitness(left, right, left + right,
                                pi1, pi2, pi1.transpose(), pi2.transpose())

    def generalized_biproduct(self, f: ScalarMatrix, g: ScalarMatrix,
                              f_inv: ScalarMatrix | None = None,
                              g_inv: ScalarMatrix | None = None) -> BiproductWitness:
        """Witness built from invertible basis changes on each factor.

        Inverses are computed only for monomial matrices; otherwise the caller
        must pass them explicitly.
        """
        if f.rows != f.cols or g.rows != g.cols:
            raise ArrowTypeError("basis-change matrices must be square")
        if f_inv is None:
            f_inv = monomial_inverse(f)
        if g_inv is None:
            g_inv = monomial_inverse(g)
        m, n = f.rows, g.rows
        pi1 = ScalarMatrix(
            np.hstack([np.asarray(f.values), np.zeros((m, n))]), self.domain)
        pi2 = ScalarMatrix(
            np.hstack([np.zeros((n, m)), np.asarray(g.values)]), self.domain)
        iota1 = ScalarMatrix(
            np.vstack([np.asarray(f_inv.values), np.zeros((n, m))]), self.domain)
        iota2 = ScalarMatrix(
            np.vstack([np.zeros((m, n)), np.asarray(g_inv.values)]), self.domain)
        return BiproductWitness(m, n, m + n, pi1, pi2, iota1, iota2)

    def equal(self, f: ScalarMatrix, g: ScalarMatrix,
              tol: Tolerance | None = None) -> bool:
        if f.source != g.source or f.target != g.target:
            return False
        if tol is None:
            tol = Tolerance()
        if f.values.size == 0:
            return True
        diff = np.abs(f.values - g.values)
        bound = tol.abs + tol.rel * np.maximum(np.abs(f.values), np.abs(g.values))
        return bool(np.all(diff <= bound))

    def residual(self, f: ScalarMatrix, g: ScalarMatrix) -> float:
        if f.values.size == 0:
            return 0.0
        return float(np.max(np.abs(f.values - g.values)))

    def describe_arrow(self, f: ScalarMatrix) -> dict:
        if self.domain is COMPLEX or np.iscomplexobj(f.values):
            entries = [[str(v) for v in row] for row in f.values.tolist()]
        else:
            entries = f.values.tolist()
        return {"rows": f.rows, "cols": f.cols, "entries": entries}

    def describe_object(self, obj: int) -> int:
        return int(obj)

    def default_sampler(self, max_size: int | None = None) -> "MatrixSampler":
        return MatrixSampler(self.domain, max_dim=max_size or 5)


class MatrixSampler(ArrowSampler):
    """Random dimensions up to a bound; entries bounded, with some exact zeros."""

    def __init__(self, domain: ScalarDomain, max_dim: int = 5):
        self.domain = domain
        self.max_dim = max_dim

    def random_object(self, rng: random.Random) -> int:
        return rng.randrange(self.max_dim + 1)

    def _entry(self, rng: random.Random):
        if rng.random() < 0.25:
            return 0.0
        if self.domain is COMPLEX:
            return complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        if self.domain.nonnegative:
            return rng.uniform(0.0, 2.0)
        return rng.uniform(-2.0, 2.0)

    def random_arrow(self, rng: random.Random, src: int, tgt: int) -> ScalarMatrix:
        values = [[self._entry(rng) for _ in range(src)] for _ in range(tgt)]
        arr = np.array(values, dtype=self.domain.dtype).reshape(tgt, src)
        return ScalarMatrix(arr, self.domain)


MAT_R = MatrixCategory(REAL)
MAT_C = MatrixCategory(COMPLEX)
MAT_NN = MatrixCategory(NONNEGATIVE)
