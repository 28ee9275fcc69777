"""Matrices as arrows: biproducts, pairing, and addition recovered from blocks.

A matrix with t rows and s columns is an arrow s -> t; the biproduct of two
dimensions is their sum, with 0/1 projection and injection blocks.  Pairing
stacks arrows, copairing juxtaposes them, and the detour through the block
sum recovers ordinary matrix addition.
"""

import numpy as np

from specat import (
    MAT_R,
    ScalarMatrix,
    check_biproduct_axioms,
    copair,
    oplus,
    pair,
    run_law_suite,
    sum_via_biproduct,
)

w = MAT_R.canonical_biproduct(2, 1)
print("carrier dimension:", w.carrier)
print("first projection:\n", w.pi1.values)
print("second projection:\n", w.pi2.values)

report = check_biproduct_axioms(MAT_R, w)
print("witness axioms pass:", report.passed)

f1 = ScalarMatrix([[1.0, 0.0]])
f2 = ScalarMatrix([[0.0, 1.0]])
print("pairing stacks rows into the carrier:\n",
      pair(MAT_R, f1, f2, MAT_R.canonical_biproduct(1, 1)).values)

g1 = ScalarMatrix([[1.0], [0.0]])
g2 = ScalarMatrix([[0.0], [1.0]])
print("copairing juxtaposes columns:\n",
      copair(MAT_R, g1, g2, MAT_R.canonical_biproduct(1, 1)).values)

a = ScalarMatrix([[2.0]])
b = ScalarMatrix([[3.0]])
w1 = MAT_R.canonical_biproduct(1, 1)
print("block sum is the diagonal:\n", oplus(MAT_R, a, b, w1, w1).values)

f = ScalarMatrix([[1.0, -2.0], [0.5, 0.0]])
g = ScalarMatrix([[0.0, 1.0], [1.0, 4.0]])
via_blocks = sum_via_biproduct(MAT_R, f, g)
print("codiagonal . (f (+) g) . diagonal equals f + g:",
      np.array_equal(via_blocks.values, (f + g).values))

suite = run_law_suite(MAT_R, trials=50, seed=0)
print(f"law suite on {MAT_R.name}: {len(suite.checks)} laws,",
      "all pass" if suite.passed else "FAILURES")
