"""Thresholding multi-valued relations while preserving their decompositions.

The map keeping only values at or above a chosen lattice element is a
lattice homomorphism exactly when that element is well placed; applied
entrywise it gives a functor into plain relations that is additive on
homsets, so any verified decomposition maps to a verified decomposition of
the image.
"""

from specat import (
    Block,
    LRelation,
    RelationCategory,
    SpectralDecomposition,
    b4,
    check_cmon_functor,
    induced_functor,
    map_decomposition,
    principal_filter_hom,
    verify_decomposition,
)

B4 = b4()
cat = RelationCategory(B4)
rel = lambda s, t, grid: LRelation.from_labels(B4, s, t, grid)

hom = principal_filter_hom(B4, "a")
print("threshold map:", {B4.label(i): hom.target.label(v)
                         for i, v in enumerate(hom.mapping)})
functor = induced_functor(hom)
laws = check_cmon_functor(functor, trials=40, seed=0)
print("functor laws pass:", laws.passed)

C = ("c1", "c2", "c3")
X = ("x1", "x2")
Y = ("y1",)
f = rel(C, C, [["1", "a", "0"], ["0", "a", "b"], ["0", "0", "b"]])
dec = SpectralDecomposition(C, (
    Block(X, rel(C, X, [["a", "b", "0"], ["0", "a", "b"]]),
          rel(X, C, [["a", "0"], ["b", "a"], ["0", "b"]]),
          rel(X, X, [["a", "1"], ["0", "1"]])),
    Block(Y, rel(C, Y, [["b", "0", "a"]]),
          rel(Y, C, [["b"], ["0"], ["a"]]),
          rel(Y, Y, [["b"]])),
), arrow=f)
print("\nsource decomposition verifies:",
      verify_decomposition(cat, f, dec).passed)

image, mapped = map_decomposition(functor, f, dec)
print("image keeps the edges labelled a or 1:", sorted(image.to_pairs()))
print("image decomposition verifies in plain relations:",
      verify_decomposition(functor.target, image, mapped).passed)

complement = induced_functor(principal_filter_hom(B4, "b"))
image_b, mapped_b = map_decomposition(complement, f, dec)
print("the complementary threshold keeps:", sorted(image_b.to_pairs()))
print("and also verifies:",
      verify_decomposition(complement.target, image_b, mapped_b).passed)
