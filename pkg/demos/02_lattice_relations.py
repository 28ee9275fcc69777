"""Relations valued in a finite Heyting algebra, and a two-loop decomposition.

The four-element Boolean algebra {0, a, b, 1} has two incomparable middle
values: a graph with an a-loop and a b-loop on separate vertices splits into
two one-point blocks whose projections mix the labels so that everything
cancels exactly.
"""

from specat import (
    Block,
    LRelation,
    RelationCategory,
    SpectralDecomposition,
    b4,
    verify_decomposition,
)

B4 = b4()
print("elements:", B4.elements)
print("a meet b =", B4.label(B4.meet_of(B4.index("a"), B4.index("b"))))
print("a join b =", B4.label(B4.join_of(B4.index("a"), B4.index("b"))))
print("derived implication a => b =",
      B4.label(B4.implies(B4.index("a"), B4.index("b"))))

cat = RelationCategory(B4)
C = ("c1", "c2")
rel = lambda s, t, grid: LRelation.from_labels(B4, s, t, grid)

f = rel(C, C, [["a", "0"], ["0", "b"]])
print("\nendo-relation f:\n", f)

dec = SpectralDecomposition(C, (
    Block(("s1",), rel(C, ("s1",), [["a", "b"]]),
          rel(("s1",), C, [["a"], ["b"]]),
          rel(("s1",), ("s1",), [["1"]])),
    Block(("s2",), rel(C, ("s2",), [["b", "a"]]),
          rel(("s2",), C, [["b"], ["a"]]),
          rel(("s2",), ("s2",), [["0"]])),
), arrow=f)

report = verify_decomposition(cat, f, dec)
print("\ndecomposition conditions:")
for check in report.checks:
    print(f"  {check.law}: {'pass' if check.passed else 'FAIL'}")
print("the mixed-label projections retract exactly because a join b = 1",
      "and a meet b = 0")
