"""Heights, eigenvalues, reduction, automorphisms and symmetry matrices."""

# %%
from fractions import Fraction
from importlib import resources

from cshape.morphisms import (
    automorphisms, eigenvalue_check, height_lattice, normalizer_condition, radius_bound, symmetry_candidates,
)
from cshape.patterns import period_search
from cshape.specfile import load, serialize
from cshape.substitution import reduce


def example(name):
    return load(resources.files("cshape").joinpath("data", f"{name}.sub"))


# %% the product of a height-2 and a height-3 rule has height lattice 2Z x 3Z
prod = example("height_product")
h = height_lattice(prod).lattice
print("height", h)
print("1/2 along x is an eigenvalue:", eigenvalue_check((Fraction(1, 2), 0), prod, h))
print("swapping axes passes the normalizer condition:", normalizer_condition(((0, 1), (1, 0)), prod, prod, 2, (h, h)))

# %% merging asymptotically equal letters
red, classes = reduce(example("tm_doubling"))
print(serialize(red))
print("periods seen on large patches:", period_search(red, 2))

# %% automorphisms modulo shifts and the symmetry matrices of Thue-Morse
tm = example("tm2d")
print("radius bound", radius_bound(tm))
print("automorphisms", [bm.table for bm in automorphisms(tm).elements])
for c in symmetry_candidates(tm, [(1, 0), (0, 1), (-1, 0), (0, -1)]):
    print(c.M, "order", c.order)
