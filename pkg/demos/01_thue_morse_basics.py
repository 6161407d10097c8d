"""Two-dimensional Thue-Morse: the set K, its language and difference sets."""

# %%
from cshape.lattice import integer_ball
from cshape.patterns import difference_sets, language
from cshape.specfile import load
from importlib import resources

path = resources.files("cshape").joinpath("data", "tm2d.sub")
tm = load(path)
print("alphabet", tm.alphabet, "expansion", tm.L)

# %% K is the set of periodic points of the digit map; its patterns seed every point
print("K =", tm.k_set)
for p in language(tm, tm.k_set):
    top = p.as_dict()[(-1, 0)] + p.as_dict()[(0, 0)]
    bottom = p.as_dict()[(-1, -1)] + p.as_dict()[(0, -1)]
    print(top, "/", bottom)

# %% sets where two legal K-patterns disagree
for ds in difference_sets(tm):
    print(ds.W, "witnessed by", ds.witnesses[0].letters, ds.witnesses[1].letters)

# %% larger windows: the number of legal patterns on balls of growing radius
for r in range(1, 4):
    print(r, len(language(tm, integer_ball(r, 2))))
