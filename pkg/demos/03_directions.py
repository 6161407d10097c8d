"""Nondeterministic directions of Thue-Morse and of the table tiling."""

# %%
from importlib import resources

from cshape.directions import direction_report, soundness_check
from cshape.specfile import load

tm = load(resources.files("cshape").joinpath("data", "tm2d.sub"))
table = load(resources.files("cshape").joinpath("data", "table.sub"))

# %% every cone of the normal fan of the tile hull gets a status
for name, z, r_max in (("Thue-Morse", tm, 6), ("table", table, 0)):
    rep = direction_report(z, n_max=5, r_max=r_max)
    print(name, rep.counts())
    for c in rep.cones:
        extra = f"W={c.certificate.W} n={c.certificate.n}" if c.certificate else f"radius={c.radius}"
        print("   ", c.cone.generators, c.status, extra)

# %% a certificate can be replayed: two points agreeing on a half-space but not everywhere
rep = direction_report(tm, n_max=3, r_max=0)
cert = next(c for c in rep.cones if c.certificate).certificate
w = soundness_check(tm, cert, R=32)
print("agreement on", w.agree_points, "points of the half ball; first difference at", w.disagreement)
