"""Digit tiles: polytope test, exact hulls and raster images."""

# %%
import sys
from pathlib import Path
from importlib import resources

from cshape.geometry import digit_tile_hull, facet_normal_eigencheck, polytope_test, tile_raster
from cshape.specfile import load


def example(name):
    return load(resources.files("cshape").joinpath("data", f"{name}.sub"))


# %% extreme points of conv(F_n) stabilise for polytope tiles and keep growing otherwise
for name in ("gasket", "rocket", "shooter", "nonselfsimilar", "nonpolytope"):
    t = polytope_test(example(name), 6)
    print(f"{name:15s} counts {t.counts} polytope {t.is_polytope}")

# %% the hull of the non-self-similar tile, with its facet normals checked against L*
z = example("nonselfsimilar")
hull = digit_tile_hull(z, 1)
print("vertices", [tuple(str(c) for c in v) for v in hull.vertices])
report, eigenvalues, integral = facet_normal_eigencheck(z)
print("rational eigenvalues", eigenvalues, "facet powers", [r.power for r in report])

# %% twin dragon at level 12: 4096 points, written as PGM and SVG
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
approx, pgm, svg = tile_raster(example("twindragon"), 12, 400, 400, 10)
(out / "twindragon.pgm").write_bytes(pgm)
(out / "twindragon.svg").write_text(svg, encoding="utf-8")
print(len(approx.points), "points written to", out.resolve())
