"""Where does the patch error live? Face-interp error on the true field +
error profile along the beam."""
import numpy as np
from scipy.interpolate import CubicSpline

from patchbeam import solvers as S
from scratch_check import make_model
from scratch_calib import L3, LAY3

mf, _ = make_model(layers=LAY3, ny=5, nz=7, x_int=164, full=True, **L3)
yf = S.solve_static(mf, S.SolverSettings())
pf, xf, iu0f, iu1f, ivf, iwf = mf.centreline()
wf = yf[iwf]
spl = CubicSpline(xf, wf)
wmax = np.abs(wf).max()

for n_patches in (9, 17):
    mp, _ = make_model(layers=LAY3, ny=5, nz=7, x_int=164, full=False,
                       n_patches=n_patches, nx=7, interp=4, **L3)
    yp = S.solve_static(mp, S.SolverSettings())
    pp, xp, _, _, _, iwp = mp.centreline()
    wp = yp[iwp]
    err = np.abs(wp - spl(xp)) / wmax
    per_patch = [err[pp == p].max() for p in range(n_patches)]
    print(f"{n_patches}p per-patch max err %:",
          np.round(100 * np.array(per_patch), 2))

    # face-interpolation consistency on the TRUE field: apply each stencil to
    # the spline values at source positions, compare with spline at target
    print("  face interp err % of wmax (patch, face):")
    rows = []
    for st in mp.stencils:
        vals = spl(st.source_x)
        got = st.weights @ vals
        want = spl(st.target_x)
        rows.append((st.patch, st.face, 100 * abs(got - want) / wmax))
    worst = sorted(rows, key=lambda r: -r[2])[:6]
    for r in worst:
        print("   ", r)
