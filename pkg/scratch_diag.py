"""Diagnose patch-coupling consistency: polynomial fields on aligned grids."""
import numpy as np

from patchbeam import materials as M
from patchbeam import patches as P
from patchbeam import solvers as S
from scratch_check import make_model, AL, SIC, Q

# aligned setup: N=5 patches, nx=5, x_int=24 -> h=4/24, H=5/24, origins k*H
kw = dict(L=0.105, W=0.015, T=0.009, ny=4, nz=4, tip_load_n=0.0)
model_p, scales = make_model(x_int=24, full=False, n_patches=5, nx=5,
                             interp=4, **kw)
model_f, _ = make_model(x_int=24, full=True, **kw)

grid_p, grid_f = model_p.grid, model_f.grid
print("patch origins:", [grid_p.patch_origin(p) for p in range(5)])
print("aligned to dx:", [grid_p.patch_origin(p) / grid_p.micro.dx
                         for p in range(5)])


def poly_state(model, fx):
    """u=v=0, w = fx(x) at every dynamic w node."""
    y = model.zero_state()
    _, _, wd, _, _, _ = model.layout.views(y)
    x = model.x_dynamic("w")
    wd[...] = fx(x)[:, None, None, :]
    return y


def compare(fx, label):
    yp = poly_state(model_p, fx)
    yf = poly_state(model_f, fx)
    dp = model_p.rhs(0.0, yp)
    df = model_f.rhs(0.0, yf)
    # map: patch p, dynamic plane ii -> full-domain dynamic plane
    *_, aup, avp, awp = model_p.layout.views(dp)
    *_, auf, avf, awf = model_f.layout.views(df)
    xs_p = model_p.x_dynamic("w")
    xs_f = model_f.x_dynamic("w")[0]
    err = 0.0
    for p in range(grid_p.n_patches):
        for ii in range(grid_p.micro.n_x - 2):
            jf = np.argmin(np.abs(xs_f - xs_p[p, ii]))
            assert abs(xs_f[jf] - xs_p[p, ii]) < 1e-12
            e = np.abs(awp[p, :, :, ii] - awf[0, :, :, jf]).max()
            eu = np.abs(aup[p, :, :, ii] - auf[0, :, :, jf]).max()
            err = max(err, e, eu)
    scale = np.abs(awf).max()
    print(f"{label}: patch-vs-full accel err {err:.3e} (scale {scale:.3e})")


for deg in range(1, 5):
    compare(lambda x, d=deg: x**d, f"w=x^{deg}")
compare(lambda x: 0.1 * x**2 * (3 - x), "w=0.1x^2(3-x)")
