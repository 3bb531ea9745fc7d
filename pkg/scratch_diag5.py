"""Inspect the 9-patch fundamental bending eigenvector vs full domain."""
import numpy as np
from scipy.interpolate import CubicSpline

from patchbeam import solvers as S
from scratch_check import make_model

kw = dict(L=0.105, W=0.015, T=0.009, ny=4, nz=4, tip_load_n=0.0, eta=0.0)

mf, _ = make_model(x_int=164, full=True, **kw)
sf = S.classify_modes(S.eigenmodes(S.model_jacobian(mf), S.SolverSettings(),
                                   count=10), mf)
m9, _ = make_model(x_int=164, full=False, n_patches=9, nx=7, interp=4, **kw)
s9 = S.classify_modes(S.eigenmodes(S.model_jacobian(m9), S.SolverSettings(),
                                   count=10), m9)


def mode_w(model, spec, which=0):
    idx = [i for i, m in enumerate(spec.mode_type) if m == "z_bend"][which]
    vec = spec.vectors[:, idx]
    _, _, wd, _, _, _ = model.layout.views(vec)
    # centre of cross-section, phase-normalised by the tip value
    w = wd[:, wd.shape[1] // 2, wd.shape[2] // 2, :]
    w = w / w[-1, -1]
    return model.x_dynamic("w"), w.real, spec.eigenvalues[idx]


xf, wf, lf = mode_w(mf, sf)
x9, w9, l9 = mode_w(m9, s9)
spl = CubicSpline(xf[0], wf[0])
print("full lambda:", lf, " 9p lambda:", l9)
print("patch | x, w9, w_full(x), diff")
for p in range(9):
    for i in range(w9.shape[1]):
        print(f"  p{p} x={x9[p, i]:.4f}  w9={w9[p, i]:+.5f} "
              f"wf={spl(x9[p, i]):+.5f} d={w9[p, i] - spl(x9[p, i]):+.5f}")

# u field z-profile at mid-beam patch, u ~ -z w' expected linear in z
idxz = [i for i, m in enumerate(s9.mode_type) if m == "z_bend"][0]
vec = s9.vectors[:, idxz]
ud, _, wd, _, _, _ = m9.layout.views(vec)
scale = wd[-1, wd.shape[1] // 2, wd.shape[2] // 2, -1]
print("u(z) profile at patch 4, plane 2 (expect linear in z):")
print(np.round((ud[4, :, 2, 2] / scale).real, 5))
print("u(x) at top row, patch 4 (all planes):")
print(np.round((ud[4, -1, 2, :] / scale).real, 5))
