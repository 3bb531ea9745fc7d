"""Test clamp-datum-augmented stencils near the left boundary."""
import numpy as np
from scipy.interpolate import CubicSpline

from patchbeam import patches as P
from patchbeam import solvers as S
from scratch_check import make_model
from scratch_calib import L3, LAY3
from scratch_calib2 import zbend_freqs, centreline_error


def augment_left(model):
    """Rebuild stencils: left-shifted windows get the clamp point (value 0)
    as a datum, so the farthest patch drops out of the window."""
    grid = model.grid
    N, Pord = grid.n_patches, grid.interp_order
    h, dx = grid.patch_length, grid.micro.dx
    wl = np.zeros((N - 1, N))
    wr = np.zeros((N - 1, N))
    for target in range(N):
        lo_ideal = target - Pord // 2
        lo = min(max(lo_ideal, 0), N - 1 - Pord)
        for face in ("left", "right"):
            if face == "left" and target == 0:
                continue
            if face == "right" and target == N - 1:
                continue
            if lo_ideal < 0:
                # one window slot is the clamp plane at x=0 with value 0
                src = np.arange(0, Pord)
                if face == "left":
                    xs = np.concatenate([[0.0], grid.centres[src] + h / 2 - dx])
                    tx = grid.centres[target] - h / 2
                else:
                    xs = np.concatenate([[0.0], grid.centres[src] - h / 2 + dx])
                    tx = grid.centres[target] + h / 2
                w = P.lagrange_weights(xs, tx)[1:]
            else:
                src = np.arange(lo, lo + Pord + 1)
                if face == "left":
                    xs = grid.centres[src] + h / 2 - dx
                    tx = grid.centres[target] - h / 2
                else:
                    xs = grid.centres[src] - h / 2 + dx
                    tx = grid.centres[target] + h / 2
                w = P.lagrange_weights(xs, tx)
            if face == "left":
                wl[target - 1, src] = w
            else:
                wr[target, src] = w
    model._wl, model._wr = wl, wr
    return model


mf, _ = make_model(layers=LAY3, ny=5, nz=7, x_int=164, full=True, **L3)
yf = S.solve_static(mf, S.SolverSettings())
print("full tip:", yf[mf.tip_index('w')])

for n_patches, ttip, terr in [(9, -6.23e-3, 1.5), (17, -6.13e-3, 0.3)]:
    for aug in (False, True):
        mp, _ = make_model(layers=LAY3, ny=5, nz=7, x_int=164, full=False,
                           n_patches=n_patches, nx=7, interp=4, **L3)
        if aug:
            augment_left(mp)
        yp = S.solve_static(mp, S.SolverSettings())
        tip = yp[mp.tip_index("w")]
        err = centreline_error(mp, yp, mf, yf)
        freqs, _ = zbend_freqs(mp)
        print(f"{n_patches}p aug={aug}: tip {tip:.4e} (t {ttip}) err "
              f"{100*err:.2f}% (<= {terr}%) z-bend {np.round(freqs, 4)}")
