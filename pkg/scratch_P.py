"""Interpolation-order scan for patch runs against the reported tables."""
import time

import numpy as np

from patchbeam import solvers as S
from scratch_check import make_model
from scratch_calib import L3, LAY3, L5, LAY5
from scratch_calib2 import zbend_freqs, centreline_error


def run(layers, geom, nz, n_patches, interp, full_ref):
    model, _ = make_model(layers=layers, ny=5, nz=nz, x_int=164, full=False,
                          n_patches=n_patches, nx=7, interp=interp, **geom)
    y = S.solve_static(model, S.SolverSettings())
    tip = y[model.tip_index("w")]
    freqs, _ = zbend_freqs(model)
    err = centreline_error(model, y, *full_ref)
    return tip, freqs, err


def main():
    mf3, _ = make_model(layers=LAY3, ny=5, nz=7, x_int=164, full=True, **L3)
    yf3 = S.solve_static(mf3, S.SolverSettings())
    print("3L full tip:", yf3[mf3.tip_index('w')])

    for n_patches, target_tip, target_err in [(9, -6.23e-3, 0.015),
                                              (17, -6.13e-3, 0.003)]:
        for interp in (4, 6, 8):
            if interp > n_patches - 1:
                continue
            t0 = time.time()
            tip, freqs, err = run(LAY3, L3, 7, n_patches, interp, (mf3, yf3))
            print(f"3L {n_patches}p P={interp}: tip {tip:.4e} "
                  f"(target {target_tip}), err {err:.4f} (<= {target_err}), "
                  f"z-bend {np.round(freqs, 4)} [{time.time()-t0:.0f}s]")

    mf5, _ = make_model(layers=LAY5, ny=5, nz=6, x_int=164, full=True, **L5)
    yf5 = S.solve_static(mf5, S.SolverSettings())
    print("5L full tip:", yf5[mf5.tip_index('w')])
    for n_patches, target_tip, target_err in [(9, -4.85e-3, 0.025),
                                              (17, -4.77e-3, 0.005)]:
        for interp in (4, 6, 8):
            if interp > n_patches - 1:
                continue
            t0 = time.time()
            tip, freqs, err = run(LAY5, L5, 6, n_patches, interp, (mf5, yf5))
            print(f"5L {n_patches}p P={interp}: tip {tip:.4e} "
                  f"(target {target_tip}), err {err:.4f} (<= {target_err}), "
                  f"z-bend {np.round(freqs, 4)} [{time.time()-t0:.0f}s]")


if __name__ == "__main__":
    main()
