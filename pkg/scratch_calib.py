"""Calibration: which cross-section resolution reproduces the reported tables."""
import time

import numpy as np

from patchbeam import materials as M
from patchbeam import patches as P
from patchbeam import solvers as S
from scratch_check import make_model

L3 = dict(L=0.105, W=0.015, T=0.009)
LAY3 = [(0.003, 1.0), (0.003, 0.8), (0.003, 0.6)]
L5 = dict(L=0.110, W=0.015, T=0.010)
LAY5 = [(0.002, 1.0), (0.002, 0.9), (0.002, 0.8), (0.002, 0.7), (0.002, 0.6)]


def static_tip(nz, ny=5, x_int=164, layers=LAY3, geom=L3, n_patches=1,
               full=True, nx=7):
    model, scales = make_model(layers=layers, ny=ny, nz=nz, x_int=x_int,
                               full=full, n_patches=n_patches, nx=nx, **geom)
    y = S.solve_static(model, S.SolverSettings())
    return y[model.tip_index("w")], model


def main():
    print("=== three-layer full domain (target -6.16e-3) ===")
    for ny, nz in [(5, 6), (5, 7), (6, 7), (5, 10), (6, 6), (7, 7), (5, 13)]:
        t0 = time.time()
        tip, _ = static_tip(nz, ny=ny)
        print(f"  ny={ny} nz={nz}: tip w = {tip:.4e}   [{time.time()-t0:.1f}s]")

    print("=== five-layer full domain (target -4.76e-3) ===")
    for ny, nz in [(5, 10), (5, 11), (5, 6), (6, 11)]:
        t0 = time.time()
        tip, _ = static_tip(nz, ny=ny, layers=LAY5, geom=L5)
        print(f"  ny={ny} nz={nz}: tip w = {tip:.4e}   [{time.time()-t0:.1f}s]")

    print("=== homogeneous Al, 3-layer geometry, paper res ===")
    model, scales = make_model(x_int=164, ny=5, nz=7, tip_load_n=147.0, **L3)
    y = S.solve_static(model, S.SolverSettings())
    EI = 67e9 * 0.015 * 0.009**3 / 12
    eb = 147.0 * 0.105**3 / (3 * EI) / 0.105
    tip = y[model.tip_index("w")]
    print(f"  (5,7): tip {tip:.5e} vs EB {-eb:.5e} ratio {tip / -eb:.4f}")


if __name__ == "__main__":
    main()
