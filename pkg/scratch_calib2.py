"""Calibration round 2: five-layer n_z scan + frequencies + patch statics."""
import time

import numpy as np

from patchbeam import solvers as S
from scratch_check import make_model
from scratch_calib import L3, LAY3, L5, LAY5


def zbend_freqs(model, count=30):
    J = S.model_jacobian(model)
    spec = S.eigenmodes(J, S.SolverSettings(), count=count)
    spec = S.classify_modes(spec, model)
    return spec.frequencies("z_bend")[:3], spec


def run_case(label, layers, geom, nz, n_patches=1, full=True, targets=()):
    t0 = time.time()
    model, scales = make_model(layers=layers, ny=5, nz=nz, x_int=164,
                               full=full, n_patches=n_patches, nx=7, **geom)
    y = S.solve_static(model, S.SolverSettings())
    tip = y[model.tip_index("w")]
    freqs, _ = zbend_freqs(model)
    print(f"{label}: tip {tip:.4e}, z-bend {np.round(freqs, 4)} "
          f"[{time.time()-t0:.1f}s] targets {targets}")
    return tip, freqs, model, y


def centreline_error(model_p, y_p, model_f, y_f):
    """Max |w_patch - w_full(x)| / max|w_full| at patch interior nodes."""
    from scipy.interpolate import CubicSpline
    pf, xf, _, _, _, iwf = model_f.centreline()
    wf = y_f[iwf]
    spline = CubicSpline(xf, wf)
    pp, xp, _, _, _, iwp = model_p.centreline()
    wp = y_p[iwp]
    return np.abs(wp - spline(xp)).max() / np.abs(wf).max()


def main():
    print("=== five-layer full-domain scan (targets: tip -4.76e-3, f 0.057/0.339/0.915)")
    for nz in (6, 7, 8, 9, 10, 11):
        run_case(f"5L nz={nz}", LAY5, L5, nz,
                 targets=(-4.76e-3, 0.057, 0.339, 0.915))

    print("=== three-layer nz=7: full + patches (targets 6.16/6.13/6.23e-3; f 0.051/0.306/0.873)")
    tf, ff, mf, yf = run_case("3L full", LAY3, L3, 7, targets=(-6.16e-3,))
    t17, f17, m17, y17 = run_case("3L 17p", LAY3, L3, 7, n_patches=17,
                                  full=False, targets=(-6.13e-3,))
    t9, f9, m9, y9 = run_case("3L 9p", LAY3, L3, 7, n_patches=9, full=False,
                              targets=(-6.23e-3,))
    print("   coverage 9p:", m9.grid.coverage, "17p:", m17.grid.coverage)
    print("   centreline err 9p:", centreline_error(m9, y9, mf, yf),
          "(<=1.5%)  17p:", centreline_error(m17, y17, mf, yf), "(<=0.3%)")


if __name__ == "__main__":
    main()
