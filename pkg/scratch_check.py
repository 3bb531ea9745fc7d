"""Scratch validation of the core numerics (not part of the package)."""
import time

import numpy as np

from patchbeam import materials as M
from patchbeam import microgrid as G
from patchbeam import patches as P
from patchbeam import solvers as S

AL = M.ConstituentProps(67e9, 2700, 0.33)
SIC = M.ConstituentProps(302e9, 3200, 0.17)
Q = 91.6e9


def make_model(kind="homogeneous", n_patches=1, full=True, nx=7, ny=5, nz=7,
               x_int=64, L=0.105, W=0.015, T=0.009, eta=0.0, tip_load_n=147.0,
               interp=4, layers=None, exponent=1.0, alpha=0.0, seed=7):
    if layers is not None:
        grading = M.GradingSpec(kind="layered", q_parameter=Q, layers=tuple(layers))
    elif kind == "homogeneous":
        grading = M.GradingSpec(kind="homogeneous", q_parameter=Q, metal_fraction=1.0)
    else:
        grading = M.GradingSpec(kind=kind, q_parameter=Q, exponent_a=exponent,
                                perturbation_alpha=alpha, seed=seed)
    scales = M.build_nondim_scales((L, W, T), grading, AL, SIC)
    grid = P.build_patch_grid(W / L, T / L, n_patches, nx, ny, nz, 1.0 / x_int,
                              interp_order=interp, full_domain=full)
    mat = M.build_material_field(grading, AL, SIC, grid, scales)
    tip = tip_load_n / (scales.E_ref * L**2)
    model = P.BeamModel(grid, mat, eta=eta, tip_load=tip)
    return model, scales


def check_basics():
    model, scales = make_model(x_int=16, tip_load_n=0.0)
    y = model.zero_state()
    dy = model.rhs(0.0, y)
    print("zero rhs max:", np.abs(dy).max())

    # rigid translation: set all displacement dofs of one component to c
    y = model.zero_state()
    ud, vd, wd, *_ = model.layout.views(y)
    ud[...] = 0.7
    vd[...] = -0.3
    wd[...] = 0.2
    dy = model.rhs(0.0, y)
    # clamped left end fights rigid translation; look at accel far from ends
    _, _, _, au, av, aw = model.layout.views(dy)
    print("rigid accel interior max:", np.abs(au[..., 5:-5]).max(),
          np.abs(av[..., 5:-5]).max(), np.abs(aw[..., 5:-5]).max())

    # purity
    y = np.random.default_rng(0).standard_normal(model.n_state)
    d1 = model.rhs(0.0, y)
    d2 = model.rhs(0.0, y)
    print("purity bit-identical:", np.array_equal(d1, d2))


def check_stress_constant_strain():
    grid = G.StaggeredGrid(7, 5, 6, 0.05, 0.04, 0.03)
    lam0, mu0 = 2.0, 1.5

    class Mat:
        pass

    mat = Mat()
    shp = (grid.n_z, grid.n_y, grid.n_x - 1)
    mat.lam = np.full(shp, lam0)
    mat.mu = np.full(shp, mu0)
    mat.mu_xy = np.full((grid.n_z, grid.n_y - 1, grid.n_x - 1), mu0)
    mat.mu_xz = np.full((grid.n_z - 1, grid.n_y, grid.n_x - 1), mu0)
    mat.mu_yz = np.full((grid.n_z - 1, grid.n_y - 1, grid.n_x), mu0)
    mat.rho_u = np.ones((grid.n_z, grid.n_y, grid.n_x))
    mat.rho_v = np.ones((grid.n_z, grid.n_y - 1, grid.n_x))
    mat.rho_w = np.ones((grid.n_z - 1, grid.n_y, grid.n_x))

    eps = 0.01
    disp = G.empty_fields(grid)
    disp.u[...] = eps * grid.x_half()[None, None, :]
    st = G.compute_stress(disp, mat, grid)  # no ghosts
    print("sxx==(lam+2mu)eps:", np.allclose(st.sxx, (lam0 + 2 * mu0) * eps),
          "syy==lam*eps:", np.allclose(st.syy, lam0 * eps),
          "shears zero:", np.abs(st.sxy).max(), np.abs(st.sxz).max())

    ghosts = G.apply_transverse_bcs(disp, mat, grid)
    st2 = G.compute_stress(disp, mat, grid, ghosts)
    print("with ghosts syy at front wall:", np.abs(st2.syy[:, 0, :]).max(),
          "szz bottom:", np.abs(st2.szz[0, :, :]).max(),
          "syy corner:", np.abs(st2.syy[0, 0, :]).max())

    # pure shear u = gamma*y
    disp = G.empty_fields(grid)
    disp.u[...] = 0.02 * grid.y_integer()[None, :, None]
    ghosts = G.apply_transverse_bcs(disp, mat, grid)
    st3 = G.compute_stress(disp, mat, grid, ghosts)
    print("pure shear sxy==mu*g:", np.allclose(st3.sxy, mu0 * 0.02),
          "normals:", np.abs(st3.sxx).max(), np.abs(st3.syy).max())


def check_jacobian():
    for desc, kwargs in [
        ("full", dict(x_int=12, full=True, eta=1e-3)),
        ("patches", dict(x_int=48, full=False, n_patches=6, nx=5, eta=1e-3,
                         interp=4)),
        ("patches P2", dict(x_int=48, full=False, n_patches=6, nx=5, eta=0.0,
                            interp=2)),
    ]:
        model, _ = make_model(layers=[(0.003, 1.0), (0.003, 0.8), (0.003, 0.6)],
                              **kwargs)
        t0 = time.time()
        Jc = S.model_jacobian(model)
        t1 = time.time()
        rhs = lambda t, y: model.rhs(t, y, check_finite=False)
        Jb = S.assemble_jacobian(rhs, model.n_state, plan=None, spot_check=False)
        t2 = time.time()
        diff = (Jc - Jb)
        diff.eliminate_zeros()
        err = np.abs(diff.data).max() if diff.nnz else 0.0
        print(f"{desc}: n={model.n_state} colored {t1-t0:.2f}s brute {t2-t1:.2f}s"
              f" max|diff|={err:.2e} nnz={Jb.nnz}")
        # linearity: rhs(x) == J x + b
        rng = np.random.default_rng(1)
        x = rng.standard_normal(model.n_state)
        b = model.rhs(0.0, model.zero_state())
        err2 = np.abs(model.rhs(0.0, x) - (Jb @ x + b)).max()
        print("   rhs==Jx+b err:", err2)


def check_static_eb():
    # homogeneous Al cantilever, 3-layer geometry
    model, scales = make_model(x_int=64, tip_load_n=147.0)
    t0 = time.time()
    y = S.solve_static(model, S.SolverSettings())
    t1 = time.time()
    iw = model.tip_index("w")
    L, W, T = 0.105, 0.015, 0.009
    EI = 67e9 * W * T**3 / 12
    eb = 147.0 * L**3 / (3 * EI) / L
    print(f"homog static tip w = {y[iw]:.5e} (EB {-eb:.5e}) ratio "
          f"{y[iw] / -eb:.4f}  [{t1-t0:.2f}s]")


if __name__ == "__main__":
    check_basics()
    check_stress_constant_strain()
    check_jacobian()
    check_static_eb()
