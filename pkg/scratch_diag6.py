"""Locate self-adjointness violations: symmetry of M K under energy weights."""
import numpy as np
import scipy.sparse as sp

from patchbeam import solvers as S
from scratch_check import make_model

kw = dict(L=0.105, W=0.015, T=0.009, ny=4, nz=4, tip_load_n=0.0, eta=0.0)


def mass_weights(model):
    """rho * trapezoidal cell volume per dynamic node, flattened."""
    m = model.grid.micro
    w = np.zeros(model.n_disp * 2)
    ud, vd, wd, _, _, _ = model.layout.views(w)

    def axw(n, d, trap):
        a = np.full(n, d)
        if trap:
            a[0] = a[-1] = d / 2
        return a

    tz = axw(m.n_z, m.dz, True)
    ty = axw(m.n_y, m.dy, True)
    fzh = axw(m.n_z - 1, m.dz, False)
    fyh = axw(m.n_y - 1, m.dy, False)
    x_all = np.full(m.n_x - 2, m.dx)
    ud[...] = model.mat.rho_u[:, :, :, 1:-1] * (
        tz[:, None, None] * ty[None, :, None] * x_all)
    vd[...] = model.mat.rho_v[:, :, :, 1:-1] * (
        tz[:, None, None] * fyh[None, :, None] * x_all)
    wd[...] = model.mat.rho_w[:, :, :, 1:-1] * (
        fzh[:, None, None] * ty[None, :, None] * x_all)
    return w[model.displacement_indices()]


for label, opts in [("full", dict(x_int=164, full=True)),
                    ("9p", dict(x_int=164, full=False, n_patches=9, nx=7,
                                interp=4))]:
    model, _ = make_model(**kw, **opts)
    J = S.model_jacobian(model, columns="disp")
    di, vi = model.displacement_indices(), model.velocity_indices()
    K = J[vi, :][:, di].tocsr()
    mw = mass_weights(model)
    Ssym = sp.diags(mw) @ K
    A = (Ssym - Ssym.T).tocoo()
    scale = np.abs(Ssym).max()
    print(f"{label}: ||S-S^T||_max / ||S||_max = {np.abs(A.data).max() / scale:.3e}")
    # where are the worst asymmetries?
    comp, patch, kkk, jjj, iii = model.layout.column_meta()
    order = np.argsort(-np.abs(A.data))[:12]
    seen = set()
    for o in order:
        r, c = di[A.row[o]], di[A.col[o]]
        key = (patch[r], iii[r], patch[c], iii[c])
        if key in seen:
            continue
        seen.add(key)
        print(f"   rel {abs(A.data[o])/scale:.2e}: row p{patch[r]} c{comp[r]} "
              f"ii{iii[r]} jj{jjj[r]} kk{kkk[r]} <- col p{patch[c]} c{comp[c]} "
              f"ii{iii[c]} jj{jjj[c]} kk{kkk[c]}")
