"""Self-adjoint face weights, take 3: null-space method, exact feasibility."""
import numpy as np
from numpy.polynomial import legendre

from patchbeam import patches as P
from patchbeam import solvers as S
from scratch_check import make_model
from scratch_diag6 import kw


def build_matrices(grid, d_exact, d_soft=None, lam=1e3, rtol=1e-9):
    N, Pord = grid.n_patches, grid.interp_order
    h, dx, H = grid.patch_length, grid.micro.dx, grid.spacing
    s = (h - dx) / H
    if d_soft is None:
        d_soft = max(Pord, d_exact)
    c = Pord // 2
    nW = (N - 1) * N
    nvar = nW + (N - 1)

    def widx(i, j):
        return i * N + j

    T = np.zeros(nvar)
    for i in range(N - 1):
        lo = min(max(i - c, 0), N - 1 - Pord)
        src = np.arange(lo, lo + Pord + 1)
        T[[widx(i, j) for j in src]] = P.lagrange_weights(src.astype(float),
                                                          i + s)
    half = (N - 1) / 2

    def basis(pos, d):
        co = np.zeros(d + 1)
        co[d] = 1.0
        return legendre.legval((pos - half) / max(half, 1), co)

    def constraint_rows(d):
        rows, rhs = [], []
        for i in range(N - 1):
            a = np.zeros(nvar)
            for j in range(N):
                a[widx(i, j)] = basis(j, d)
            rows.append(a)
            rhs.append(basis(i + s, d))
        for j in range(1, N):
            a = np.zeros(nvar)
            for i in range(N - 1):
                a[widx(i, j)] = basis(i, d)
            a[nW + j - 1] = basis(N - 1, d)
            rows.append(a)
            rhs.append(basis(j - s, d))
        return np.array(rows), np.array(rhs)

    Ae = np.vstack([constraint_rows(d)[0] for d in range(d_exact + 1)])
    be = np.concatenate([constraint_rows(d)[1] for d in range(d_exact + 1)])

    # exact-feasible manifold
    xp, *_ = np.linalg.lstsq(Ae, be, rcond=None)
    feas0 = np.abs(Ae @ xp - be).max()
    U, sv, Vt = np.linalg.svd(Ae, full_matrices=True)
    rank = int(np.sum(sv > rtol * sv[0]))
    Z = Vt[rank:].T                      # null space basis

    # objective: closeness to template + soft higher degrees
    As, bs = [], []
    for d in range(d_exact + 1, d_soft + 1):
        A, b = constraint_rows(d)
        As.append(A * lam)
        bs.append(b * lam)
    As.append(np.eye(nvar))
    bs.append(T)
    As, bs = np.vstack(As), np.concatenate(bs)
    y, *_ = np.linalg.lstsq(As @ Z, bs - As @ xp, rcond=None)
    x = xp + Z @ y
    feas = np.abs(Ae @ x - be).max()

    Wr = x[:nW].reshape(N - 1, N)
    V = np.zeros((N - 1, N))
    V[:, :N - 1] = Wr[:, 1:].T
    V[:, N - 1] = x[nW:]
    return Wr, V, feas, feas0


def test(n_patches, d_exact, lam=1e3):
    model, _ = make_model(x_int=164, full=False, n_patches=n_patches, nx=7,
                          interp=4, **kw)
    Wr, V, feas, feas0 = build_matrices(model.grid, d_exact, lam=lam)
    model._wl, model._wr = V, Wr
    rhs = lambda t, y: model.rhs(t, y, check_finite=False)
    J = S.assemble_jacobian(rhs, model.n_state, plan=None, spot_check=False)
    spec = S.classify_modes(S.eigenmodes(J, S.SolverSettings(), count=20),
                            model)
    import scipy.sparse.linalg as spla
    lr = spla.eigs(J.tocsc(), k=4, which="LR", return_eigenvectors=False,
                   v0=np.random.default_rng(3).standard_normal(model.n_state))
    print(f"N={n_patches} d_exact={d_exact}: feas {feas:.1e}/{feas0:.1e} "
          f"max|w| {np.abs(Wr).max():.2f}")
    print("   z-bend:", np.round(spec.frequencies("z_bend")[:3], 4),
          "(full 0.0972 0.5865 1.5558)")
    print("   max Re(leading):", f"{spec.eigenvalues.real.max():.2e}",
          " max Re(global):", f"{lr.real.max():.2e}")


for d_exact in (2, 3, 4, 5):
    test(9, d_exact)
test(17, 4)
