"""Prototype: self-adjoint face-weight matrices via constrained least squares.

Unknowns: right-face weight matrix Wr[(target I), (source patch J)] for
I = 0..N-2, plus the unpaired left-face column drawing on patch N-1.
Left-face weights are the transpose: V[J, I] = Wr[I, J] (V row J = left face
of patch J), V[J, N-1] free.  Constraints: every W row reproduces
polynomials at its face target from the left-ntf lattice; every V row ditto
on the right-ntf lattice.  Objective: stay near the shifted-Lagrange
template.
"""
import numpy as np

from patchbeam import patches as P
from patchbeam import solvers as S
from scratch_check import make_model
from scratch_diag6 import kw


def symmetric_face_matrices(grid, degree=None, extend=2, rtol=1e-9):
    N, Pord = grid.n_patches, grid.interp_order
    h, dx, H = grid.patch_length, grid.micro.dx, grid.spacing
    s = (h - dx) / H  # face offset from the J=I source, index units
    if degree is None:
        degree = Pord
    c = Pord // 2

    # variable bookkeeping: Wr entries on a banded+boundary-extended mask,
    # plus the V[:, N-1] column
    mask = np.zeros((N - 1, N), dtype=bool)
    for i in range(N - 1):
        lo = max(0, i - c - extend)
        hi = min(N - 1, i + c + extend)
        # ensure at least P+1 support
        while hi - lo < Pord:
            lo = max(0, lo - 1)
            hi = min(N - 1, hi + 1)
        mask[i, lo:hi + 1] = True
    wvars = np.argwhere(mask)
    nW = len(wvars)
    vext = np.arange(1, N)  # V[J, N-1] variables
    nvar = nW + len(vext)

    windex = -np.ones((N - 1, N), dtype=int)
    for k, (i, j) in enumerate(wvars):
        windex[i, j] = k

    # template: shifted-window Lagrange, for the objective only
    T = np.zeros(nvar)
    for k, (i, j) in enumerate(wvars):
        lo = min(max(i - c, 0), N - 1 - Pord)
        src = np.arange(lo, lo + Pord + 1)
        if j in src:
            w = P.lagrange_weights(src.astype(float), i + s)
            T[k] = w[list(src).index(j)]

    # constraints
    rows = []
    rhs = []
    scale = max(N - 1, 1) / 2.0

    def basis(x, t):
        return ((x - scale) / scale) ** t

    for d in range(degree + 1):
        for i in range(N - 1):      # W row i: sources J, target i + s
            a = np.zeros(nvar)
            for j in range(N):
                k = windex[i, j]
                if k >= 0:
                    a[k] = basis(j, d)
            rows.append(a)
            rhs.append(basis(i + s, d))
        for jrow in range(1, N):    # V row j: sources I, target j - s
            a = np.zeros(nvar)
            for i in range(N - 1):
                k = windex[i, jrow]
                if k >= 0:
                    a[k] = basis(i, d)
            a[nW + jrow - 1] = basis(N - 1, d)
            rows.append(a)
            rhs.append(basis(jrow - s, d))
    A = np.array(rows)
    b = np.array(rhs)

    # minimise ||x - T|| subject to A x = b (via least-norm of the shift)
    dT = b - A @ T
    z, res, rank, sv = np.linalg.lstsq(A, dT, rcond=None)
    # verify feasibility
    feas = np.abs(A @ (T + z) - b).max()
    x = T + z
    Wr = np.zeros((N - 1, N))
    for k, (i, j) in enumerate(wvars):
        Wr[i, j] = x[k]
    V = np.zeros((N - 1, N))
    V[:, :N - 1] = Wr[:, 1:].T
    V[:, N - 1] = x[nW:]
    return Wr, V, feas


def apply_and_test(n_patches, degree):
    model, _ = make_model(x_int=164, full=False, n_patches=n_patches, nx=7,
                          interp=4, **kw)
    Wr, V, feas = symmetric_face_matrices(model.grid, degree=degree)
    print(f"N={n_patches} deg={degree}: feasibility {feas:.2e}, "
          f"row sums {np.abs(Wr.sum(1) - 1).max():.1e} "
          f"{np.abs(V.sum(1) - 1).max():.1e}, max|w| {np.abs(Wr).max():.2f}")
    model._wl, model._wr = V, Wr
    spec = S.classify_modes(
        S.eigenmodes(S.model_jacobian(model), S.SolverSettings(), count=20),
        model)
    print("   z-bend:", np.round(spec.frequencies("z_bend")[:3], 4),
          " (full: 0.0972 0.5865 1.5558)")
    print("   max |Re| of leading:", np.abs(spec.eigenvalues.real).max())
    return model


for deg in (4, 3):
    apply_and_test(9, deg)
apply_and_test(17, 4)
