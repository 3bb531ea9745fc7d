"""Confirm hypothesis: symmetrize M K and see if 9p bending modes snap back."""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from patchbeam import solvers as S
from scratch_check import make_model
from scratch_diag6 import mass_weights, kw


def freqs_from_K(K, mw, count=8):
    """Eigenfrequencies of M^-1 S with S = sym(M K); K = accel wrt disp."""
    Ssym = sp.diags(mw) @ K
    Ssym = (Ssym + Ssym.T) / 2
    Keff = sp.diags(1.0 / mw) @ Ssym
    vals = spla.eigs(Keff.tocsc(), k=count, sigma=0.0, which="LM",
                     return_eigenvectors=False,
                     v0=np.random.default_rng(5).standard_normal(K.shape[0]))
    om = np.sqrt(np.abs(vals.real))
    return np.sort(om)


for label, opts in [("full", dict(x_int=164, full=True)),
                    ("9p", dict(x_int=164, full=False, n_patches=9, nx=7,
                                interp=4))]:
    model, _ = make_model(**kw, **opts)
    J = S.model_jacobian(model, columns="disp")
    di, vi = model.displacement_indices(), model.velocity_indices()
    K = J[vi, :][:, di].tocsr()
    mw = mass_weights(model)
    om = freqs_from_K(K, mw)
    print(f"{label} symmetrized frequencies: {np.round(om, 5)}")
