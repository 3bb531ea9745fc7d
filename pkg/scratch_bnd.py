"""Boundary-face stencil variants (library only)."""
import numpy as np

from patchbeam import patches as P


def face_matrices(grid, variant):
    N, Pord = grid.n_patches, grid.interp_order
    h, dx = grid.patch_length, grid.micro.dx
    c = Pord // 2
    wl = np.zeros((N - 1, N))
    wr = np.zeros((N - 1, N))

    def window(target, q):
        lo = min(max(target - q, 0), N - 1 - 2 * q)
        return np.arange(lo, lo + 2 * q + 1)

    for t in range(N):
        dist = min(t, N - 1 - t)
        if variant == "slide":
            q = c
        elif variant == "centered":
            q = min(c, dist)
        elif variant == "shrink1":
            q = min(c, dist + 1)
        else:
            raise ValueError(variant)
        src = window(t, q)
        if t > 0:
            xs = grid.centres[src] + h / 2 - dx
            tx = grid.centres[t] - h / 2
            wl[t - 1, src] = P.lagrange_weights(xs, tx)
        if t < N - 1:
            xs = grid.centres[src] - h / 2 + dx
            tx = grid.centres[t] + h / 2
            wr[t, src] = P.lagrange_weights(xs, tx)
    return wl, wr


def _stiff(model, J):
    di, vi = model.displacement_indices(), model.velocity_indices()
    return J[vi, :][:, di].tocsc()
