"""Macroscale patch layout, inter-patch coupling, and the global RHS.

The beam (nondimensional length 1) carries N equi-sized patches whose first
and last faces coincide with the physical ends.  Patch faces that are not
physical ends receive displacement (and velocity) values interpolated from
the next-to-face planes of neighbouring patches with an order-P Lagrange
polynomial through the patch positions; the left clamp and the free right
end are imposed by the microgrid end conditions.  Full-domain mode is the
degenerate single patch spanning the whole beam.

State vector layout (frozen; file I/O and Jacobians depend on it): patches
are concatenated in order; within a patch the blocks are u, v, w
displacements then u, v, w velocities; within each block the x index runs
fastest, then y, then z.  Only dynamic planes (x indices 1..n_x-2 of each
component array) are state; face planes are derived quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import microgrid
from .microgrid import FieldSet, StaggeredGrid

__all__ = [
    "PatchGrid",
    "CouplingStencil",
    "ConfigError",
    "IntegrityError",
    "lagrange_weights",
    "build_patch_grid",
    "coupling_weights",
    "exchange_faces",
    "BeamModel",
]

_COMPONENTS = ("u", "v", "w", "du", "dv", "dw")


class ConfigError(ValueError):
    """Invalid patch-layout or scenario configuration."""


class IntegrityError(RuntimeError):
    """A state vector contains non-finite entries."""


def lagrange_weights(xs: np.ndarray, target: float) -> np.ndarray:
    """Classical Lagrange interpolation weights at ``target`` through ``xs``."""
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    w = np.empty(n)
    for j in range(n):
        others = np.delete(xs, j)
        w[j] = np.prod((target - others) / (xs[j] - others))
    return w


@dataclass(frozen=True)
class CouplingStencil:
    """Interpolation recipe for one non-physical patch face."""

    patch: int              # target patch (0-based)
    face: str               # "left" or "right"
    sources: np.ndarray     # source patch indices
    source_x: np.ndarray    # next-to-face x coordinates of the sources
    target_x: float         # face x coordinate
    weights: np.ndarray


@dataclass(frozen=True)
class PatchGrid:
    """Patch layout plus the shared per-patch micro-grid."""

    n_patches: int
    centres: np.ndarray
    spacing: float          # H; 0 in full-domain mode
    patch_length: float     # h
    micro: StaggeredGrid
    interp_order: int
    coverage: float
    full_domain: bool

    def patch_origin(self, p: int) -> float:
        return self.centres[p] - self.patch_length / 2

    def x_integer(self) -> np.ndarray:
        """(N, n_x) x coordinates of the integer planes of every patch."""
        local = self.micro.dx * np.arange(self.micro.n_x)
        return (self.centres - self.patch_length / 2)[:, None] + local[None, :]

    def x_half(self) -> np.ndarray:
        return self.x_integer() + self.micro.dx / 2

    def patch_micro(self, p: int) -> StaggeredGrid:
        m = self.micro
        return StaggeredGrid(m.n_x, m.n_y, m.n_z, m.dx, m.dy, m.dz,
                             origin_x=self.patch_origin(p))


def build_patch_grid(
    width: float,
    thickness: float,
    n_patches: int,
    n_x: int,
    n_y: int,
    n_z: int,
    dx: float,
    interp_order: int = 4,
    full_domain: bool = False,
) -> PatchGrid:
    """Lay out patches on the unit-length beam.

    ``dx`` is the micro spacing shared by patch and full-domain runs; in
    full-domain mode it must tile the beam and ``n_x`` is replaced by the
    full plane count.  Patch centres are equispaced with the first/last
    faces on the physical ends; coverage counts the (n_x - 2) interior
    intervals of each patch.
    """
    if n_patches < 1:
        raise ConfigError(f"n_patches must be >= 1, got {n_patches}")
    if interp_order < 1:
        raise ConfigError(f"interp_order must be >= 1, got {interp_order}")
    if full_domain or n_patches == 1:
        m = 1.0 / dx
        n_full = int(round(m)) + 1
        if abs(m - round(m)) > 1e-6 * m:
            raise ConfigError(
                f"dx={dx} does not tile the unit beam (1/dx = {m})"
            )
        micro = StaggeredGrid(n_full, n_y, n_z, dx, width / (n_y - 1),
                              thickness / (n_z - 1))
        return PatchGrid(
            n_patches=1,
            centres=np.array([0.5]),
            spacing=0.0,
            patch_length=1.0,
            micro=micro,
            interp_order=interp_order,
            coverage=1.0,
            full_domain=True,
        )
    if interp_order > n_patches - 1:
        raise ConfigError(
            f"interp_order={interp_order} needs at least {interp_order + 1} "
            f"patches, got {n_patches}"
        )
    h = (n_x - 1) * dx
    H = (1.0 - h) / (n_patches - 1)
    if h >= H:
        raise ConfigError(
            f"patches overlap: patch length h={h:.4g} >= spacing H={H:.4g}"
        )
    micro = StaggeredGrid(n_x, n_y, n_z, dx, width / (n_y - 1),
                          thickness / (n_z - 1))
    centres = h / 2 + H * np.arange(n_patches)
    coverage = n_patches * (n_x - 2) * dx
    return PatchGrid(
        n_patches=n_patches,
        centres=centres,
        spacing=H,
        patch_length=h,
        micro=micro,
        interp_order=interp_order,
        coverage=coverage,
        full_domain=False,
    )


def coupling_weights(grid: PatchGrid) -> list[CouplingStencil]:
    """Lagrange stencils for every non-physical patch face.

    The right face of patch I is interpolated from the left next-to-face
    planes of patches I-P/2..I+P/2 (shifted to stay inside the beam near
    the ends), and mirrored for left faces.  The u, v, w lattices share the
    weights because their abscissae differ by a common half-spacing shift.
    """
    if grid.n_patches < 2:
        return []
    N, P = grid.n_patches, grid.interp_order
    h, dx = grid.patch_length, grid.micro.dx
    stencils = []
    for target in range(N):
        lo = min(max(target - P // 2, 0), N - 1 - P)
        src = np.arange(lo, lo + P + 1)
        if target > 0:  # left face, fed by right next-to-face planes
            xs = grid.centres[src] + h / 2 - dx
            tx = grid.centres[target] - h / 2
            stencils.append(CouplingStencil(
                patch=target, face="left", sources=src, source_x=xs,
                target_x=tx, weights=lagrange_weights(xs, tx),
            ))
        if target < N - 1:  # right face, fed by left next-to-face planes
            xs = grid.centres[src] - h / 2 + dx
            tx = grid.centres[target] + h / 2
            stencils.append(CouplingStencil(
                patch=target, face="right", sources=src, source_x=xs,
                target_x=tx, weights=lagrange_weights(xs, tx),
            ))
    return stencils


def _face_matrices(grid: PatchGrid, stencils):
    """Dense (targets x N) weight matrices for the left and right faces."""
    N = grid.n_patches
    wl = np.zeros((N - 1, N))  # rows: target patches 1..N-1
    wr = np.zeros((N - 1, N))  # rows: target patches 0..N-2
    for st in stencils:
        if st.face == "left":
            wl[st.patch - 1, st.sources] = st.weights
        else:
            wr[st.patch, st.sources] = st.weights
    return wl, wr


def exchange_faces(fields: FieldSet, wl: np.ndarray, wr: np.ndarray) -> None:
    """Populate all non-physical face planes of stacked patch fields, in place.

    Arrays are (..., N, nz', ny', nx'); the patch axis is contracted against
    the face weight matrices.  Physical ends (first patch left, last patch
    right) are left untouched.
    """
    for c in (fields.u, fields.v, fields.w):
        # left faces of patches 1..N-1 from right next-to-face planes
        c[..., 1:, :, :, 0] = np.einsum("ts,...szy->...tzy", wl, c[..., :, :, :, -2])
        # right faces of patches 0..N-2 from left next-to-face planes
        c[..., :-1, :, :, -1] = np.einsum("ts,...szy->...tzy", wr, c[..., :, :, :, 1])


@dataclass
class _Layout:
    """Flat-vector bookkeeping for the frozen state ordering."""

    n_patches: int
    shapes: dict
    comp_sizes: tuple
    comp_offsets: tuple
    per_patch: int

    @classmethod
    def build(cls, grid: PatchGrid):
        m = grid.micro
        nxd = m.n_x - 2
        shapes = {
            "u": (m.n_z, m.n_y, nxd),
            "v": (m.n_z, m.n_y - 1, nxd),
            "w": (m.n_z - 1, m.n_y, nxd),
        }
        sizes = tuple(int(np.prod(shapes[c[-1]])) for c in _COMPONENTS)
        offsets = tuple(int(s) for s in np.concatenate([[0], np.cumsum(sizes)[:-1]]))
        return cls(
            n_patches=grid.n_patches,
            shapes=shapes,
            comp_sizes=sizes,
            comp_offsets=offsets,
            per_patch=int(sum(sizes)),
        )

    @property
    def n_state(self) -> int:
        return self.n_patches * self.per_patch

    def views(self, y: np.ndarray):
        """Zero-copy (..., N, nz', ny', nx-2) views of the six blocks."""
        lead = y.shape[:-1]
        Y = y.reshape(lead + (self.n_patches, self.per_patch))
        out = []
        for comp, off, size in zip(_COMPONENTS, self.comp_offsets, self.comp_sizes):
            shape = self.shapes[comp[-1]]
            out.append(Y[..., off:off + size].reshape(lead + (self.n_patches,) + shape))
        return out

    def flat_index(self, comp: str, patch: int, kk: int, jj: int, ii: int) -> int:
        ci = _COMPONENTS.index(comp)
        nz, ny, nx = self.shapes[comp[-1]]
        return (patch * self.per_patch + self.comp_offsets[ci]
                + (kk * ny + jj) * nx + ii)

    def column_meta(self):
        """Per-flat-index (comp, patch, kk, jj, ii) arrays."""
        n = self.n_state
        comp = np.empty(n, dtype=np.int8)
        patch = np.empty(n, dtype=np.int32)
        kk = np.empty(n, dtype=np.int32)
        jj = np.empty(n, dtype=np.int32)
        ii = np.empty(n, dtype=np.int32)
        for p in range(self.n_patches):
            base = p * self.per_patch
            for ci, (c, off, size) in enumerate(
                zip(_COMPONENTS, self.comp_offsets, self.comp_sizes)
            ):
                sl = slice(base + off, base + off + size)
                nz, ny, nx = self.shapes[c[-1]]
                kg, jg, ig = np.indices((nz, ny, nx))
                comp[sl] = ci
                patch[sl] = p
                kk[sl] = kg.ravel()
                jj[sl] = jg.ravel()
                ii[sl] = ig.ravel()
        return comp, patch, kk, jj, ii


class BeamModel:
    """Global time-derivative function of one scenario configuration.

    Bundles the patch layout, realised material field, damping strength,
    optional static tip load, and the frozen state layout.  ``rhs`` accepts
    a flat state with arbitrary leading batch axes, which column-probing
    Jacobian assembly exploits.
    """

    def __init__(self, grid: PatchGrid, mat, eta: float = 0.0,
                 tip_load: float = 0.0):
        if eta < 0:
            raise ConfigError(f"eta must be >= 0, got {eta}")
        self.grid = grid
        self.mat = mat
        self.eta = float(eta)
        self.tip_load = float(tip_load)
        self.stencils = coupling_weights(grid)
        if grid.n_patches > 1:
            self._wl, self._wr = _face_matrices(grid, self.stencils)
        else:
            self._wl = self._wr = None
        self.layout = _Layout.build(grid)
        self._forcing = self._build_forcing()

    # -- layout helpers -------------------------------------------------

    @property
    def n_state(self) -> int:
        return self.layout.n_state

    @property
    def n_disp(self) -> int:
        return self.layout.n_state // 2

    def zero_state(self) -> np.ndarray:
        return np.zeros(self.n_state)

    def displacement_indices(self) -> np.ndarray:
        half = self.layout.per_patch // 2
        idx = [np.arange(p * self.layout.per_patch,
                         p * self.layout.per_patch + half)
               for p in range(self.grid.n_patches)]
        return np.concatenate(idx)

    def velocity_indices(self) -> np.ndarray:
        return self.displacement_indices() + self.layout.per_patch // 2

    def x_dynamic(self, comp: str) -> np.ndarray:
        """(N, n_x-2) x coordinates of the dynamic planes of a component."""
        base = self.grid.x_integer()[:, 1:-1]
        if comp in ("u", "du"):
            return base + self.grid.micro.dx / 2
        return base

    # -- forcing ---------------------------------------------------------

    def _build_forcing(self):
        if self.tip_load == 0.0:
            return None
        m = self.grid.micro
        area = m.width * m.thickness
        density = self.tip_load / (area * m.dx)
        fw = np.zeros((self.grid.n_patches,) + self.layout.shapes["w"])
        # spread over the last dynamic plane of the last patch, downward
        fw[-1, :, :, -1] = -density
        return (None, None, fw)

    # -- the global derivative -------------------------------------------

    def _work_fields(self, ud, vd, wd):
        lead = ud.shape[:-4]
        m = self.grid.micro
        N = self.grid.n_patches
        U = np.zeros(lead + (N, m.n_z, m.n_y, m.n_x))
        V = np.zeros(lead + (N, m.n_z, m.n_y - 1, m.n_x))
        W = np.zeros(lead + (N, m.n_z - 1, m.n_y, m.n_x))
        U[..., 1:-1] = ud
        V[..., 1:-1] = vd
        W[..., 1:-1] = wd
        return FieldSet(u=U, v=V, w=W)

    def _fill_faces(self, fields: FieldSet) -> None:
        if self._wl is not None:
            exchange_faces(fields, self._wl, self._wr)
        # left end clamp
        first = FieldSet(u=fields.u[..., 0, :, :, :],
                         v=fields.v[..., 0, :, :, :],
                         w=fields.w[..., 0, :, :, :])
        microgrid.apply_end_bcs(first, None, None, "fixed_left")
        # free right end: stress conditions close the dynamics, so the face
        # planes only need finite values; linear extrapolation makes the
        # viscous x stencil vanish at the last dynamic node
        for c in (fields.u, fields.v, fields.w):
            c[..., -1, :, :, -1] = (2.0 * c[..., -1, :, :, -2]
                                    - c[..., -1, :, :, -3])

    def fields_with_faces(self, y: np.ndarray):
        """(displacement, velocity) FieldSets with all face planes populated."""
        ud, vd, wd, dud, dvd, dwd = self.layout.views(np.asarray(y, dtype=float))
        disp = self._work_fields(ud, vd, wd)
        self._fill_faces(disp)
        vel = self._work_fields(dud, dvd, dwd)
        self._fill_faces(vel)
        return disp, vel

    def _check_finite(self, y: np.ndarray) -> None:
        if np.isfinite(y).all():
            return
        flat = np.asarray(y).reshape(-1, self.n_state)
        row, col = np.argwhere(~np.isfinite(flat))[0]
        comp, patch, kk, jj, ii = self.layout.column_meta()
        raise IntegrityError(
            f"non-finite state entry at component "
            f"{_COMPONENTS[comp[col]]}, patch {patch[col]}, "
            f"z row {kk[col]}, y row {jj[col]}, x plane {ii[col]}"
        )

    def rhs(self, t: float, y: np.ndarray, check_finite: bool = True) -> np.ndarray:
        """d(state)/dt; pure in (t, y), leading batch axes broadcast."""
        y = np.asarray(y, dtype=float)
        if check_finite:
            self._check_finite(y)
        ud, vd, wd, dud, dvd, dwd = self.layout.views(y)
        m = self.grid.micro

        disp = self._work_fields(ud, vd, wd)
        self._fill_faces(disp)
        if self.eta > 0.0:
            vel = self._work_fields(dud, dvd, dwd)
            self._fill_faces(vel)
        else:
            vel = None

        ghosts = microgrid.apply_transverse_bcs(disp, self.mat, m)
        stress = microgrid.compute_stress(disp, self.mat, m, ghosts)
        last = self.grid.n_patches - 1
        end_view = microgrid.StressField(
            sxx=stress.sxx[..., last, :, :, :],
            syy=stress.syy[..., last, :, :, :],
            szz=stress.szz[..., last, :, :, :],
            sxy=stress.sxy[..., last, :, :, :],
            sxz=stress.sxz[..., last, :, :, :],
            syz=stress.syz[..., last, :, :, :],
        )
        microgrid.apply_end_bcs(None, None, end_view, "free_right")

        au, av, aw = microgrid.acceleration(
            vel, stress, self.mat, m, forcing=self._forcing, eta=self.eta
        )

        out = np.empty_like(y)
        o_ud, o_vd, o_wd, o_au, o_av, o_aw = self.layout.views(out)
        o_ud[...] = dud
        o_vd[...] = dvd
        o_wd[...] = dwd
        o_au[...] = au
        o_av[...] = av
        o_aw[...] = aw
        return out

    # -- observables -----------------------------------------------------

    def tip_index(self, comp: str) -> int:
        """Flat index of the dynamic node nearest the free-end centreline."""
        m = self.grid.micro
        last = self.grid.n_patches - 1
        nxd = m.n_x - 2
        if comp in ("u", "du"):
            kk, jj = (m.n_z - 1) // 2, (m.n_y - 1) // 2
        elif comp in ("v", "dv"):
            kk, jj = (m.n_z - 1) // 2, (m.n_y - 2) // 2
        else:
            kk, jj = (m.n_z - 2) // 2, (m.n_y - 1) // 2
        return self.layout.flat_index(comp, last, kk, jj, nxd - 1)

    def centreline(self):
        """Interior integer-plane centreline sample points.

        Returns (patch index, x, u index pair, v index, w index) arrays; u is
        reported as the average of the two half-planes flanking each integer
        plane, v and w at the nearest staggered node to the centre.
        """
        m = self.grid.micro
        nxd = m.n_x - 2
        kk_u, jj_u = (m.n_z - 1) // 2, (m.n_y - 1) // 2
        kk_v, jj_v = (m.n_z - 1) // 2, (m.n_y - 2) // 2
        kk_w, jj_w = (m.n_z - 2) // 2, (m.n_y - 1) // 2
        patches, xs = [], []
        iu0, iu1, iv, iw = [], [], [], []
        x_int = self.grid.x_integer()
        for p in range(self.grid.n_patches):
            for ii in range(nxd):
                patches.append(p)
                xs.append(x_int[p, ii + 1])
                # u planes ii and ii+1 flank integer plane ii+1; dynamic u
                # indices shift by one, the left flank of the first interior
                # plane is the face (skipped: use one-sided there)
                iu0.append(self.layout.flat_index("u", p, kk_u, jj_u, max(ii - 1, 0)))
                iu1.append(self.layout.flat_index("u", p, kk_u, jj_u, min(ii, nxd - 1)))
                iv.append(self.layout.flat_index("v", p, kk_v, jj_v, ii))
                iw.append(self.layout.flat_index("w", p, kk_w, jj_w, ii))
        return (np.array(patches), np.array(xs), np.array(iu0), np.array(iu1),
                np.array(iv), np.array(iw))

    def total_energy(self, y: np.ndarray) -> float:
        disp, vel = self.fields_with_faces(y)
        return microgrid.total_energy(disp, vel, self.mat, self.grid.micro)

    # -- structure for Jacobian colouring ---------------------------------

    def coloring_plan(self, columns: np.ndarray | None = None):
        """Groups of mutually independent columns plus a support predicate.

        Columns in one group have disjoint influence footprints, so a single
        probe evaluation recovers each column exactly; the footprint
        predicate assigns response rows back to columns, and assembly errors
        out if a response escapes every footprint.  The stencil reach is at
        most 3 x planes and 2 cross rows within a patch, and interpolation
        carries next-to-face planes onto the face-adjacent planes of the
        patches whose stencil window contains the source patch.
        """
        comp, patch, kk, jj, ii = self.layout.column_meta()
        nxd = self.grid.micro.n_x - 2
        N = self.grid.n_patches
        P = self.grid.interp_order
        n = self.n_state
        cols = np.arange(n) if columns is None else np.asarray(columns)

        # feeds[side][p, q]: next-to-face plane of patch p enters a face of q
        feeds_right = np.zeros((N, N), dtype=bool)
        feeds_left = np.zeros((N, N), dtype=bool)
        for st in self.stencils:
            if st.face == "right":
                feeds_right[st.sources, st.patch] = True
            else:
                feeds_left[st.sources, st.patch] = True

        is_left_src = (N > 1) & (ii == 0)
        is_right_src = (N > 1) & (ii == nxd - 1)
        groups: dict = {}
        for c in cols:
            key = (int(comp[c]), int(ii[c] % 7), int(jj[c] % 5), int(kk[c] % 5))
            if is_left_src[c] or is_right_src[c]:
                # sources of nearby patches may feed one face: keep them apart
                key = key + ("s", int(patch[c] % (P + 1)), int(ii[c]))
            groups.setdefault(key, []).append(c)
        meta = (comp, patch, kk, jj, ii)

        def support(col, rows):
            """Boolean mask of rows possibly influenced by column ``col``."""
            same = patch[rows] == patch[col]
            near_jk = (np.abs(jj[rows] - jj[col]) <= 2) & (
                np.abs(kk[rows] - kk[col]) <= 2
            )
            mask = same & near_jk & (np.abs(ii[rows] - ii[col]) <= 3)
            if is_left_src[col]:
                # fed into right faces: rows next to the target's right face
                mask |= feeds_right[patch[col]][patch[rows]] & near_jk & (
                    ii[rows] >= nxd - 2
                )
            if is_right_src[col]:
                mask |= feeds_left[patch[col]][patch[rows]] & near_jk & (
                    ii[rows] <= 1
                )
            return mask

        return [np.array(g) for g in groups.values()], support, meta
