"""Staggered-grid discretisation of linear viscoelasticity inside one patch.

Node families and array layout
------------------------------
Every field is stored as an array whose trailing three axes are (z, y, x);
leading axes (patch, probe batch, ...) broadcast through untouched.  With
1-based lattice planes as in the difference scheme:

===========  =======================  ==========================  =========
field        x planes                 array shape (z, y, x)       x index
===========  =======================  ==========================  =========
u            1.5, 2.5, ..., n_x+0.5   (n_z,   n_y,   n_x)         plane-1.5
v            1, 2, ..., n_x           (n_z,   n_y-1, n_x)         plane-1
w            1, 2, ..., n_x           (n_z-1, n_y,   n_x)         plane-1
sxx/syy/szz  2, 3, ..., n_x           (n_z,   n_y,   n_x-1)       plane-2
sxy          1.5, ..., n_x-0.5        (n_z,   n_y-1, n_x-1)       plane-1.5
sxz          1.5, ..., n_x-0.5        (n_z-1, n_y,   n_x-1)       plane-1.5
syz          1, 2, ..., n_x           (n_z-1, n_y-1, n_x)         plane-1
===========  =======================  ==========================  =========

u sits at x half-planes, rows (j, k) integer; v at y half-rows; w at z
half-rows.  The first/last x index of u, v, w are the patch face planes:
they carry coupling or end-condition values, not dynamics.  Dynamic planes
are x indices 1..n_x-2 for every component.

Stress-free side walls enter through ghost values: extrapolated v/w ghosts
just outside the front/back and bottom/top surfaces drive the surface rows
of the normal strains, and the shear stresses reflect antisymmetrically
across the walls (handled as a factor of two in the divergence stencil).
The shear stresses use the shear modulus mu; a Kelvin-Voigt term eta * (sum
of per-axis second differences of the velocity) adds straight to the
acceleration wherever the centred stencil fits inside the stored planes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StaggeredGrid",
    "FieldSet",
    "GhostValues",
    "StressField",
    "GridError",
    "empty_fields",
    "apply_transverse_bcs",
    "compute_stress",
    "apply_end_bcs",
    "acceleration",
    "total_energy",
]


class GridError(ValueError):
    """Invalid grid geometry or boundary-condition request."""


@dataclass(frozen=True)
class StaggeredGrid:
    """Uniform staggered micro-grid of one patch (nondimensional units)."""

    n_x: int
    n_y: int
    n_z: int
    dx: float
    dy: float
    dz: float
    origin_x: float = 0.0

    def __post_init__(self):
        for name in ("n_x", "n_y", "n_z"):
            if getattr(self, name) < 3:
                raise GridError(f"{name} must be >= 3, got {getattr(self, name)}")
        for name in ("dx", "dy", "dz"):
            if getattr(self, name) <= 0:
                raise GridError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def length(self) -> float:
        return (self.n_x - 1) * self.dx

    @property
    def width(self) -> float:
        return (self.n_y - 1) * self.dy

    @property
    def thickness(self) -> float:
        return (self.n_z - 1) * self.dz

    def x_integer(self) -> np.ndarray:
        return self.origin_x + self.dx * np.arange(self.n_x)

    def x_half(self) -> np.ndarray:
        return self.origin_x + self.dx * (np.arange(self.n_x) + 0.5)

    def y_integer(self) -> np.ndarray:
        return -self.width / 2 + self.dy * np.arange(self.n_y)

    def y_half(self) -> np.ndarray:
        return -self.width / 2 + self.dy * (np.arange(self.n_y - 1) + 0.5)

    def z_integer(self) -> np.ndarray:
        return -self.thickness / 2 + self.dz * np.arange(self.n_z)

    def z_half(self) -> np.ndarray:
        return -self.thickness / 2 + self.dz * (np.arange(self.n_z - 1) + 0.5)


@dataclass
class FieldSet:
    """A displacement or velocity triple (u, v, w) including face planes."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


@dataclass
class GhostValues:
    """Extrapolated displacement values one half-spacing outside the walls.

    v_front/v_back hold v at y rows 1/2 and n_y+1/2; w_bottom/w_top hold w
    at z rows 1/2 and n_z+1/2.  All are aligned with the normal-stress x
    planes 2..n_x.  The companion ghost shear stresses are antisymmetric
    reflections and never materialise as arrays.
    """

    v_front: np.ndarray
    v_back: np.ndarray
    w_bottom: np.ndarray
    w_top: np.ndarray


@dataclass
class StressField:
    sxx: np.ndarray
    syy: np.ndarray
    szz: np.ndarray
    sxy: np.ndarray
    sxz: np.ndarray
    syz: np.ndarray


def field_shapes(grid: StaggeredGrid):
    nx, ny, nz = grid.n_x, grid.n_y, grid.n_z
    return {
        "u": (nz, ny, nx),
        "v": (nz, ny - 1, nx),
        "w": (nz - 1, ny, nx),
    }


def empty_fields(grid: StaggeredGrid, lead=()) -> FieldSet:
    shapes = field_shapes(grid)
    return FieldSet(
        u=np.zeros(lead + shapes["u"]),
        v=np.zeros(lead + shapes["v"]),
        w=np.zeros(lead + shapes["w"]),
    )


def apply_transverse_bcs(disp: FieldSet, mat, grid: StaggeredGrid) -> GhostValues:
    """Ghost v/w planes enforcing stress-free side walls.

    Interior wall nodes zero the wall-normal stress; wall edge nodes zero
    both normal stresses, which eliminates the tangential strain term and
    changes the prefactor from lam/(lam + 2 mu) to lam/(2 (lam + mu)).
    """
    u, v, w = disp.u, disp.v, disp.w
    dx, dy, dz = grid.dx, grid.dy, grid.dz
    lam, mu = mat.lam, mat.mu

    # d_i u / dx on the normal-stress planes 2..n_x, at every (k, j)
    exx = (u[..., 1:] - u[..., :-1]) / dx

    def wall_dv(jrow):
        # jrow: 0 for the front wall y=-W/2, -1 for the back wall
        lam_r = lam[..., :, jrow, :]
        mu_r = mu[..., :, jrow, :]
        coef_int = lam_r / (2.0 * mu_r + lam_r)
        coef_edge = lam_r / (2.0 * (mu_r + lam_r))
        exx_r = exx[..., :, jrow, :]
        dzw = (w[..., 1:, jrow, 1:] - w[..., :-1, jrow, 1:]) / dz
        dv = np.empty_like(exx_r)
        dv[..., 1:-1, :] = -dy * coef_int[..., 1:-1, :] * (
            exx_r[..., 1:-1, :] + dzw
        )
        dv[..., 0, :] = -dy * coef_edge[..., 0, :] * exx_r[..., 0, :]
        dv[..., -1, :] = -dy * coef_edge[..., -1, :] * exx_r[..., -1, :]
        return dv

    def wall_dw(krow):
        lam_r = lam[..., krow, :, :]
        mu_r = mu[..., krow, :, :]
        coef_int = lam_r / (2.0 * mu_r + lam_r)
        coef_edge = lam_r / (2.0 * (mu_r + lam_r))
        exx_r = exx[..., krow, :, :]
        dyv = (v[..., krow, 1:, 1:] - v[..., krow, :-1, 1:]) / dy
        dw = np.empty_like(exx_r)
        dw[..., 1:-1, :] = -dz * coef_int[..., 1:-1, :] * (
            exx_r[..., 1:-1, :] + dyv
        )
        dw[..., 0, :] = -dz * coef_edge[..., 0, :] * exx_r[..., 0, :]
        dw[..., -1, :] = -dz * coef_edge[..., -1, :] * exx_r[..., -1, :]
        return dw

    # dv = d_j v at the wall row; ghost = inner value -/+ dv
    dv_front = wall_dv(0)
    dv_back = wall_dv(-1)
    dw_bottom = wall_dw(0)
    dw_top = wall_dw(-1)
    return GhostValues(
        v_front=v[..., :, 0, 1:] - dv_front,
        v_back=v[..., :, -1, 1:] + dv_back,
        w_bottom=w[..., 0, :, 1:] - dw_bottom,
        w_top=w[..., -1, :, 1:] + dw_top,
    )


def _normal_strains(disp: FieldSet, grid: StaggeredGrid, ghosts: GhostValues | None):
    """Centred normal strains on the integer lattice, ghost-corrected at walls.

    With ghosts=None the wall rows use zero ghost values; the physics
    pipeline always passes real ghosts.
    """
    u, v, w = disp.u, disp.v, disp.w
    dx, dy, dz = grid.dx, grid.dy, grid.dz

    exx = (u[..., 1:] - u[..., :-1]) / dx

    eyy = np.empty_like(exx)
    eyy[..., :, 1:-1, :] = (v[..., :, 1:, 1:] - v[..., :, :-1, 1:]) / dy
    gf = ghosts.v_front if ghosts is not None else 0.0
    gb = ghosts.v_back if ghosts is not None else 0.0
    eyy[..., :, 0, :] = (v[..., :, 0, 1:] - gf) / dy
    eyy[..., :, -1, :] = (gb - v[..., :, -1, 1:]) / dy

    ezz = np.empty_like(exx)
    ezz[..., 1:-1, :, :] = (w[..., 1:, :, 1:] - w[..., :-1, :, 1:]) / dz
    gb_ = ghosts.w_bottom if ghosts is not None else 0.0
    gt = ghosts.w_top if ghosts is not None else 0.0
    ezz[..., 0, :, :] = (w[..., 0, :, 1:] - gb_) / dz
    ezz[..., -1, :, :] = (gt - w[..., -1, :, 1:]) / dz
    return exx, eyy, ezz


def _shear_gammas(disp: FieldSet, grid: StaggeredGrid):
    """Engineering shear strains on the three shear lattices."""
    u, v, w = disp.u, disp.v, disp.w
    dx, dy, dz = grid.dx, grid.dy, grid.dz
    gxy = (u[..., :, 1:, :-1] - u[..., :, :-1, :-1]) / dy + (
        v[..., 1:] - v[..., :-1]
    ) / dx
    gxz = (u[..., 1:, :, :-1] - u[..., :-1, :, :-1]) / dz + (
        w[..., 1:] - w[..., :-1]
    ) / dx
    gyz = (w[..., :, 1:, :] - w[..., :, :-1, :]) / dy + (
        v[..., 1:, :, :] - v[..., :-1, :, :]
    ) / dz
    return gxy, gxz, gyz


def compute_stress(
    disp: FieldSet,
    mat,
    grid: StaggeredGrid,
    ghosts: GhostValues | None = None,
) -> StressField:
    """Stresses from centred differences of the displacements."""
    exx, eyy, ezz = _normal_strains(disp, grid, ghosts)
    gxy, gxz, gyz = _shear_gammas(disp, grid)
    lam, mu = mat.lam, mat.mu
    lam2mu = lam + 2.0 * mu
    return StressField(
        sxx=lam2mu * exx + lam * (eyy + ezz),
        syy=lam2mu * eyy + lam * (exx + ezz),
        szz=lam2mu * ezz + lam * (exx + eyy),
        sxy=mat.mu_xy * gxy,
        sxz=mat.mu_xz * gxz,
        syz=mat.mu_yz * gyz,
    )


def apply_end_bcs(
    disp: FieldSet | None,
    vel: FieldSet | None,
    stress: StressField | None,
    which: str,
) -> None:
    """Physical end conditions, in place.

    "fixed_left" zeroes the left face planes of the displacement (and
    velocity) fields; "free_right" overwrites the end stresses: the axial
    normal stress reflects antisymmetrically about the last half-plane and
    the axial shear stresses on that plane vanish.
    """
    if which == "fixed_left":
        if disp is None:
            raise GridError("fixed_left needs displacement fields")
        for fields in (disp, vel) if vel is not None else (disp,):
            fields.u[..., 0] = 0.0
            fields.v[..., 0] = 0.0
            fields.w[..., 0] = 0.0
    elif which == "free_right":
        if stress is None:
            raise GridError("free_right needs a stress field")
        stress.sxx[..., -1] = -stress.sxx[..., -2]
        stress.sxy[..., -1] = 0.0
        stress.sxz[..., -1] = 0.0
    else:
        raise GridError(f"unknown end condition {which!r}")


def _dj_wall_reflected(s, axis_interior):
    """Difference across rows of a shear stress whose ghosts reflect at walls.

    ``s`` has n-1 half rows along the differenced axis; the result has n
    rows: 2 s at the first wall, centred differences inside, -2 s at the
    second wall.
    """
    # axis_interior = -2 for y rows, -3 for z rows
    if axis_interior == -2:
        first = 2.0 * s[..., :, :1, :]
        inner = s[..., :, 1:, :] - s[..., :, :-1, :]
        last = -2.0 * s[..., :, -1:, :]
        return np.concatenate([first, inner, last], axis=-2)
    if axis_interior == -3:
        first = 2.0 * s[..., :1, :, :]
        inner = s[..., 1:, :, :] - s[..., :-1, :, :]
        last = -2.0 * s[..., -1:, :, :]
        return np.concatenate([first, inner, last], axis=-3)
    raise GridError("reflection axis must be -2 (y) or -3 (z)")


def _viscous(vel: FieldSet, grid: StaggeredGrid, eta: float):
    """eta * sum of per-axis second differences of the velocity, dynamic planes.

    An axis term is dropped wherever a centred stencil would need a value
    outside the stored planes (side walls); at patch faces the stored face
    velocities close the x stencil.
    """
    dx2, dy2, dz2 = grid.dx**2, grid.dy**2, grid.dz**2
    out = []
    for c in (vel.u, vel.v, vel.w):
        lap = (c[..., 2:] - 2.0 * c[..., 1:-1] + c[..., :-2]) / dx2
        core = c[..., 1:-1]
        t = np.zeros_like(lap)
        t[..., :, 1:-1, :] = (
            core[..., :, 2:, :] - 2.0 * core[..., :, 1:-1, :] + core[..., :, :-2, :]
        ) / dy2
        lap += t
        t = np.zeros_like(lap)
        t[..., 1:-1, :, :] = (
            core[..., 2:, :, :] - 2.0 * core[..., 1:-1, :, :] + core[..., :-2, :, :]
        ) / dz2
        lap += t
        out.append(eta * lap)
    return out


def acceleration(
    vel: FieldSet | None,
    stress: StressField,
    mat,
    grid: StaggeredGrid,
    forcing=None,
    eta: float = 0.0,
):
    """Accelerations (au, av, aw) on the dynamic planes.

    Each component is the stress divergence plus body force over the local
    density, plus the viscous velocity Laplacian.  Ghost shear stresses at
    the side walls enter as antisymmetric reflections.
    """
    if eta < 0:
        raise GridError(f"viscosity must be >= 0, got {eta}")
    dx, dy, dz = grid.dx, grid.dy, grid.dz
    sxx, syy, szz = stress.sxx, stress.syy, stress.szz
    sxy, sxz, syz = stress.sxy, stress.sxz, stress.syz

    du = (sxx[..., 1:] - sxx[..., :-1]) / dx
    du += _dj_wall_reflected(sxy[..., 1:], -2) / dy
    du += _dj_wall_reflected(sxz[..., 1:], -3) / dz

    dv = (sxy[..., 1:] - sxy[..., :-1]) / dx
    dv += (syy[..., :, 1:, :-1] - syy[..., :, :-1, :-1]) / dy
    dv += _dj_wall_reflected(syz[..., 1:-1], -3) / dz

    dw = (sxz[..., 1:] - sxz[..., :-1]) / dx
    dw += _dj_wall_reflected(syz[..., 1:-1], -2) / dy
    dw += (szz[..., 1:, :, :-1] - szz[..., :-1, :, :-1]) / dz

    if forcing is not None:
        fu, fv, fw = forcing
        if fu is not None:
            du += fu
        if fv is not None:
            dv += fv
        if fw is not None:
            dw += fw

    au = du / mat.rho_u[..., 1:-1]
    av = dv / mat.rho_v[..., 1:-1]
    aw = dw / mat.rho_w[..., 1:-1]

    if eta > 0.0:
        if vel is None:
            raise GridError("viscous term needs velocity fields")
        lu, lv, lw = _viscous(vel, grid, eta)
        au += lu
        av += lv
        aw += lw
    return au, av, aw


def _axis_weights(n: int, d: float, kind: str) -> np.ndarray:
    w = np.full(n, d)
    if kind == "trapezoid":
        w[0] = w[-1] = d / 2
    elif kind == "overhang":
        # staggered planes shifted half a spacing past the patch: the last
        # plane's cell lies outside
        w[-1] = 0.0
    elif kind != "full":
        raise GridError(f"unknown weight kind {kind}")
    return w


def _weighted_sum(arr, wz, wy, wx):
    return np.sum(arr * (wz[:, None, None] * wy[None, :, None] * wx[None, None, :]))


def total_energy(disp: FieldSet, vel: FieldSet, mat, grid: StaggeredGrid) -> float:
    """Kinetic plus strain energy with cell-volume (trapezoidal) weights.

    A second-order diagnostic: face planes on integer lattices carry half
    weights, strictly interior half-lattices carry full weights.
    """
    dx, dy, dz = grid.dx, grid.dy, grid.dz
    nx, ny, nz = grid.n_x, grid.n_y, grid.n_z

    tz = _axis_weights(nz, dz, "trapezoid")
    ty = _axis_weights(ny, dy, "trapezoid")
    tx = _axis_weights(nx, dx, "trapezoid")
    fzh = _axis_weights(nz - 1, dz, "full")
    fyh = _axis_weights(ny - 1, dy, "full")
    ux = _axis_weights(nx, dx, "overhang")
    sx = _axis_weights(nx - 1, dx, "full")        # shear/normal-stress x planes
    txs = _axis_weights(nx - 1, dx, "trapezoid")  # normal-stress planes 2..n_x

    def batched_sum(arr, wz, wy, wx):
        flat = arr.reshape((-1,) + arr.shape[-3:])
        return sum(_weighted_sum(a, wz, wy, wx) for a in flat)

    kinetic = 0.5 * (
        batched_sum(mat.rho_u * vel.u**2, tz, ty, ux)
        + batched_sum(mat.rho_v * vel.v**2, tz, fyh, tx)
        + batched_sum(mat.rho_w * vel.w**2, fzh, ty, tx)
    )

    ghosts = apply_transverse_bcs(disp, mat, grid)
    exx, eyy, ezz = _normal_strains(disp, grid, ghosts)
    gxy, gxz, gyz = _shear_gammas(disp, grid)
    lam, mu = mat.lam, mat.mu
    lam2mu = lam + 2.0 * mu
    sxx = lam2mu * exx + lam * (eyy + ezz)
    syy = lam2mu * eyy + lam * (exx + ezz)
    szz = lam2mu * ezz + lam * (exx + eyy)
    strain = 0.5 * (
        batched_sum(sxx * exx + syy * eyy + szz * ezz, tz, ty, txs)
        + batched_sum(mat.mu_xy * gxy**2, tz, fyh, sx)
        + batched_sum(mat.mu_xz * gxz**2, fzh, ty, sx)
        + batched_sum(mat.mu_yz * gyz**2, fzh, fyh, tx)
    )
    return float(kinetic + strain)
