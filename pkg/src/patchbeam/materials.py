"""Graded material properties of metal/ceramic composite beams.

Constituent properties are blended through two mixing rules: a linear rule
for density and Poisson ratio, and a semi-empirical rule (with a calibration
pressure ``q``) for the Young's modulus.  A grading specification describes
how the metal volume fraction varies over the beam: uniform, stacked layers
through the thickness, a power law along the axis, or the axial law with a
random node-by-node perturbation of the modulus.

All sampling is deterministic: the random grading draws one uniform number
per staggered node from a seeded PCG64 generator in a fixed canonical order,
so a given seed reproduces bit-identical fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConstituentProps",
    "GradingSpec",
    "MaterialField",
    "NonDimScales",
    "MaterialError",
    "mix_density_poisson",
    "mix_young_semi_empirical",
    "lame_from_young_poisson",
    "axial_metal_fraction",
    "metal_fraction",
    "sample_material",
    "build_material_field",
    "build_nondim_scales",
]

GRADING_KINDS = ("homogeneous", "layered", "axial", "axial_random")

# Interface ties and containment checks tolerate this much relative slack.
_REL_EPS = 1e-12


class MaterialError(ValueError):
    """Invalid material data or sampling outside the beam."""


@dataclass(frozen=True)
class ConstituentProps:
    """One pure constituent: Young's modulus [Pa], density [kg/m^3], Poisson ratio."""

    young_modulus: float
    density: float
    poisson_ratio: float

    def __post_init__(self):
        if self.young_modulus <= 0:
            raise MaterialError(f"young_modulus must be > 0, got {self.young_modulus}")
        if self.density <= 0:
            raise MaterialError(f"density must be > 0, got {self.density}")
        if not 0 < self.poisson_ratio < 0.5:
            raise MaterialError(
                f"poisson_ratio must lie in (0, 0.5), got {self.poisson_ratio}"
            )


@dataclass(frozen=True)
class GradingSpec:
    """How the metal volume fraction varies over the beam.

    kind:
        "homogeneous"  -- uniform ``metal_fraction`` everywhere;
        "layered"      -- stacked layers through the thickness, listed bottom
                          (z = -T/2) to top, each (thickness [m], metal fraction);
        "axial"        -- V_m(x) = 0.2 (2 - (x/L)^a) along the axis;
        "axial_random" -- axial law with the Young's modulus multiplied by
                          (1 + alpha U[-1,1]) independently at every staggered node.
    q_parameter:
        Calibration pressure [Pa] of the semi-empirical Young's-modulus rule.
    """

    kind: str
    q_parameter: float
    layers: tuple = ()
    exponent_a: float = 1.0
    perturbation_alpha: float = 0.1
    seed: int = 0
    metal_fraction: float = 1.0

    def __post_init__(self):
        if self.kind not in GRADING_KINDS:
            raise MaterialError(f"unknown grading kind {self.kind!r}")
        if self.q_parameter <= 0:
            raise MaterialError(f"q_parameter must be > 0, got {self.q_parameter}")
        if self.kind == "layered":
            if not self.layers:
                raise MaterialError("layered grading requires at least one layer")
            for i, (th, vm) in enumerate(self.layers):
                if th <= 0:
                    raise MaterialError(f"layers[{i}].thickness must be > 0, got {th}")
                if not 0 <= vm <= 1:
                    raise MaterialError(
                        f"layers[{i}].metal_fraction must lie in [0, 1], got {vm}"
                    )
        if self.kind in ("axial", "axial_random") and self.exponent_a <= 0:
            raise MaterialError(f"exponent_a must be > 0, got {self.exponent_a}")
        if self.kind == "axial_random" and not 0 <= self.perturbation_alpha < 1:
            raise MaterialError(
                f"perturbation_alpha must lie in [0, 1), got {self.perturbation_alpha}"
            )
        if self.kind == "homogeneous" and not 0 <= self.metal_fraction <= 1:
            raise MaterialError(
                f"metal_fraction must lie in [0, 1], got {self.metal_fraction}"
            )

    def total_layer_thickness(self) -> float:
        return float(sum(th for th, _ in self.layers))


@dataclass
class MaterialField:
    """Nondimensional Lame constants and density on every staggered lattice.

    Arrays are stacked over patches.  ``lam``/``mu`` live on the integer
    lattice where normal stresses are evaluated (x planes 2..n_x), the
    ``mu_*`` arrays on the three shear lattices, and ``rho_*`` on the three
    displacement lattices (including face planes).
    """

    lam: np.ndarray
    mu: np.ndarray
    mu_xy: np.ndarray
    mu_xz: np.ndarray
    mu_yz: np.ndarray
    rho_u: np.ndarray
    rho_v: np.ndarray
    rho_w: np.ndarray

    def __post_init__(self):
        for name in ("lam", "mu", "mu_xy", "mu_xz", "mu_yz", "rho_u", "rho_v", "rho_w"):
            arr = getattr(self, name)
            if not np.all(arr > 0):
                raise MaterialError(f"material field {name} has non-positive entries")


@dataclass(frozen=True)
class NonDimScales:
    """Characteristic scales used to nondimensionalise the beam equations."""

    L0: float
    t0: float
    sigma0: float
    f0: float
    E_ref: float
    rho_ref: float


def mix_density_poisson(vm, metal: ConstituentProps, ceramic: ConstituentProps):
    """Linear mixing of density and Poisson ratio at metal fraction ``vm``."""
    vm = np.asarray(vm, dtype=float)
    if np.any(vm < 0) or np.any(vm > 1):
        raise MaterialError(f"metal fraction outside [0, 1]: {vm}")
    vc = 1.0 - vm
    rho = metal.density * vm + ceramic.density * vc
    nu = metal.poisson_ratio * vm + ceramic.poisson_ratio * vc
    return rho, nu


def mix_young_semi_empirical(vm, em, ec, q):
    """Semi-empirical Young's modulus of the mixture.

    The metal term is weighted by (q + Ec)/(q + Em), which captures the
    observed load transfer between the phases; the rule reduces to the pure
    constituents at the endpoints.
    """
    vm = np.asarray(vm, dtype=float)
    if np.any(vm < 0) or np.any(vm > 1):
        raise MaterialError(f"metal fraction outside [0, 1]: {vm}")
    if em <= 0 or ec <= 0 or q <= 0:
        raise MaterialError(f"moduli and q must be > 0, got Em={em}, Ec={ec}, q={q}")
    vc = 1.0 - vm
    c = (q + ec) / (q + em)
    return (vm * em * c + vc * ec) / (vm * c + vc)


def lame_from_young_poisson(e, nu):
    """Standard isotropic conversion (E, nu) -> (lambda, mu)."""
    e = np.asarray(e, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.any(e <= 0):
        raise MaterialError("Young's modulus must be > 0")
    if np.any(nu >= 0.5) or np.any(nu < 0):
        raise MaterialError(f"Poisson ratio must lie in [0, 0.5), got {nu}")
    mu = e / (2.0 * (1.0 + nu))
    lam = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    return lam, mu


def axial_metal_fraction(x, a):
    """Axial grading law V_m = 0.2 (2 - x^a) on the unit interval."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -_REL_EPS) or np.any(x > 1 + _REL_EPS):
        raise MaterialError(f"axial position outside [0, 1]: {x}")
    if a <= 0:
        raise MaterialError(f"exponent must be > 0, got {a}")
    return 0.2 * (2.0 - np.clip(x, 0.0, 1.0) ** a)


def _layer_fractions(grading: GradingSpec, z, thickness: float):
    """Metal fraction of the layer containing each z in [-T/2, T/2].

    Nodes sitting exactly on a layer interface belong to the layer above;
    the comparison carries a small relative slack so grid nodes generated by
    equivalent arithmetic land on the intended side.
    """
    z = np.asarray(z, dtype=float)
    ths = np.array([th for th, _ in grading.layers])
    vms = np.array([vm for _, vm in grading.layers])
    bounds = -thickness / 2.0 + np.cumsum(ths)[:-1]
    idx = np.searchsorted(bounds, z + _REL_EPS * thickness, side="right")
    return vms[idx]


def metal_fraction(grading: GradingSpec, x, z, length: float, thickness: float):
    """Metal volume fraction at physical (x, z); y never enters the grading."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(x.shape, z.shape)
    if grading.kind == "homogeneous":
        return np.full(shape, grading.metal_fraction)
    if grading.kind == "layered":
        vm = _layer_fractions(grading, z, thickness)
    else:
        # axial and axial_random share the deterministic law
        vm = axial_metal_fraction(x / length, grading.exponent_a)
    return np.broadcast_to(vm, shape).copy()


def _check_inside(point, length, width, thickness):
    x, y, z = point
    tol = _REL_EPS * max(length, width, thickness)
    if not (-tol <= x <= length + tol):
        raise MaterialError(f"x={x} outside beam [0, {length}]")
    if not (-width / 2 - tol <= y <= width / 2 + tol):
        raise MaterialError(f"y={y} outside beam [{-width / 2}, {width / 2}]")
    if not (-thickness / 2 - tol <= z <= thickness / 2 + tol):
        raise MaterialError(f"z={z} outside beam [{-thickness / 2}, {thickness / 2}]")


def sample_material(
    grading: GradingSpec,
    metal: ConstituentProps,
    ceramic: ConstituentProps,
    point,
    geometry,
    rng: np.random.Generator | None = None,
):
    """Dimensional (lambda, mu, rho) at one physical point.

    ``geometry`` is (length, width, thickness).  For the random grading one
    uniform draw is taken from ``rng``; field construction uses the
    vectorised :func:`build_material_field` instead so that draws follow the
    canonical node order.
    """
    length, width, thickness = geometry
    _check_inside(point, length, width, thickness)
    x, _, z = point
    vm = metal_fraction(grading, x, z, length, thickness)
    rho, nu = mix_density_poisson(vm, metal, ceramic)
    e = mix_young_semi_empirical(
        vm, metal.young_modulus, ceramic.young_modulus, grading.q_parameter
    )
    if grading.kind == "axial_random":
        if grading.perturbation_alpha > 0:
            if rng is None:
                raise MaterialError("axial_random sampling needs an rng stream")
            e = e * (1.0 + grading.perturbation_alpha * rng.uniform(-1.0, 1.0))
    lam, mu = lame_from_young_poisson(e, nu)
    return lam, mu, rho


def _constituents_present(grading: GradingSpec):
    """(metal_present, ceramic_present) under the grading's fraction range."""
    if grading.kind == "homogeneous":
        vms = [grading.metal_fraction]
    elif grading.kind == "layered":
        vms = [vm for _, vm in grading.layers]
    else:
        # axial law ranges over [0.2, 0.4]: both constituents always present
        vms = [0.2, 0.4]
    return any(v > 0 for v in vms), any(v < 1 for v in vms)


def build_nondim_scales(geometry, grading: GradingSpec, metal: ConstituentProps,
                        ceramic: ConstituentProps) -> NonDimScales:
    """Reference scales: length L, time L/sqrt(E_ref/rho_ref), stress, force density.

    E_ref and rho_ref are the maxima over the constituents actually present
    in the grading (the pure-ceramic values as soon as any mixing occurs);
    this is the normalisation under which the reported nondimensional
    frequencies and periods of the graded beams are mutually consistent.
    The random perturbation does not move the reference values.
    """
    length = geometry[0]
    has_metal, has_ceramic = _constituents_present(grading)
    es, rhos = [], []
    if has_metal:
        es.append(metal.young_modulus)
        rhos.append(metal.density)
    if has_ceramic:
        es.append(ceramic.young_modulus)
        rhos.append(ceramic.density)
    e_ref = max(es)
    rho_ref = max(rhos)
    t0 = length / np.sqrt(e_ref / rho_ref)
    sigma0 = length**2 * rho_ref / t0**2
    f0 = length * rho_ref / t0**2
    return NonDimScales(L0=length, t0=t0, sigma0=sigma0, f0=f0,
                        E_ref=e_ref, rho_ref=rho_ref)


def _mix_arrays(grading, metal, ceramic, x, z, length, thickness, draws=None):
    """Vectorised mixing chain for one staggered lattice -> (lam, mu, rho)."""
    vm = metal_fraction(grading, x, z, length, thickness)
    rho, nu = mix_density_poisson(vm, metal, ceramic)
    e = mix_young_semi_empirical(
        vm, metal.young_modulus, ceramic.young_modulus, grading.q_parameter
    )
    if draws is not None:
        e = e * (1.0 + grading.perturbation_alpha * draws)
    lam, mu = lame_from_young_poisson(e, nu)
    return lam, mu, rho


def build_material_field(
    grading: GradingSpec,
    metal: ConstituentProps,
    ceramic: ConstituentProps,
    patch_grid,
    scales: NonDimScales,
) -> MaterialField:
    """Realise the grading on every staggered lattice of every patch.

    Grading functions are sampled directly at each node's physical
    coordinates (no averaging between neighbours).  Outputs are
    nondimensional: lam, mu by E_ref and rho by rho_ref.
    """
    L0 = scales.L0
    micro = patch_grid.micro
    # physical coordinates, metres: x varies per patch, y and z are shared
    x_int = patch_grid.x_integer() * L0          # (N, n_x)
    x_half = patch_grid.x_half() * L0            # (N, n_x), u planes i+1/2
    y_int = micro.y_integer() * L0
    y_half = micro.y_half() * L0
    z_int = micro.z_integer() * L0
    z_half = micro.z_half() * L0
    length = L0
    thickness = micro.thickness * L0

    def lattice(xs, ys, zs):
        shape = (xs.shape[0], len(zs), len(ys), xs.shape[1])
        x = np.broadcast_to(xs[:, None, None, :], shape)
        z = np.broadcast_to(zs[None, :, None, None], shape)
        return x, z

    rng = np.random.default_rng(np.random.PCG64(grading.seed))
    random = grading.kind == "axial_random" and grading.perturbation_alpha > 0

    def draws_like(x):
        # one independent draw per node, canonical order: lattice by lattice,
        # C-order within each lattice
        return rng.uniform(-1.0, 1.0, size=x.shape) if random else None

    # integer lattice at the normal-stress planes 2..n_x
    xg, zg = lattice(x_int[:, 1:], y_int, z_int)
    lam, mu, _ = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness,
                             draws_like(xg))

    xg, zg = lattice(x_half[:, :-1], y_half, z_int)
    _, mu_xy, _ = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness,
                              draws_like(xg))

    xg, zg = lattice(x_half[:, :-1], y_int, z_half)
    _, mu_xz, _ = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness,
                              draws_like(xg))

    xg, zg = lattice(x_int, y_half, z_half)
    _, mu_yz, _ = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness,
                              draws_like(xg))

    # densities on the displacement lattices need no draws
    xg, zg = lattice(x_half, y_int, z_int)
    _, _, rho_u = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness)
    xg, zg = lattice(x_int, y_half, z_int)
    _, _, rho_v = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness)
    xg, zg = lattice(x_int, y_int, z_half)
    _, _, rho_w = _mix_arrays(grading, metal, ceramic, xg, zg, length, thickness)

    e_ref, rho_ref = scales.E_ref, scales.rho_ref
    return MaterialField(
        lam=lam / e_ref,
        mu=mu / e_ref,
        mu_xy=mu_xy / e_ref,
        mu_xz=mu_xz / e_ref,
        mu_yz=mu_yz / e_ref,
        rho_u=rho_u / rho_ref,
        rho_v=rho_v / rho_ref,
        rho_w=rho_w / rho_ref,
    )
