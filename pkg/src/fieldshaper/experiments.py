"""The two canonical designs (cloak, bender) plus pullback and convergence checks.

Default geometry choices (domain size, cloak placement, grading) are design
decisions recorded here; the base material is the normalized unit medium.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NonArrivalError, ValidationError
from .materials import (
    Annulus,
    Disk,
    ParameterField,
    ParameterSample,
    Rect,
    homogeneous_params,
    piecewise_params,
)
from .meshing import Mesh, build_annular_sector_mesh, build_cartesian_mesh
from .metrics import arrival_spread, contour_straightness, exterior_mismatch, region_max_abs
from .oracles import rod_steady, solve_rod_1d
from .solver import (
    Dirichlet,
    FieldSolution,
    Neumann,
    assemble_system,
    run_transient,
    solve_steady,
)
from .transforms import (
    BenderSpec,
    CloakSpec,
    Mapping,
    bender_derived_rule,
    bender_paper_rule,
    cloak_rule,
    push_forward_arrays,
)

CLOAK_VARIANTS = ("original", "blanket", "cloaked")
BENDER_VARIANTS = ("homogeneous-arc", "eq8-derived", "eq11-paper")


@dataclass
class ExperimentReport:
    scenario: str
    metrics: dict
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "metrics": self.metrics,
            "provenance": self.provenance,
        }


# ---------------------------------------------------------------------------
# Cloak


@dataclass
class CloakScenario:
    """Rectangle with a source strip (area I) feeding a source-free area II.

    The cloak annulus sits well inside area II; the outer boundary is held
    at u = 0 and the unit decay rate keeps the steady state well defined.
    """

    domain: tuple = (0.0, 8.0, 0.0, 4.0)
    nx: int = 192
    ny: int = 96
    source_x_max: float = 1.0
    f_source: float = 1.0
    center: tuple = (5.0, 2.0)
    a: float = 0.6
    b: float = 1.2
    epsilon: float = 1e-3
    rho: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    blanket_alpha: float = 1e-6
    t_end: float = 1.0
    dt: float = 0.01
    material_subdivision: int = 4

    def __post_init__(self):
        x0, x1, y0, y1 = self.domain
        cx, cy = self.center
        margin = min(cx - x0, x1 - cx, cy - y0, y1 - cy)
        if not (0 < self.a < self.b):
            raise ValidationError("need 0 < a < b")
        if self.b >= margin or cx - self.b <= self.source_x_max:
            raise ValidationError("cloak disk must lie strictly inside area II")

    @property
    def spec(self) -> CloakSpec:
        return CloakSpec(center=self.center, a=self.a, b=self.b, epsilon=self.epsilon)

    @property
    def base(self) -> ParameterSample:
        return ParameterSample.isotropic(self.rho, self.alpha, self.beta, 0.0)

    def mesh(self) -> Mesh:
        x0, x1, y0, y1 = self.domain
        return build_cartesian_mesh((x0, x1), (y0, y1), self.nx, self.ny)

    def material(self, variant: str, epsilon: float = None) -> ParameterField:
        x0, x1, y0, y1 = self.domain
        source = ParameterSample.isotropic(self.rho, self.alpha, self.beta, self.f_source)
        strip = Rect(x0, self.source_x_max, y0, y1)
        annulus = Annulus(*self.center, self.a, self.b)
        entries = [(strip, source)]
        if variant == "blanket":
            entries.insert(
                0,
                (annulus, ParameterSample.isotropic(self.rho, self.blanket_alpha, self.beta, 0.0)),
            )
        elif variant == "cloaked":
            spec = self.spec if epsilon is None else CloakSpec(
                center=self.center, a=self.a, b=self.b, epsilon=epsilon
            )
            entries.insert(0, (annulus, cloak_rule(spec, self.base)))
        elif variant != "original":
            raise ValidationError(f"unknown cloak variant {variant!r}")
        return piecewise_params(entries, default=self.base, bbox=(x0, x1, y0, y1))

    def boundary_conditions(self) -> dict:
        return {tag: Dirichlet(0.0) for tag in ("left", "right", "top", "bottom")}

    def exterior_region(self, mesh: Mesh) -> np.ndarray:
        """Area II minus the cloak disk r' <= b."""
        x = mesh.nodes[:, 0]
        r = np.hypot(x - self.center[0], mesh.nodes[:, 1] - self.center[1])
        return (x > self.source_x_max) & (r > self.b)

    def core_region(self) -> Disk:
        return Disk(*self.center, 0.9 * self.a)


def _solve_variant(mesh, params, bcs, dt, t_end, method="direct", subdivision=1):
    system = assemble_system(mesh, params, bcs, material_subdivision=subdivision)
    steady = solve_steady(system, method=method)
    transient = run_transient(
        system, np.zeros(mesh.n_nodes), dt=dt, t_end=t_end, snapshot_times=[t_end]
    )
    return steady, FieldSolution(u=transient.at_time(t_end))


def run_cloak_experiment(scenario: CloakScenario, variants=CLOAK_VARIANTS) -> ExperimentReport:
    """Solve all variants (steady + t = t_end snapshot) and compare exteriors."""
    mesh = scenario.mesh()
    bcs = scenario.boundary_conditions()
    ext = scenario.exterior_region(mesh)
    core = scenario.core_region()

    solutions = {}
    for v in variants:
        solutions[v] = _solve_variant(
            mesh,
            scenario.material(v),
            bcs,
            scenario.dt,
            scenario.t_end,
            subdivision=scenario.material_subdivision,
        )

    metrics: dict = {}
    if "original" in solutions:
        ref_s, ref_t = solutions["original"]
        for v in variants:
            if v == "original":
                continue
            s, tr = solutions[v]
            metrics[f"{v}_exterior_mismatch_steady"] = exterior_mismatch(ref_s, s, mesh, ext)
            metrics[f"{v}_exterior_mismatch_t{scenario.t_end:g}"] = exterior_mismatch(
                ref_t, tr, mesh, ext
            )
    for v in variants:
        metrics[f"{v}_interior_max_steady"] = region_max_abs(mesh, solutions[v][0], core)

    report = ExperimentReport(
        scenario="cloak",
        metrics=metrics,
        provenance={
            "config": asdict(scenario),
            "grid": [scenario.nx, scenario.ny],
            "epsilon": scenario.epsilon,
            "dt": scenario.dt,
        },
    )
    report.solutions = {  # attached for emitters; not part of the metrics record
        f"{v}_{kind}": sol
        for v in variants
        for kind, sol in zip(("steady", "t1"), solutions[v])
    }
    report.mesh = mesh
    return report


def cloak_epsilon_sweep(scenario: CloakScenario, epsilons=(1e-2, 1e-3, 1e-4)) -> list:
    """(epsilon, exterior mismatch vs original, interior leakage) per epsilon."""
    mesh = scenario.mesh()
    bcs = scenario.boundary_conditions()
    ext = scenario.exterior_region(mesh)
    core = scenario.core_region()
    sub = scenario.material_subdivision
    ref = solve_steady(
        assemble_system(mesh, scenario.material("original"), bcs, material_subdivision=sub),
        "direct",
    )
    out = []
    for eps in epsilons:
        sol = solve_steady(
            assemble_system(
                mesh, scenario.material("cloaked", epsilon=eps), bcs, material_subdivision=sub
            ),
            "direct",
        )
        out.append(
            (
                eps,
                exterior_mismatch(ref, sol, mesh, ext),
                region_max_abs(mesh, sol, core),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Bender


@dataclass
class BenderScenario:
    """Annular sector fed from the AD edge; arcs insulated.

    The straightness run holds CB at 0 (through flux); the arrival run
    leaves CB insulated and records every time step.  Slow variants get
    their own stepping so crossings are still resolved.
    """

    k: float = 1.0
    a: float = 1.0
    phi: float = math.pi / 2
    r1: float = 1.0
    ntheta: int = 96
    nr: int = 48
    u_input: float = 1.0
    rho: float = 1.0
    alpha: float = 1.0
    beta: float = 0.0
    threshold: float = 0.5
    dt: float = 0.005
    t_end: float = 4.0
    dt_slow: float = 0.05
    t_end_slow: float = 120.0

    @property
    def spec(self) -> BenderSpec:
        return BenderSpec(k=self.k, a=self.a, phi=self.phi, r1=self.r1)

    @property
    def base(self) -> ParameterSample:
        return ParameterSample.isotropic(self.rho, self.alpha, self.beta, 0.0)

    def mesh(self) -> Mesh:
        spec = self.spec
        return build_annular_sector_mesh(spec.r1, spec.r2, spec.phi, self.nr, self.ntheta)

    def material(self, variant: str) -> ParameterField:
        if variant == "homogeneous-arc":
            return homogeneous_params(self.rho, self.alpha, self.beta, 0.0)
        if variant == "eq8-derived":
            return ParameterField(default=bender_derived_rule(self.spec, self.base))
        if variant == "eq11-paper":
            return ParameterField(default=bender_paper_rule(self.spec, self.base))
        raise ValidationError(f"unknown bender variant {variant!r}")

    def is_slow(self, variant: str) -> bool:
        return variant != "eq8-derived"


def run_bender_experiment(scenario: BenderScenario, variants=BENDER_VARIANTS) -> ExperimentReport:
    """Straightness (steady through-flux) and arrival synchrony per variant."""
    mesh = scenario.mesh()
    flux_bcs = {
        "AD": Dirichlet(scenario.u_input),
        "CB": Dirichlet(0.0),
        "inner-arc": Neumann(0.0),
        "outer-arc": Neumann(0.0),
    }
    arrival_bcs = dict(flux_bcs, CB=Neumann(0.0))
    cb_nodes = np.unique(mesh.boundary_tags["CB"].ravel())

    metrics: dict = {}
    solutions: dict = {}
    for v in variants:
        params = scenario.material(v)
        steady = solve_steady(assemble_system(mesh, params, flux_bcs), "direct")
        solutions[f"{v}_steady"] = steady
        metrics[f"{v}_straightness"] = contour_straightness(mesh, steady)

        dt = scenario.dt_slow if scenario.is_slow(v) else scenario.dt
        t_end = scenario.t_end_slow if scenario.is_slow(v) else scenario.t_end
        arr_sys = assemble_system(mesh, params, arrival_bcs)
        transient = run_transient(
            arr_sys, np.zeros(mesh.n_nodes), dt=dt, t_end=t_end, snapshot_times="all"
        )
        times = np.array([t for t, _ in transient.snapshots])
        probes = np.stack([u[cb_nodes] for _, u in transient.snapshots])
        try:
            metrics[f"{v}_arrival_spread"] = arrival_spread(
                times, probes, scenario.threshold * scenario.u_input
            )
        except NonArrivalError:
            metrics[f"{v}_arrival_spread"] = None

        if v == "eq8-derived":
            metrics["eq8_rod_mismatch_steady"] = _rod_mismatch_steady(scenario, mesh, steady)
            metrics["eq8_rod_mismatch_transient"] = _rod_mismatch_transient(
                scenario, mesh, params
            )

    report = ExperimentReport(
        scenario="bender",
        metrics=metrics,
        provenance={
            "config": asdict(scenario),
            "grid": [scenario.ntheta, scenario.nr],
            "dt": scenario.dt,
        },
    )
    report.solutions = solutions
    report.mesh = mesh
    return report


def _rod_angles_as_x(scenario: BenderScenario, mesh: Mesh) -> np.ndarray:
    """Pull sector nodes back to rod coordinates x = k a theta / phi."""
    theta = np.arctan2(mesh.nodes[:, 0], mesh.nodes[:, 1])
    return scenario.k * scenario.a * theta / scenario.phi


def _rod_mismatch_steady(scenario, mesh, steady) -> float:
    x = _rod_angles_as_x(scenario, mesh)
    L = scenario.k * scenario.a
    oracle = rod_steady(L, scenario.alpha, scenario.beta, scenario.u_input, x)
    return float(np.max(np.abs(steady.u - oracle)) / scenario.u_input)


def _rod_mismatch_transient(scenario, mesh, params) -> float:
    """Max nodal deviation from the 1D rod oracle at a mid-diffusion time."""
    L = scenario.k * scenario.a
    t_probe = 0.1 * scenario.rho * L * L / scenario.alpha
    bcs = {
        "AD": Dirichlet(scenario.u_input),
        "CB": Dirichlet(0.0),
        "inner-arc": Neumann(0.0),
        "outer-arc": Neumann(0.0),
    }
    system = assemble_system(mesh, params, bcs)
    sol = run_transient(
        system, np.zeros(mesh.n_nodes), dt=scenario.dt, t_end=t_probe, snapshot_times=[t_probe]
    )
    x = _rod_angles_as_x(scenario, mesh)
    oracle = solve_rod_1d(
        L, scenario.alpha, scenario.rho, scenario.beta, scenario.u_input, t_probe, x
    )
    return float(np.max(np.abs(sol.at_time(t_probe) - oracle)) / scenario.u_input)


# ---------------------------------------------------------------------------
# Pullback identity and convergence


def pullback_check(mapping: Mapping, n: int = 64, base: ParameterSample = None, beta: float = 4.0):
    """Relative L2 mismatch between the original and transformed solutions.

    Solves the reaction-diffusion through-flux problem on the map's domain
    rectangle, then the pushed-forward problem on the mapped mesh, and
    compares nodal values at corresponding nodes (the pullback identity
    u'(x'(x)) = u(x) made discrete).
    """
    if mapping.domain is None:
        raise ValidationError("pullback check needs a map with a bounded domain")
    if mapping.inverse is None:
        raise ValidationError("pullback check needs an invertible map")
    if base is None:
        base = ParameterSample.isotropic(1.0, 1.0, beta, 0.0)
    x0, x1, y0, y1 = mapping.domain
    mesh = build_cartesian_mesh((x0, x1), (y0, y1), n, n)
    bcs = {
        "left": Dirichlet(1.0),
        "right": Dirichlet(0.0),
        "top": Neumann(0.0),
        "bottom": Neumann(0.0),
    }
    field0 = ParameterField(default=base)
    u0 = solve_steady(assemble_system(mesh, field0, bcs), "direct")

    mapped = Mesh(
        mapping(mesh.nodes),
        mesh.elements.copy(),
        {k: v.copy() for k, v in mesh.boundary_tags.items()},
        mesh.grid_shape,
        kind="mapped",
    )

    def pushed(pts):
        pre = mapping.inverse(pts)
        if mapping.jacobian is not None:
            A = mapping.jacobian(pre)
        else:
            A = mapping.jacobian_many(pre)
        return push_forward_arrays(field0.sample_arrays(pre), A)

    u1 = solve_steady(assemble_system(mapped, ParameterField(default=pushed), bcs), "direct")
    return exterior_mismatch(u0, u1)


def _rod_mesh_and_bcs(n: int, beta: float):
    mesh = build_cartesian_mesh((0.0, 1.0), (0.0, 1.0), n, 1)
    bcs = {
        "left": Dirichlet(1.0),
        "right": Dirichlet(0.0),
        "top": Neumann(0.0),
        "bottom": Neumann(0.0),
    }
    params = homogeneous_params(1.0, 1.0, beta, 0.0)
    return mesh, params, bcs


def sinh_benchmark_error(n: int, beta: float = 4.0) -> float:
    """Nodal L2 error of the steady reaction-diffusion profile on an n x 1 grid."""
    mesh, params, bcs = _rod_mesh_and_bcs(n, beta)
    sol = solve_steady(assemble_system(mesh, params, bcs))
    exact = rod_steady(1.0, 1.0, beta, 1.0, mesh.nodes[:, 0])
    return float(np.sqrt(np.mean((sol.u - exact) ** 2)))


def rod_transient_error(n: int, dt: float, t: float = 0.1) -> float:
    """L-inf error of the transient rod step response against the series oracle."""
    mesh, params, bcs = _rod_mesh_and_bcs(n, 0.0)
    system = assemble_system(mesh, params, bcs)
    sol = run_transient(system, np.zeros(mesh.n_nodes), dt=dt, t_end=t, snapshot_times=[t])
    oracle = solve_rod_1d(1.0, 1.0, 1.0, 0.0, 1.0, t, mesh.nodes[:, 0])
    return float(np.max(np.abs(sol.at_time(t) - oracle)))


def rod_dt_error(n: int, dt: float, t: float = 0.1, ref_dt: float = None) -> float:
    """Time-discretization error alone: same grid, tiny-dt reference run."""
    if ref_dt is None:
        ref_dt = dt / 64
    mesh, params, bcs = _rod_mesh_and_bcs(n, 0.0)
    system = assemble_system(mesh, params, bcs)
    u0 = np.zeros(mesh.n_nodes)
    coarse = run_transient(system, u0, dt=dt, t_end=t, snapshot_times=[t]).at_time(t)
    ref = run_transient(system, u0, dt=ref_dt, t_end=t, snapshot_times=[t]).at_time(t)
    return float(np.max(np.abs(coarse - ref)))


def convergence_study(runner, grids) -> dict:
    """Run a metric per grid and fit the observed order between doublings."""
    grids = list(grids)
    if len(grids) < 3:
        raise ValidationError("need at least 3 grids")
    values = [float(runner(n)) for n in grids]
    orders = [
        math.log(values[i] / values[i + 1], grids[i + 1] / grids[i])
        for i in range(len(values) - 1)
        if values[i + 1] > 0
    ]
    return {"grids": grids, "values": values, "orders": orders}
