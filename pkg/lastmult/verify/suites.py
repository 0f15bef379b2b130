"""Residual checks applicable to a model, grouped by the structure they test."""

from typing import List, Optional

from ..core.expr import Expr
from ..core.forms import residual_field
from ..core.logger import get_logger
from ..core.stats import ResidualStats, SampleBatch
from ..models.model import CanonicalBlock, ConformalBlock2D, ConformalBlock3D, ModelSpec
from ..structures.ham2d import (
    CosymplecticData,
    SymplecticData2D,
    conformal_residuals,
    cosymplectic_residuals,
    symplectic_residuals,
)
from ..structures.jlm import (
    MultiplierData,
    exactness_residual_2d,
    hamiltonian_gradient_residual,
    jlm_residual,
    matching_residual_3d,
    multiplier_identity_residual,
    standard_flow_residual,
    transform_residual,
)
from ..structures.nambu3d import (
    HamiltonianPair,
    NambuData,
    conformal_nambu_residuals,
    conservation_residual,
    derivation_residual,
    evolution_identity_residuals,
    fundamental_identity_residual,
    mu_H_residual,
    nambu_form_residual,
    pencil_jacobi_residual,
    poisson_vectors,
    volume_preservation_residual,
)
from ..utils.validation import DEFAULT_TOLERANCE
from .checks import ResidualCheck, SharedResiduals


logger = get_logger(__name__)


def multiplier_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> List[ResidualCheck]:
    d = spec.multiplier_data()
    checks = [
        ResidualCheck(
            "jlm.multiplier",
            "dM/dt + M div X = 0",
            lambda: jlm_residual(d.field, d.multiplier, pts, tolerance),
        )
    ]

    if spec.dimension == 2:
        checks.append(
            ResidualCheck(
                "jlm.exactness",
                "d/dx[M(f - psi)] + d/dy[M(g - phi)] = 0",
                lambda: exactness_residual_2d(d, pts, tolerance),
            )
        )
        if spec.has_hamiltonian:
            H = spec.hamiltonian
            checks.append(
                ResidualCheck(
                    "jlm.hamiltonian",
                    "H_y = M(f - psi), H_x = -M(g - phi)",
                    lambda: hamiltonian_gradient_residual(d, H, pts, tolerance),
                )
            )
    elif spec.has_hamiltonian:
        pair = spec.pair
        checks.append(
            ResidualCheck(
                "jlm.matching",
                "M[(f - psi) dy^dz + (g - phi) dz^dx + (h - varphi) dx^dy] = dH1^dH2",
                lambda: matching_residual_3d(d, pair.H1, pair.H2, pts, tolerance),
            )
        )
    return checks


def symplectic_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> List[ResidualCheck]:
    if spec.dimension != 2 or not spec.has_hamiltonian:
        return []
    data = SymplecticData2D(spec.chart, spec.multiplier)
    shared = SharedResiduals(
        lambda: symplectic_residuals(spec.hamiltonian, data, pts, tolerance)
    )
    return [
        shared.check("symplectic.hamilton", "i_X (M dx^dy) = dH", "hamilton"),
        shared.check("symplectic.preservation", "L_X (M dx^dy) = 0", "preservation"),
    ]


def nambu_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> List[ResidualCheck]:
    if spec.dimension != 3 or not spec.has_hamiltonian:
        return []
    pair = spec.pair
    d = NambuData(spec.chart, spec.multiplier)
    x, y, z = spec.chart.coordinate_exprs()

    def jacobi() -> ResidualStats:
        J1, J2 = poisson_vectors(pair, d)
        return pencil_jacobi_residual(J1, J2, pts, tolerance=tolerance)

    return [
        ResidualCheck(
            "nambu.form",
            "i_X (M dx^dy^dz) = dH1^dH2",
            lambda: nambu_form_residual(pair, d, pts, tolerance),
        ),
        ResidualCheck(
            "nambu.conservation",
            "X(H1) = X(H2) = 0",
            lambda: conservation_residual(pair, d, pts, tolerance),
        ),
        ResidualCheck(
            "nambu.volume",
            "div(M X) = 0",
            lambda: volume_preservation_residual(pair, d, pts, tolerance),
        ),
        ResidualCheck(
            "nambu.jacobi",
            "J . curl J = 0 on the pencil c1 grad H1 / M - c2 grad H2 / M",
            jacobi,
        ),
        ResidualCheck(
            "nambu.fundamental",
            "{x,y,{H1,H2,z}} = {{x,y,H1},H2,z} + {H1,{x,y,H2},z} + {H1,H2,{x,y,z}}",
            lambda: fundamental_identity_residual(d, x, y, pair.H1, pair.H2, z, pts, tolerance),
        ),
        ResidualCheck(
            "nambu.derivation",
            "X{x,y,z} = {Xx,y,z} + {x,Xy,z} + {x,y,Xz}",
            lambda: derivation_residual(pair, d, x, y, z, pts, tolerance),
        ),
    ]


def _target_pair(block: CanonicalBlock) -> HamiltonianPair:
    H1, H2 = block.hamiltonians
    return HamiltonianPair(H1, H2)


def transform_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> List[ResidualCheck]:
    block = spec.canonical
    if block is None:
        return []
    d: MultiplierData = spec.multiplier_data()
    T = block.transform
    volume = "dq^dp" if spec.dimension == 2 else "du^dv^dw"

    checks = [
        ResidualCheck(
            "transform.pullback",
            f"{volume} = M (dx - psi dt) ^ (dy - phi dt)"
            + ("" if spec.dimension == 2 else " ^ (dz - varphi dt)"),
            lambda: transform_residual(d, T, pts, tolerance),
        )
    ]
    if not block.hamiltonians:
        return checks

    pulled = block.pulled_back()
    if spec.dimension == 2:
        identity = "M alpha1^alpha2 = dq^dp + dK^dt"
        flow = "canonical flow = Hamilton's equations of K"
    else:
        identity = "M alpha1^alpha2^alpha3 = du^dv^dw - dH1^dH2^dt"
        flow = "standard flow = Nambu field of (H1, H2) for du^dv^dw"
    checks += [
        ResidualCheck(
            "transform.identity",
            identity,
            lambda: multiplier_identity_residual(d, T, pulled, pts, tolerance),
        ),
        ResidualCheck(
            "transform.flow",
            flow,
            lambda: standard_flow_residual(d, T, block.target_field(), pts, tolerance),
        ),
    ]

    if spec.dimension == 2:
        checks += _cosymplectic_checks(block, pts, tolerance)
    else:
        checks += _evolution_checks(block, pts, tolerance)
    return checks


def _cosymplectic_checks(
    block: CanonicalBlock, pts: SampleBatch, tolerance: float
) -> List[ResidualCheck]:
    (K,) = block.hamiltonians
    data = CosymplecticData(block.chart)
    shared = SharedResiduals(
        lambda: cosymplectic_residuals(K, data, block.transform.push_batch(pts), tolerance)
    )
    anchors = {
        "reeb_eta": "i_xi eta = 1",
        "reeb_omega": "i_xi Omega = 0",
        "evolution_eta": "i_E eta = 1",
        "evolution_omega": "i_E Omega = dK - xi(K) eta",
        "gradient_eta": "i_grad eta = xi(K)",
        "gradient_omega": "i_grad Omega = dK - xi(K) eta",
    }
    return [
        shared.check(f"cosymplectic.{key}", anchor, key) for key, anchor in anchors.items()
    ]


def _evolution_checks(
    block: CanonicalBlock, pts: SampleBatch, tolerance: float
) -> List[ResidualCheck]:
    pair = _target_pair(block)
    d = NambuData(block.chart)

    def target_pts() -> SampleBatch:
        return block.transform.push_batch(pts)

    evolution = SharedResiduals(
        lambda: evolution_identity_residuals(pair, d, target_pts(), tolerance)
    )
    mu = SharedResiduals(lambda: mu_H_residual(pair, d, target_pts(), tolerance))
    return [
        evolution.check("standard.evolution_eta", "i_E dt = 1", "evolution_eta"),
        evolution.check("standard.evolution_kernel", "i_E mu_H = 0", "evolution_kernel"),
        evolution.check("standard.field_eta", "i_X dt = 0", "field_eta"),
        evolution.check("standard.field_volume", "i_X du^dv^dw = dH1^dH2", "field_volume"),
        mu.check(
            "standard.mu_H",
            "du^dv^dw - dH1^dH2^dt = beta1^beta2^beta3, beta_i = du_i - X^i dt",
            "decomposition",
        ),
    ]


def conformal_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> List[ResidualCheck]:
    block = spec.conformal
    if block is None:
        return []

    dynamics = ResidualCheck(
        "conformal.dynamics",
        "conformal field = model dynamics",
        lambda: residual_field(block.field(), spec.dynamics, pts, tolerance),
    )

    if isinstance(block, ConformalBlock2D):
        data = block.data
        H: Expr = block.hamiltonian
        structure = SharedResiduals(lambda: data.residuals(pts, tolerance))
        field = SharedResiduals(lambda: conformal_residuals(H, data, pts, tolerance))
        return [
            dynamics,
            structure.check("conformal.exact", "Omega = -d theta", "exact"),
            structure.check("conformal.liouville", "i_Z Omega = -theta", "liouville"),
            field.check("conformal.contraction", "i_G Omega = dH - a theta", "contraction"),
            field.check("conformal.scaling", "L_G Omega = a Omega", "scaling"),
            field.check("conformal.decomposition", "G = X_H + a Z", "decomposition"),
            field.check("conformal.divergence", "div_Omega G = a", "divergence"),
        ]

    assert isinstance(block, ConformalBlock3D)
    pair, params = block.pair, block.params
    shared = SharedResiduals(
        lambda: conformal_nambu_residuals(pair.H1, pair.H2, params, pts, tolerance)
    )
    return [
        dynamics,
        shared.check("conformal.contraction", "i_X mu = dF1^dF2 + zeta", "contraction"),
        shared.check("conformal.scaling", "L_X mu = a mu", "scaling"),
        shared.check("conformal.divergence", "div X = a1 + a2 + a3", "divergence"),
    ]


def build_checks(
    spec: ModelSpec, pts: SampleBatch, tolerance: Optional[float] = None
) -> List[ResidualCheck]:
    """Every check that applies to ``spec``, sorted by name."""
    tol = DEFAULT_TOLERANCE if tolerance is None else tolerance
    checks: List[ResidualCheck] = []
    for group in (
        multiplier_checks,
        symplectic_checks,
        nambu_checks,
        transform_checks,
        conformal_checks,
    ):
        checks.extend(group(spec, pts, tol))

    logger.debug("checks_built", model=spec.name, count=len(checks))
    return sorted(checks, key=lambda check: check.name)


__all__ = [
    "build_checks",
    "conformal_checks",
    "multiplier_checks",
    "nambu_checks",
    "symplectic_checks",
    "transform_checks",
]
