"""Reference physical models expressed as scaling problems.

Each ``build_*`` function turns a parameter set into a
:class:`~nondim.scaling.ScalingProblem` whose monomials are the dimensionless
coefficients of the model equations.  Default parameter values ship as named
presets so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import DomainError
from .scaling import Monomial, ScalingProblem

CBRT_36PI = (36.0 * math.pi) ** (1.0 / 3.0)


def _require_positive(obj, names):
    for name in names:
        if not getattr(obj, name) > 0:
            raise DomainError(f"{type(obj).__name__}.{name} must be > 0")


@dataclass(frozen=True)
class ProjectileParams:
    """Vertical throw from a planetary surface: gravity, radius, launch speed."""

    g: float = 9.8            # m/s^2
    R: float = 6.3781e6       # m
    v0: float = 25.0          # m/s

    def __post_init__(self):
        _require_positive(self, ("g", "R", "v0"))


def build_projectile(params: ProjectileParams = ProjectileParams()) -> ScalingProblem:
    """Coefficients of the scaled free-flight equation over factors (t_c, x_c).

    lambda1 = g*t_c^2/x_c, lambda2 = x_c/R, lambda3 = v0*t_c/x_c.
    """
    return ScalingProblem(
        factor_names=("t_c [s]", "x_c [m]"),
        monomials=(
            Monomial("lambda1", params.g, (2.0, -1.0)),
            Monomial("lambda2", 1.0 / params.R, (0.0, 1.0)),
            Monomial("lambda3", params.v0, (1.0, -1.0)),
        ),
    )


@dataclass(frozen=True)
class SchrodingerParams:
    """Hydrogen atom in a constant magnetic field (SI values)."""

    hbar: float = 1.05457172647e-34     # J s
    mu: float = 9.1093829140e-31        # kg
    e: float = 1.60217656535e-19        # C
    B: float = 45.0                     # T
    coulomb: float = 8.987551787368e9   # J m / C^2, the value 1/(4 pi eps)

    def __post_init__(self):
        _require_positive(self, ("hbar", "mu", "e", "B", "coulomb"))


def build_schrodinger(params: SchrodingerParams = SchrodingerParams()) -> ScalingProblem:
    """Five wave-equation coefficients over factors (alpha0, beta0, gamma0)."""
    p = params
    return ScalingProblem(
        factor_names=("alpha0 [m]", "beta0 [s]", "gamma0 [m^-3/2]"),
        monomials=(
            Monomial("lambda1", p.hbar / p.mu, (-2.0, 1.0, 0.0)),
            Monomial("lambda2", p.e * p.B / (2.0 * p.mu), (0.0, 1.0, 0.0)),
            Monomial("lambda3", p.e**2 * p.B**2 / (8.0 * p.mu * p.hbar), (2.0, 1.0, 0.0)),
            Monomial("lambda4", p.e**2 * p.coulomb / p.hbar, (-1.0, 1.0, 0.0)),
            Monomial("lambda5", 1.0, (3.0, 0.0, 2.0)),
        ),
    )


def atomic_units(params: SchrodingerParams = SchrodingerParams()) -> np.ndarray:
    """The factor choice forcing lambda1 = lambda4 = lambda5 = 1.

    alpha0 is roughly the ground-state hydrogen radius and beta0 the
    matching time unit.
    """
    p = params
    inv_coulomb = 1.0 / p.coulomb  # 4 pi eps
    alpha0 = inv_coulomb * p.hbar**2 / (p.mu * p.e**2)
    beta0 = inv_coulomb**2 * p.hbar**3 / (p.mu * p.e**4)
    gamma0 = p.mu**1.5 * p.e**3 / (inv_coulomb**1.5 * p.hbar**3)
    return np.array([alpha0, beta0, gamma0])


@dataclass(frozen=True)
class LdGParams:
    """Landau-de Gennes material constants plus the size-separation decades q."""

    L: float = 4.0e-11
    A: float = 1.0
    B: float = 2.12e6
    C: float = 1.73e6
    q: int = 3

    def __post_init__(self):
        _require_positive(self, ("L", "B", "C"))
        if self.q < 1:
            raise DomainError("q must be a positive integer")

    @property
    def A_NI(self) -> float:
        return self.B**2 / (27.0 * self.C)

    @property
    def xi_NI(self) -> float:
        return math.sqrt(self.L / self.A_NI)

    @property
    def vartheta(self) -> float:
        """Factor-independent quadratic weight A / A_NI (not a monomial)."""
        return self.A / self.A_NI


def build_ldg(params: LdGParams = LdGParams()) -> ScalingProblem:
    """Free-energy functional coefficients over factors (x0, Q0, F0).

    The quadratic-term weight A/A_NI does not depend on the factors and is
    therefore excluded from the monomial set.  Targets drive lambda2 to
    10**-q (the large-body regime) and the rest to 1.
    """
    p = params
    return ScalingProblem(
        factor_names=("x0 [m]", "Q0 [-]", "F0 [J]"),
        monomials=(
            Monomial("lambda1", p.A_NI, (3.0, 2.0, -1.0), target=0.0),
            Monomial("lambda2", p.xi_NI, (-1.0, 0.0, 0.0), target=-float(p.q)),
            Monomial("lambda3", p.B / (math.sqrt(27.0) * p.A_NI), (0.0, 1.0, 0.0)),
            Monomial("lambda4", p.C / p.A_NI, (0.0, 2.0, 0.0)),
        ),
    )


def ldg_reference_factors(params: LdGParams = LdGParams()) -> np.ndarray:
    """Physical large-body choice: x0 = xi_NI*10^q, Q0 = B/(sqrt27 C)."""
    p = params
    x0 = p.xi_NI * 10.0**p.q
    q0 = p.B / (math.sqrt(27.0) * p.C)
    f0 = q0**2 * p.A_NI * x0**3
    return np.array([x0, q0, f0])


@dataclass(frozen=True)
class LatexParams:
    """Kinetic and volume parameters of the two-phase cluster model."""

    k_a: float = 2.0e-8          # L^(1/3)/s
    k_d: float = 5.0e-8          # L^(1/3)/s
    k_p: float = 850.0           # L/(mol s)
    k_s: float = 2.5e-5          # L/s
    k_mu: float = 1.0e-5         # 1/s
    M_bar: float = 2.5           # mol
    V_mon2: float = 0.1          # L/mol
    V_pol1: float = 0.25         # L
    v_c: float = 2.5e-22         # L
    V_pol2_bar: float = 0.095    # L/mol
    Phi_s: float = 1.0e-3        # dimensionless
    N_p: float = 2.8e17          # dimensionless
    R_mol: float = 2.3e-7        # mol

    def __post_init__(self):
        _require_positive(self, tuple(f.name for f in fields(self)))
        if not self.Phi_s < 1:
            raise DomainError("Phi_s must be < 1")

    @property
    def psi_bar(self) -> float:
        """Initial monomer-to-polymer odds, M_bar*V_mon2/V_pol1."""
        return self.M_bar * self.V_mon2 / self.V_pol1

    @property
    def psi_ratio(self) -> float:
        """Molar-volume ratio V_mon2/V_pol2_bar."""
        return self.V_mon2 / self.V_pol2_bar


#: Table of values used for all pinned latex runs.
POLYMAT_2018 = LatexParams()

#: Canonical monomial order of the latex problem.
LATEX_LABELS = (
    "a_m", "a_w", "d", "p", "n", "c", "mu_m", "mu_w",
    "dm_mat", "dw_mat", "s_m", "s_mat", "pol1_pol2", "pol1_mat",
    "p_m", "p_w", "p_pol2", "p_pol1", "p_mat",
)

#: Coefficient subset (0-based indices into LATEX_LABELS) whose traditional
#: one-equals-one scaling has ratio ~1e6 and produces the strongly
#: oscillatory runs used as the poorly-scaled contrast preset.
LATEX_TEST_SUBSET = (1, 4, 7, 9, 11, 12, 15, 16)

LATEX_FACTOR_NAMES = (
    "nu0 [L]", "t0 [s]", "m0 [1/L]", "w0 [1/L]",
    "M0 [L]", "P0 [L]", "Pi0 [L]", "delta0 [1/L]",
)


@dataclass(frozen=True)
class LatexConstants:
    """Factor-free constants that ride along with the latex problem."""

    Phi_s: float
    Psi_bar: float
    Psi_r: float


def build_latex(
    params: LatexParams = POLYMAT_2018,
) -> tuple[ScalingProblem, LatexConstants]:
    """All 19 coefficients of the dimensionless cluster model.

    Factors, in order: (nu0, t0, m0, w0, M0, P0, Pi0, delta0).  The
    factor-independent constants Psi_bar and Psi_r are returned alongside.
    """
    p = params
    kappa_p = p.k_p * p.R_mol * p.V_pol2_bar / p.V_mon2
    kappa_d = CBRT_36PI * p.k_d
    #                         nu0    t0   m0   w0   M0   P0   Pi0  d0
    rows = (
        ("a_m", p.k_a / p.N_p, (2 / 3, 1, 1, 0, 0, 0, 0, 0)),
        ("a_w", p.k_a / p.N_p, (2 / 3, 1, 0, 1, 0, 0, 0, 0)),
        ("d", kappa_d, (-1 / 3, 1, 0, 0, 0, 0, 0, 0)),
        ("p", kappa_p, (0, 1, 0, 0, 0, 0, -1, 0)),
        ("n", p.k_s / p.v_c, (0, 1, -1, 0, 0, 0, 0, 1)),
        ("c", p.v_c, (-2, 0, 0, 0, 0, 0, 0, -1)),
        ("mu_m", p.k_mu, (0, 1, 0, 0, 0, 0, 0, 0)),
        ("mu_w", p.k_mu, (0, 1, 1, -1, 0, 0, 0, 0)),
        ("dm_mat", kappa_d, (5 / 3, 1, 1, 0, -1, 0, 0, 0)),
        ("dw_mat", kappa_d, (5 / 3, 1, 0, 1, -1, 0, 0, 0)),
        ("s_m", p.k_s, (-2, 1, -1, 0, 0, 0, 0, 0)),
        ("s_mat", p.k_s, (0, 1, 0, 0, -1, 0, 0, 0)),
        ("pol1_pol2", p.V_pol1, (0, 0, 0, 0, 0, -1, 0, 0)),
        ("pol1_mat", p.V_pol1, (0, 0, 0, 0, -1, 0, 0, 0)),
        ("p_m", 1.0, (2, 0, 1, 0, 0, 0, -1, 0)),
        ("p_w", 1.0, (2, 0, 0, 1, 0, 0, -1, 0)),
        ("p_pol2", kappa_p, (0, 1, 0, 0, 0, -1, 0, 0)),
        ("p_pol1", p.V_pol1, (0, 0, 0, 0, 0, 0, -1, 0)),
        ("p_mat", 1.0, (0, 0, 0, 0, 1, 0, -1, 0)),
    )
    assert tuple(r[0] for r in rows) == LATEX_LABELS
    problem = ScalingProblem(
        factor_names=LATEX_FACTOR_NAMES,
        monomials=tuple(Monomial(label, kappa, exps) for label, kappa, exps in rows),
    )
    constants = LatexConstants(
        Phi_s=p.Phi_s, Psi_bar=p.psi_bar, Psi_r=p.psi_ratio
    )
    return problem, constants
