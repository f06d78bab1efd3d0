"""Pointwise nonlinear structure of the modified vacuum electrodynamics.

With k = 3 eps / e^2 the theory is generated by the Lagrangian density
L = (E^2 - B^2)/2 + (k/2)(E.B)^2; everything here follows from it:

    D = dL/dE  = E + k (E.B) B            (canonical momentum map)
    H = -dL/dB = B - k (E.B) E
    rho_ind = -k B.grad(E.B)
    j_ind   =  k [ B d_t(E.B) - E x grad(E.B) ]
    energy  = E.dL/dE - L = (E^2 + B^2)/2 + (k/2)(E.B)^2

The Hessian d2L/dE dE = delta + k B B^T has eigenvalues {1, 1, 1 + k|B|^2},
so the momentum map inverts in closed form (rank-one update), with
denominator e^2 + 3 eps |B|^2 >= e^2 > 0 whenever eps >= 0.

Sign flips of E and B leave the energy invariant while flipping charge with
E, magnetic moment with B, and angular momentum with the orientation of
E x B; `quadruplet` materializes the four members.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import (ScalarField, Vec3Field, _check_same_grid, div, grad,
                   integrate)


@dataclass(frozen=True)
class CouplingParams:
    """Sign epsilon in {+1, 0, -1}, positive coupling e2 (length^-2), toroidal scale."""

    epsilon: float = 1.0
    e2: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.epsilon not in (-1.0, 0.0, 1.0):
            raise ValueError("epsilon must be one of -1, 0, +1")
        if not (self.e2 > 0.0):
            raise ValueError("e2 must be positive")
        if not (self.scale > 0.0):
            raise ValueError("scale must be positive")

    @property
    def k(self) -> float:
        """Trilinear coupling 3 eps / e^2."""
        return 3.0 * self.epsilon / self.e2


@dataclass
class Observables:
    """Global totals of one static field pair."""

    energy: float
    charge: float
    magnetic_moment: np.ndarray
    angular_momentum: np.ndarray


def _eb_product(E: Vec3Field, B: Vec3Field) -> ScalarField:
    _check_same_grid(E, B)
    return ScalarField(E.grid, E.dot(B))


def induced_charge(E: Vec3Field, B: Vec3Field, p: CouplingParams) -> ScalarField:
    """rho_ind = -(3 eps / e^2) B . grad(E.B)."""
    s = _eb_product(E, B)
    gs = grad(s)
    return ScalarField(E.grid, -p.k * B.dot(gs))


def induced_current(E: Vec3Field, B: Vec3Field, dEdt: Vec3Field, dBdt: Vec3Field,
                    p: CouplingParams) -> Vec3Field:
    """j_ind = (3 eps / e^2) [ B d_t(E.B) - E x grad(E.B) ].

    The caller supplies the time derivatives (dBdt = -curl E for evolved
    states, zeros for statics); d_t(E.B) = dEdt.B + E.dBdt.
    """
    _check_same_grid(E, B, dEdt, dBdt)
    s = _eb_product(E, B)
    gs = grad(s)
    sdot = dEdt.dot(B) + E.dot(dBdt)
    cx = E.y * gs.z - E.z * gs.y
    cy = E.z * gs.x - E.x * gs.z
    cz = E.x * gs.y - E.y * gs.x
    k = p.k
    return Vec3Field(E.grid, k * (B.x * sdot - cx), k * (B.y * sdot - cy),
                     k * (B.z * sdot - cz))


def energy_density(E: Vec3Field, B: Vec3Field, p: CouplingParams) -> ScalarField:
    """(E^2 + B^2)/2 + (3 eps / 2 e^2)(E.B)^2.

    This is the canonical Hamiltonian E.dL/dE - L, the density whose box
    total the vacuum system conserves exactly (the Poynting flux E x B is a
    pure divergence on the periodic box).
    """
    _check_same_grid(E, B)
    s = E.dot(B)
    vals = 0.5 * (E.norm2() + B.norm2()) + 0.5 * p.k * s * s
    return ScalarField(E.grid, vals)


def poynting(E: Vec3Field, B: Vec3Field) -> Vec3Field:
    """E x B, unchanged from the linear theory."""
    _check_same_grid(E, B)
    return Vec3Field(E.grid,
                     E.y * B.z - E.z * B.y,
                     E.z * B.x - E.x * B.z,
                     E.x * B.y - E.y * B.x)


def d_from_e(E: Vec3Field, B: Vec3Field, p: CouplingParams) -> Vec3Field:
    """D = E + (3 eps / e^2) (E.B) B."""
    _check_same_grid(E, B)
    ks = p.k * E.dot(B)
    return Vec3Field(E.grid, E.x + ks * B.x, E.y + ks * B.y, E.z + ks * B.z)


def e_from_d(D: Vec3Field, B: Vec3Field, p: CouplingParams) -> Vec3Field:
    """Closed-form rank-one inversion E = D - 3 eps (D.B) B / (e^2 + 3 eps |B|^2).

    Exact inverse of `d_from_e`; the denominator is bounded below by e^2 for
    eps >= 0 because the Hessian delta + (3 eps/e^2) B B^T is positive
    definite.
    """
    _check_same_grid(D, B)
    coef = 3.0 * p.epsilon * D.dot(B) / (p.e2 + 3.0 * p.epsilon * B.norm2())
    return Vec3Field(D.grid, D.x - coef * B.x, D.y - coef * B.y, D.z - coef * B.z)


def h_from_b(E: Vec3Field, B: Vec3Field, p: CouplingParams) -> Vec3Field:
    """H = B - (3 eps / e^2) (E.B) E."""
    _check_same_grid(E, B)
    ks = p.k * E.dot(B)
    return Vec3Field(E.grid, B.x - ks * E.x, B.y - ks * E.y, B.z - ks * E.z)


def hessian(B: np.ndarray, p: CouplingParams) -> np.ndarray:
    """d2L/dE_k dE_l = delta_kl + (3 eps / e^2) B_k B_l at one point."""
    b = np.asarray(B, dtype=np.float64)
    return np.eye(3) + p.k * np.outer(b, b)


def _support_touches_boundary(F: Vec3Field, rel_tol: float = 1e-10) -> bool:
    scale = F.max_abs()
    if scale == 0.0:
        return False
    for c in F.components:
        edge = max(np.max(np.abs(c[:2, :, :])), np.max(np.abs(c[-2:, :, :])),
                   np.max(np.abs(c[:, :2, :])), np.max(np.abs(c[:, -2:, :])),
                   np.max(np.abs(c[:, :, :2])), np.max(np.abs(c[:, :, -2:])))
        if edge > rel_tol * scale:
            return True
    return False


def observables(E: Vec3Field, B: Vec3Field, p: CouplingParams,
                origin: np.ndarray | None = None) -> Observables:
    """Totals for a static pair: energy, induced charge, moment, angular momentum.

    energy = int H, charge = int rho_ind, moment = 1/2 int r x j_ind with the
    static current (zero time derivatives), spin = int r x (E x B); r is
    measured from `origin` (box center by default).  Warns when the field
    support touches the box faces, where the moment integrals stop being
    translation-clean.
    """
    _check_same_grid(E, B)
    g = E.grid
    if origin is None:
        origin = g.center
    origin = np.asarray(origin, dtype=np.float64)
    if _support_touches_boundary(E) or _support_touches_boundary(B):
        warnings.warn("field support touches the box boundary; "
                      "moment integrals are not translation-clean", stacklevel=2)

    energy = integrate(energy_density(E, B, p))
    charge = integrate(induced_charge(E, B, p))

    zero = Vec3Field.zeros(g)
    j = induced_current(E, B, zero, zero, p)
    s = poynting(E, B)

    X, Y, Z = g.meshgrid()
    rx, ry, rz = X - origin[0], Y - origin[1], Z - origin[2]

    def moment_of(v: Vec3Field) -> np.ndarray:
        mx = integrate(ScalarField(g, ry * v.z - rz * v.y))
        my = integrate(ScalarField(g, rz * v.x - rx * v.z))
        mz = integrate(ScalarField(g, rx * v.y - ry * v.x))
        return np.array([mx, my, mz])

    return Observables(energy=energy, charge=charge,
                       magnetic_moment=0.5 * moment_of(j),
                       angular_momentum=moment_of(s))


def quadruplet(E: Vec3Field, B: Vec3Field) -> list[tuple[Vec3Field, Vec3Field]]:
    """The four sign combinations (E,B), (E,-B), (-E,B), (-E,-B).

    Their observables reproduce the sign pattern energy-invariant, charge
    flipping with E, moment with B, angular momentum with the orientation of
    E x B.
    """
    return [(E.scaled(se), B.scaled(sb))
            for se, sb in ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))]


def static_residuals(E: Vec3Field, B: Vec3Field, p: CouplingParams) -> tuple[float, float]:
    """Max-norm residuals of the static system for one candidate pair.

    gauss residual:  div E + (3 eps/e^2) B.grad(E.B)
    ampere residual: curl B + (3 eps/e^2) E x grad(E.B)
    Both right-hand sides are odd under the quadruplet sign flips exactly as
    the left-hand sides, so all four members share these numbers.
    """
    from .grid import curl  # local import to keep module load light

    rho = induced_charge(E, B, p)
    gauss = div(E).values - rho.values
    s = _eb_product(E, B)
    gs = grad(s)
    cb = curl(B)
    k = p.k
    ax = cb.x + k * (E.y * gs.z - E.z * gs.y)
    ay = cb.y + k * (E.z * gs.x - E.x * gs.z)
    az = cb.z + k * (E.x * gs.y - E.y * gs.x)
    amp = max(float(np.max(np.abs(ax))), float(np.max(np.abs(ay))),
              float(np.max(np.abs(az))))
    return float(np.max(np.abs(gauss))), amp
