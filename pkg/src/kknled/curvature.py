"""Curvature algebra of the circle-reduced 5-d metric on constant field tensors.

For a spatially uniform antisymmetric F the non-vanishing frame components of
the Riemann tensor are quadratic in F:

    R_{mu nu la rho} = 1/4 (F_{mu la} F_{rho nu} - F_{nu la} F_{rho mu}
                            + 2 F_{mu nu} F_{rho la})
    R_{mu 5 5 la}    = 1/4 eta^{nu rho} F_{mu nu} F_{rho la}

(the mixed components with a single 5-index carry derivatives of F and vanish
here).  The prefactor 1/4 multiplies the whole bracket; only that reading
makes the trace of the Riemann table reproduce the Ricci components below,
which is enforced by a contraction test rather than assumed.

Ricci and scalar are assembled from their own closed forms,

    R_{mu nu} = 1/2 eta^{la rho} F_{mu la} F_{nu rho},
    R_{55}    = 1/4 eta^{mu nu} eta^{la rho} F_{mu la} F_{rho nu},
    R         = -1/4 F_{mu nu} F^{mu nu},

and the scalar equals the Maxwell Lagrangian density 1/2 (E^2 - B^2) under
the E/B dictionary E_i = F_{0i}, B = (F_32, F_13, F_21).

The quadratic combination R_ABCD R^ABCD - 4 R_AB R^AB + R^2 (all raises with
the flat 5-d frame metric diag(+,-,-,-,+)) collapses, for constant F, to the
quartic closed form

    (3/16) [ (F_{mu nu} F^{mu nu})^2 - 2 F_{mu la} F_{nu rho} F^{mu nu} F^{la rho} ]
    = -(3/2) (E.B)^2,

which is checked against the contraction route to 1e-10 over random draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ETA4 = np.diag([1.0, -1.0, -1.0, -1.0])
METRIC5 = np.diag([1.0, -1.0, -1.0, -1.0, 1.0])

_ANTISYM_TOL = 1e-12


@dataclass
class FieldTensor4:
    """Constant antisymmetric 4x4 electromagnetic tensor, signature (+,-,-,-)."""

    f: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.f, dtype=np.float64)
        if arr.shape != (4, 4):
            raise ValueError("field tensor must be 4x4")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr + arr.T)) > _ANTISYM_TOL * scale:
            raise ValueError("field tensor must be antisymmetric")
        self.f = arr

    @classmethod
    def from_eb(cls, e, b) -> "FieldTensor4":
        e = np.asarray(e, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        f = np.zeros((4, 4))
        f[0, 1:] = e
        f[1:, 0] = -e
        f[3, 2], f[2, 3] = b[0], -b[0]
        f[1, 3], f[3, 1] = b[1], -b[1]
        f[2, 1], f[1, 2] = b[2], -b[2]
        return cls(f)

    def to_eb(self) -> tuple[np.ndarray, np.ndarray]:
        f = self.f
        e = f[0, 1:].copy()
        b = np.array([f[3, 2], f[1, 3], f[2, 1]])
        return e, b

    def invariant_ff(self) -> float:
        """F_{mu nu} F^{mu nu}; equals -2 (E^2 - B^2)."""
        fup = ETA4 @ self.f @ ETA4
        return float(np.einsum("mn,mn->", self.f, fup))


def random_field_tensor(rng: np.random.Generator, scale: float = 1.0) -> FieldTensor4:
    a = rng.normal(size=(4, 4)) * scale
    return FieldTensor4(a - a.T)


@dataclass
class Curvature5:
    """Component tables of the 5-d curvature for one constant field tensor."""

    riemann: np.ndarray   # (5,5,5,5), index 4 is the circle direction
    ricci: np.ndarray     # (5,5)
    scalar: float


def assemble_curvature(F: FieldTensor4) -> Curvature5:
    f = F.f
    riemann = np.zeros((5, 5, 5, 5))
    # 4-d block
    riemann[:4, :4, :4, :4] = 0.25 * (
        np.einsum("ml,rn->mnlr", f, f)
        - np.einsum("nl,rm->mnlr", f, f)
        + 2.0 * np.einsum("mn,rl->mnlr", f, f)
    )
    # two-5 block and its antisymmetry/pair-exchange images; (F eta F) is symmetric
    m2 = f @ ETA4 @ f
    q = 0.25 * m2
    riemann[:4, 4, 4, :4] = q
    riemann[4, :4, 4, :4] = -q
    riemann[:4, 4, :4, 4] = -q
    riemann[4, :4, :4, 4] = q

    ricci = np.zeros((5, 5))
    ricci[:4, :4] = -0.5 * m2
    ricci[4, 4] = 0.25 * float(np.einsum("mn,lr,ml,rn->", ETA4, ETA4, f, f))

    scalar = -0.25 * F.invariant_ff()
    return Curvature5(riemann, ricci, scalar)


def ricci_from_riemann(riemann: np.ndarray) -> np.ndarray:
    """Contraction of the Riemann table that reproduces the assembled Ricci.

    The consistent contraction is over the first and fourth slots,
    R_AB = G^CD R_{C A B D}, with the flat frame metric.
    """
    return np.einsum("cd,cabd->ab", METRIC5, riemann)


def gauss_bonnet(c: Curvature5) -> float:
    """R_ABCD R^ABCD - 4 R_AB R^AB + R^2 with all raises via METRIC5."""
    g = METRIC5
    riem2 = float(np.einsum("abcd,ae,bf,cg,dh,efgh->", c.riemann, g, g, g, g, c.riemann))
    ric2 = float(np.einsum("ab,ac,bd,cd->", c.ricci, g, g, c.ricci))
    return riem2 - 4.0 * ric2 + c.scalar * c.scalar


def gauss_bonnet_closed_form(F: FieldTensor4) -> float:
    """(3/16) [ (F.F)^2 - 2 F_{mu la} F_{nu rho} F^{mu nu} F^{la rho} ]."""
    f = F.f
    fup = ETA4 @ f @ ETA4
    ff = float(np.einsum("mn,mn->", f, fup))
    quartic = float(np.einsum("ml,nr,mn,lr->", f, f, fup, fup))
    return (3.0 / 16.0) * (ff * ff - 2.0 * quartic)


def lagrangian_density(e, b, params) -> float:
    """1/2 (E^2 - B^2) + (3 eps / 2 e^2) (E.B)^2 for constant 3-vectors."""
    e = np.asarray(e, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = float(e @ b)
    return 0.5 * (float(e @ e) - float(b @ b)) + 1.5 * params.epsilon / params.e2 * s * s
