"""Numerical toolkit for the nonlinear vacuum electrodynamics in which the
Maxwell Lagrangian is extended by the square of the second field invariant,
(3 eps / 2 e^2) (E.B)^2.

Subpackages cover the curvature-algebra origin of that term (`curvature`),
the pointwise constitutive structure and conserved observables
(`constitutive`), periodic-grid operators (`grid`), explicit time-domain
evolution with conservation diagnostics (`evolution`), the toroidal static
sector with half-integer Legendre radial functions (`toroidal`, `legendre`),
and far-field perturbation theory (`asymptotics`).  `cli` exposes the
scenario runner.
"""

__version__ = "0.1.0"

from .grid import (GridSpec, ScalarField, Vec3Field, curl, div, grad,
                   integrate, read_snapshot, write_snapshot)
from .curvature import (Curvature5, FieldTensor4, assemble_curvature,
                        gauss_bonnet, gauss_bonnet_closed_form,
                        lagrangian_density)
from .constitutive import (CouplingParams, Observables, d_from_e, e_from_d,
                           energy_density, h_from_b, induced_charge,
                           induced_current, observables, poynting, quadruplet)
from .evolution import (DiagnosticsRecord, NonFiniteError, SimState,
                        conservation_residuals, gauss_residual, init_scenario,
                        rhs, rk4_step, run_simulation)
from .legendre import legendre_half, quadrature_oracle
from .toroidal import (RadialProfile, SeedMode, StaticAnsatz, ToroidalMode,
                       ToroidalPoint, b_eta_from_profile, charge_profile,
                       cylindrical_to_toroidal, scale_factors, separated_lhs,
                       separated_source, static_identity_residuals,
                       successive_approximation, toroidal_to_cylindrical)
from .asymptotics import (ZerothOrderParams, falloff_fit,
                          induced_far_field_sources, monopole_dipole_fields)

__all__ = [name for name in dir() if not name.startswith("_")]
