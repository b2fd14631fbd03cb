#pragma once
// Energies of a configuration, their exact discrete gradients, and the energy
// identity bookkeeping.
//
// Gradients are adjoint-chain derivatives of the discrete functionals (not
// discretizations of continuum formulas), so descent with backtracking is a
// structural property and finite-difference tests close to round-off.
#include "vortexflow/fields.hpp"

namespace vortexflow {

// ymh = 1/2 (||F||^2 + ||Du||^2 + ||mu||^2)  with plaquette curvature,
// forward covariant differences, and site moment map.
// f_moment = 1/2 ||Phi||^2 with the site-centered residual.
// dbar_energy = 2 ||dbar u||^2 with centered differences.
// pairing = sum_j Im(D_x u_j conj(D_y u_j)) - <mu, avg(*F)> integrated.
// identity_defect = ymh - f_moment - dbar_energy - pairing (bookkeeping; it
// vanishes at second order on holomorphic pairs).
struct EnergyBreakdown {
  double ymh = 0, f_moment = 0, dbar_energy = 0, pairing = 0, identity_defect = 0;
};

double ymh(const Pair& x);
double f_moment(const Pair& x);
double dbar_energy(const Pair& x);
double pairing(const Pair& x);
EnergyBreakdown energy_breakdown(const Pair& x);

// Exact gradient of f_moment; equals the complexified infinitesimal action
// applied to Phi, so the flow stays on the complexified orbit exactly.
TangentPair grad_f(const Pair& x);

// Exact gradient of ymh.
TangentPair grad_ymh(const Pair& x);

// max over sites of sum_j |u_j|^2.
double sup_u2(const Pair& x);

// Site-centered scalar energy density (gauge-invariant observable).
RealSite energy_density(const Pair& x);

// Discrete symplectic pairing on tangent pairs; pairs the infinitesimal
// action with the derivative of <Phi, xi> (moment-map identity).
double omega_pairing(const TangentPair& b, const TangentPair& a);

}  // namespace vortexflow
