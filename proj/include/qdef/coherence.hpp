#ifndef QDEF_COHERENCE_HPP
#define QDEF_COHERENCE_HPP

#include "qdef/deficiency.hpp"
#include "qdef/rng.hpp"
#include "qdef/types.hpp"

namespace qdef {

// Coherence deficiency: distance of rho from the maximally coherent states
// |psi_theta> = (1/sqrt d) sum_i e^{i theta_i}|i>, D = 1 - max_theta f(theta)
// with f(theta) = <psi_theta|rho|psi_theta>.

// f(theta) for a full phase vector (angles.size() == d; the global phase is
// physically irrelevant but accepted as given).
double phase_objective(const DensityOperator& rho, const RealVector& angles);

// 1 - (sum_ij |rho_ij|) / d. Always a valid lower bound on the deficiency
// (triangle inequality), with equality exactly when the off-diagonal phases
// admit a consistent alignment. May be negative for near-maximal states; not
// clamped.
double l1_lower_bound(const DensityOperator& rho);

// Exact coordinate ascent over phases: each update maximizes f along one
// angle in closed form (theta_k = arg sum_{j != k} rho_kj u_j), so f never
// decreases. Multistart: restart 0 starts from zero angles, the rest from
// uniform random angles. Converged when a full sweep moves f by < 1e-12
// (cap: 1e4 sweeps). Deterministic tie-break: the first restart reaching the
// best value wins.
DeficiencyResult coherence_fidelity_ascent(const DensityOperator& rho, int restarts,
                                           RngStream& rng);

struct OracleResult {
  double value = 0.0;       // best grid fidelity: a lower bound on the max
  double gap = 0.0;         // rigorous bound on (true max - value)
  RealVector best_angles;   // full phase vector (angle 0 fixed at 0)
};

// Brute-force grid over (d-1) phases, grid_points_per_angle each. The gap is
// a second-order Taylor bound: the curvature of f along any direction is at
// most (2/d)(sum_{j>0}|rho_0j| + 4 sum_{0<i<j}|rho_ij|) per unit step, and
// the optimum lies within h/2 = pi/grid of a grid point per axis. Cost grows
// as grid^(d-1): d <= 4 only, grid >= 8.
OracleResult coherence_fidelity_oracle(const DensityOperator& rho, int grid_points_per_angle);

// The analytic d <= 3 expression F = (sum_ij |rho_ij|)/d with its witness
// built by aligning phases along a spanning forest of the nonzero
// off-diagonal graph. The reported fidelity is the formula value; the witness
// achieves it exactly when the state is phase-consistent (always for d = 2
// and for pure states; NOT for generic mixed d = 3, where the formula
// overshoots the true maximum).
DeficiencyResult coherence_closed_form(const DensityOperator& rho);

// Dispatch used by everything downstream:
//   - d <= 3: closed form, accepted only if its witness certifies it
//     (achieved == formula within 1e-10); otherwise fall through to ascent.
//     The fall-through is the repair for phase-inconsistent mixed d = 3
//     states, where the bare formula exceeds the true maximum.
//   - pure states of any d: closed form (equality is exact there).
//   - everything else: coordinate ascent, 32 restarts.
// The result always reports value >= l1 bound - 1e-9 via bound_gap, and its
// witness always achieves the reported fidelity.
DeficiencyResult coherence_deficiency(const DensityOperator& rho);

// Same dispatch but with the optimizer's randomness and restart count under
// caller control (used by the property-test harness for re-verification).
DeficiencyResult coherence_deficiency(const DensityOperator& rho, int restarts, RngStream rng);

}  // namespace qdef

#endif  // QDEF_COHERENCE_HPP
