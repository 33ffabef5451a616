#ifndef QDEF_ENTANGLEMENT_HPP
#define QDEF_ENTANGLEMENT_HPP

#include "qdef/deficiency.hpp"
#include "qdef/rng.hpp"
#include "qdef/types.hpp"

namespace qdef {

// Entanglement deficiency relative to the maximally entangled states
// (I (x) U)|Phi+>, |Phi+> = (1/sqrt d) sum_i |ii>. Equal local dimensions
// only; dA != dB is rejected (the d = min(dA,dB) embedding has no worked-out
// optimizer story).

// Maximally entangled state with its parameterizing local unitary.
struct MaxEntWitness {
  Matrix local_u;    // d x d unitary
  PureState vector;  // (I (x) U)|Phi+>, dimension d^2
};

// Build (I (x) U)|Phi+> from a unitary; amplitude at a*d + b is U(b,a)/sqrt d.
MaxEntWitness max_entangled_from_unitary(const Matrix& local_u);

// Exact pure-state value 1 - (sum_i q_i)^2 / d from the Schmidt coefficients,
// witness (1/sqrt d) sum_i |a_i>|b_i> from the Schmidt bases.
DeficiencyResult pure_entanglement_deficiency(const PureState& psi, int dim_a, int dim_b);

// Best <phi|rho|phi> over maximally entangled phi by projected power
// iteration: w = rho u, reshape to the d x d environment matrix, project to
// the closest unitary (polar factor), repeat. Each step is nondecreasing up
// to 1e-12 (asserted; this is the convergence contract); stops when the
// objective moves < 1e-12 or at 5000 iterations. Multistart over `restarts`
// Haar-random initial unitaries, deterministic first-wins tie-break.
DeficiencyResult entangled_fraction(const BipartiteState& state, int restarts, RngStream& rng);

// Brute-force lower bound on the entangled fraction: `samples` Haar-random
// maximally entangled starts, each polished by 100 keep-if-better steps of
// U' = polar(U + eps * Ginibre) with adaptive eps. Deliberately avoids the
// optimizer's rho-driven update so the two routes stay independent.
// d <= 3, samples >= 1e4.
double entangled_fraction_oracle(const BipartiteState& state, int samples, RngStream& rng);

// Dispatch: pure input (tr rho^2 > 1 - 1e-10) takes the Schmidt closed form;
// mixed input runs entangled_fraction with 32 restarts.
DeficiencyResult entanglement_deficiency(const BipartiteState& state);

// Same dispatch with optimizer randomness and restart count under caller
// control (property-test harness re-verification).
DeficiencyResult entanglement_deficiency(const BipartiteState& state, int restarts,
                                         RngStream rng);

}  // namespace qdef

#endif  // QDEF_ENTANGLEMENT_HPP
