#pragma once

#include <optional>
#include <vector>

#include "qdef/deficiency.hpp"
#include "qdef/freeops.hpp"
#include "qdef/rng.hpp"
#include "qdef/types.hpp"

namespace qdef {

// Subchannel discrimination game: a referee applies one of several
// trace-nonincreasing maps to the input state and the player guesses which
// one was applied by measuring a POVM. The success probability is
//   P = sum_i tr(M_i Psi_i(rho)).

// The referee's side: subchannels[i] is the Kraus family of the i-th
// trace-nonincreasing map. Individually each family may lose trace, but the
// sum over all subchannels must be trace preserving.
struct SubchannelEnsemble {
  std::vector<std::vector<Matrix>> subchannels;
};

// The player's side: a positive operator-valued measure, one effect per
// subchannel.
struct Povm {
  std::vector<Matrix> effects;
};

struct DiscriminationStrategy {
  SubchannelEnsemble ensemble;
  Povm povm;
};

// One evaluated game against a reference state. `ratio` is empty when the
// reference success probability is too small to divide by (cannot happen for
// strategies that answer the reference perfectly, but user-supplied
// strategies get the guard). `in_omega` records whether the strategy answers
// the reference state with certainty.
struct GameResult {
  double p_succ_rho = 0.0;
  double p_succ_sigma = 0.0;
  std::optional<double> ratio;
  bool in_omega = false;
};

// Checks ensemble/POVM invariants: equal index counts, consistent square
// dimensions, each subchannel trace nonincreasing, the total map trace
// preserving, each effect PSD, effects summing to the identity.
void validate_strategy(const DiscriminationStrategy& strategy);

// Success probability sum_i tr(M_i Psi_i(rho)), clamped below at zero against
// roundoff on vanishing outcomes.
double p_succ(const DiscriminationStrategy& strategy, const DensityOperator& rho);

GameResult play_game(const DiscriminationStrategy& strategy, const DensityOperator& rho,
                     const DensityOperator& sigma);

// Strategy that answers the pure reference state with certainty and, on any
// other input, succeeds with probability exactly <phi|rho|phi>: subchannel i
// applies a unitary sending |phi> to the i-th basis vector (with probability
// weights[i]), and effect i projects onto that basis vector. The unitaries
// are completed from the single constraint by orthonormalizing random fill.
DiscriminationStrategy build_perfect_strategy(const PureState& sigma,
                                              const RealVector& weights, const Matrix& basis,
                                              RngStream& rng);

// Strategy that still answers the reference perfectly but with slack: k
// unitary subchannels send |phi> to the first k vectors of a random
// orthonormal basis, and each projective effect is padded with a share of a
// random PSD partition of the remaining subspace. With k = d the padding is
// empty and the form reduces to build_perfect_strategy's.
DiscriminationStrategy sample_omega_strategy(const PureState& sigma, int k_subchannels,
                                             RngStream& rng);

// Minimum success probability on rho over strategies that answer sigma with
// certainty. `analytic` is the closed-form minimum <phi|rho|phi>;
// `empirical_min` is the minimum over `samples` random such strategies plus
// the constructed strategy that attains the bound.
struct OmegaMinimum {
  double analytic = 0.0;
  double empirical_min = 0.0;
};

OmegaMinimum min_over_omega(const DensityOperator& rho, const PureState& sigma, int samples,
                            RngStream& rng);

// Best guaranteed success probability for rho against the full set of
// maximal resource states: value = max_sigma min over perfect-answer
// strategies, computed by the corresponding deficiency optimizer and
// re-checked by simulating the witness's constructed strategy.
struct DisadvantageResult {
  double value = 0.0;
  double deficiency_cross_check = 0.0;  // 1 - value
  double simulated_p_succ = 0.0;        // constructed strategy evaluated on rho
  double residual = 0.0;                // |simulated_p_succ - value|
  Method method = Method::closed_form;
  PureState witness;
};

DisadvantageResult operational_disadvantage(const DensityOperator& rho,
                                            const DeficiencyMeasure& measure, RngStream& rng);

}  // namespace qdef
