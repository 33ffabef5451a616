#ifndef QDEF_FREEOPS_HPP
#define QDEF_FREEOPS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdef/deficiency.hpp"
#include "qdef/rng.hpp"
#include "qdef/types.hpp"

namespace qdef {

// Free operations for the two resource theories, plus the property-test
// harness: selective-measurement monotonicity margins, violation search with
// re-verification, and the executable proof steps (majorization / cross-term
// bound).

enum class ChannelStructure { general, incoherent, permutation_mixture, local_product };
enum class IncoherentFlavor { perm_phase_mixture, basis_measurement, composed };

std::string flavor_name(IncoherentFlavor f);

struct KrausChannel {
  std::vector<Matrix> kraus;
  ChannelStructure structure = ChannelStructure::general;
  // local_product only: kraus[i*factors_b.size() + j] = factors_a[i] (x)
  // factors_b[j].
  std::vector<Matrix> factors_a;
  std::vector<Matrix> factors_b;

  int dim_in() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().cols()); }
  int dim_out() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }
};

// At most one entry of modulus > 1e-12 per column.
bool is_column_structured(const Matrix& k);

// Completeness (sum K^dag K = I within 1e-9) plus the structural promises the
// `structure` flag makes (column structure for incoherent flavors, factor
// consistency for local products). Throws InvariantError / DimensionError.
void validate_channel(const KrausChannel& ch);

// Validate-and-return helper used by everything that assembles channels.
KrausChannel make_channel(std::vector<Matrix> kraus, ChannelStructure structure);

DensityOperator apply_channel(const DensityOperator& rho, const KrausChannel& ch);

struct SelectiveOutcome {
  double prob = 0.0;
  // Null when prob <= 1e-12: the post state is undefined there and the
  // outcome is excluded from deficiency averages.
  std::optional<DensityOperator> post_state;
};

std::vector<SelectiveOutcome> selective_outcomes(const DensityOperator& rho,
                                                 const KrausChannel& ch);

// Incoherent channels from closed families that satisfy completeness by
// construction: permutation x phase mixtures K_n = sqrt(p_n) P_n D_n, basis
// measurements K_n = |s(n)><n|, and compositions of 1-3 such draws.
KrausChannel random_incoherent_channel(int d, IncoherentFlavor flavor, RngStream& rng);

// Local channel {K_A^(n) (x) K_B^(m)} with each factor family drawn as a Haar
// isometry partition (QR of a (n*d) x d Ginibre block, split into n Kraus
// operators). nA = nB = 1 gives a product of Haar unitaries.
KrausChannel random_local_channel(int dim_a, int dim_b, int n_a, int n_b, RngStream& rng);

// Deficiency functional handed to the harness: which resource, how hard the
// optimizer tries, and (for entanglement) the factorization.
struct DeficiencyMeasure {
  Resource resource = Resource::coherence;
  int dim_a = 0;
  int dim_b = 0;
  int restarts = 32;

  DeficiencyResult solve(const DensityOperator& rho, RngStream rng) const;
  double evaluate(const DensityOperator& rho, RngStream rng) const;
};

enum class Verdict { pass, violation, numerical_warn };

std::string verdict_name(Verdict v);

constexpr double kViolationTol = 1e-7;

struct TrialReport {
  std::uint64_t seed = 0;  // seed of the trial's own substream
  int trial = -1;
  Resource resource = Resource::coherence;
  std::string flavor;  // channel family label
  std::vector<int> dims;
  int state_rank = 0;
  std::string state_digest;
  std::string channel_digest;
  double lhs = 0.0;     // sum_n p_n D(rho_n)
  double rhs = 0.0;     // D(rho)
  double margin = 0.0;  // lhs - rhs
  Verdict verdict = Verdict::pass;
  bool re_verified = false;  // margin recomputed at restarts x4
  // Full reproduction payload; serializers embed it for non-pass verdicts.
  Matrix state;
  std::vector<Matrix> kraus;
};

// margin = sum_n p_n D(rho_n) - D(rho) for one (state, channel) pair.
// Refuses structure/resource mismatches: coherence demands an incoherent
// channel, entanglement a local product. Verdict: violation iff margin <
// -tol_violation, numerical_warn for margins in [-tol_violation, 0).
TrialReport monotonicity_margin(const DensityOperator& rho, const KrausChannel& ch,
                                const DeficiencyMeasure& measure, RngStream rng,
                                double tol_violation = kViolationTol);

struct ViolationSearchConfig {
  Resource resource = Resource::coherence;
  int dim = 3;                // coherence dimension
  int dim_a = 2;              // entanglement factors
  int dim_b = 2;
  bool pure_states = false;   // rank-1 inputs instead of mixed
  int state_rank = 0;         // explicit rank; 0 draws uniformly from [2, D]
  IncoherentFlavor flavor = IncoherentFlavor::composed;  // coherence channels
  int trials = 100;
  std::uint64_t seed = 0;
  double tol_violation = kViolationTol;
  int restarts = 32;
};

// Randomized monotonicity search. Deterministic given the seed: trial i uses
// substream "trial/i". Any margin below -tol is re-verified at restarts x4
// before it may be called a violation (an under-converged D(rho) inflates the
// rhs and fakes one). Reports come back sorted by margin ascending, ties by
// trial index.
std::vector<TrialReport> violation_search(const ViolationSearchConfig& config);

// One outcome row of the pure-state monotonicity proof mechanics:
// x = post-state squared Schmidt vector, y_i = q_i^2 |q_{i,n}|^2 / p_n.
struct MajorizationRow {
  double prob = 0.0;
  RealVector x;
  RealVector y;
  bool x_majorizes_y = false;
};

// Produces the per-outcome majorization data underlying the pure-state
// monotonicity argument, for a pure bipartite input and a channel acting on A
// alone (Kraus operators of size dA x dA, lifted as K (x) I internally).
// Outcomes with p <= 1e-12 are skipped.
std::vector<MajorizationRow> majorization_witness(const PureState& psi, const KrausChannel& ch,
                                                  int dim_a, int dim_b);

// max over column pairs (i, j) of sum_n |k_i^(n)| |k_j^(n)| where k_i^(n) is
// the single nonzero entry of column i of K_n. Must be <= 1 + 1e-9 for every
// valid incoherent channel; requires an incoherent-structured channel.
double cross_term_bound(const KrausChannel& ch);

}  // namespace qdef

#endif  // QDEF_FREEOPS_HPP
