#include "qdef/discrimination.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qdef/coherence.hpp"
#include "qdef/entanglement.hpp"
#include "qdef/qcore.hpp"

namespace qdef {

namespace {

constexpr double kCompletenessTol = 1e-9;
constexpr double kTraceIncreaseTol = 1e-9;
constexpr double kEffectPsdFloor = -1e-10;
constexpr double kOmegaTol = 1e-9;
constexpr double kRatioGuard = 1e-12;
constexpr double kBasisTol = 1e-8;
constexpr double kSimulationTol = 1e-8;

// Extends `first` (assumed normalized) to an orthonormal basis by
// Gram-Schmidt over the columns of a random unitary. At most one fill column
// can collapse onto the span already collected, so d columns always suffice.
Matrix complete_basis(const Vector& first, RngStream& rng) {
  const int d = static_cast<int>(first.size());
  const Matrix fill = haar_unitary(d, rng);
  Matrix basis(d, d);
  basis.col(0) = first;
  int have = 1;
  for (int j = 0; j < d && have < d; ++j) {
    Vector v = fill.col(j);
    for (int i = 0; i < have; ++i) {
      v -= basis.col(i) * basis.col(i).dot(v);
    }
    const double norm = v.norm();
    if (norm < 1e-6) continue;
    basis.col(have++) = v / norm;
  }
  if (have != d) {
    throw InvariantError("basis completion failed to span the space");
  }
  return basis;
}

// Unitary mapping `from` to `to`, uniformly random over the U(d-1) fiber of
// that single constraint: complete both vectors to bases and map one to the
// other.
Matrix constrained_unitary(const Vector& from, const Vector& to, RngStream& rng) {
  const Matrix src = complete_basis(from, rng);
  const Matrix dst = complete_basis(to, rng);
  return dst * src.adjoint();
}

void check_weights(const RealVector& weights) {
  double total = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0) {
      throw InvariantError("strategy weights must be nonnegative");
    }
    total += weights(i);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvariantError("strategy weights must sum to 1");
  }
}

RealVector random_weights(int n, RngStream& rng) {
  RealVector w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.uniform(0.05, 1.0);
  return w / w.sum();
}

}  // namespace

void validate_strategy(const DiscriminationStrategy& strategy) {
  const auto& subs = strategy.ensemble.subchannels;
  const auto& effects = strategy.povm.effects;
  if (subs.empty() || subs.size() != effects.size()) {
    throw InvariantError("strategy needs matching, nonempty subchannel and effect lists");
  }
  if (subs[0].empty()) {
    throw InvariantError("subchannel has no Kraus operators");
  }
  const int d = static_cast<int>(subs[0][0].rows());
  Matrix total = Matrix::Zero(d, d);
  for (const auto& family : subs) {
    if (family.empty()) {
      throw InvariantError("subchannel has no Kraus operators");
    }
    Matrix gram = Matrix::Zero(d, d);
    for (const Matrix& k : family) {
      if (k.rows() != d || k.cols() != d) {
        throw DimensionError("subchannel Kraus operators must be square and same-sized");
      }
      gram += k.adjoint() * k;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.eigenvalues().maxCoeff() > 1.0 + kTraceIncreaseTol) {
      throw InvariantError("subchannel increases trace");
    }
    total += gram;
  }
  if ((total - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kCompletenessTol) {
    throw InvariantError("subchannel ensemble is not trace preserving in total");
  }

  Matrix effect_sum = Matrix::Zero(d, d);
  for (const Matrix& m : effects) {
    if (m.rows() != d || m.cols() != d) {
      throw DimensionError("POVM effect dimension mismatch");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
      throw InvariantError("POVM effect is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.eigenvalues().minCoeff() < kEffectPsdFloor) {
      throw InvariantError("POVM effect is not positive semidefinite");
    }
    effect_sum += m;
  }
  if ((effect_sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kCompletenessTol) {
    throw InvariantError("POVM effects do not sum to the identity");
  }
}

double p_succ(const DiscriminationStrategy& strategy, const DensityOperator& rho) {
  const auto& subs = strategy.ensemble.subchannels;
  const auto& effects = strategy.povm.effects;
  if (subs.size() != effects.size() || subs.empty()) {
    throw InvariantError("strategy needs matching, nonempty subchannel and effect lists");
  }
  const int d = rho.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    Matrix out = Matrix::Zero(d, d);
    for (const Matrix& k : subs[i]) {
      if (k.cols() != d) {
        throw DimensionError("strategy dimension does not match the state");
      }
      out += k * rho.matrix() * k.adjoint();
    }
    total += std::real((effects[i] * out).trace());
  }
  return std::max(0.0, total);
}

GameResult play_game(const DiscriminationStrategy& strategy, const DensityOperator& rho,
                     const DensityOperator& sigma) {
  GameResult result;
  result.p_succ_rho = p_succ(strategy, rho);
  result.p_succ_sigma = p_succ(strategy, sigma);
  if (result.p_succ_sigma > kRatioGuard) {
    result.ratio = result.p_succ_rho / result.p_succ_sigma;
  }
  result.in_omega = std::abs(result.p_succ_sigma - 1.0) <= kOmegaTol;
  return result;
}

DiscriminationStrategy build_perfect_strategy(const PureState& sigma,
                                              const RealVector& weights, const Matrix& basis,
                                              RngStream& rng) {
  const int d = sigma.dim();
  if (weights.size() != d || basis.rows() != d || basis.cols() != d) {
    throw DimensionError("weights and basis must match the state dimension");
  }
  check_weights(weights);
  if ((basis.adjoint() * basis - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kBasisTol) {
    throw InvariantError("strategy basis is not orthonormal");
  }

  DiscriminationStrategy strategy;
  for (int i = 0; i < d; ++i) {
    auto sub = rng.substream("unitary/" + std::to_string(i));
    const Matrix u = constrained_unitary(sigma.amplitudes(), basis.col(i), sub);
    strategy.ensemble.subchannels.push_back({std::sqrt(weights(i)) * u});
    strategy.povm.effects.push_back(basis.col(i) * basis.col(i).adjoint());
  }
  return strategy;
}

DiscriminationStrategy sample_omega_strategy(const PureState& sigma, int k_subchannels,
                                             RngStream& rng) {
  const int d = sigma.dim();
  if (k_subchannels < 1 || k_subchannels > d) {
    throw DimensionError("subchannel count must lie in [1, dim]");
  }
  const int k = k_subchannels;
  const int m = d - k;

  auto basis_rng = rng.substream("basis");
  const Matrix onb = haar_unitary(d, basis_rng);
  auto weight_rng = rng.substream("weights");
  const RealVector weights = random_weights(k, weight_rng);

  // Random PSD partition of the projector onto the unused basis vectors:
  // normalize random Gram matrices against their sum inside that subspace,
  // then lift back. Their sum reproduces the projector exactly.
  std::vector<Matrix> pads(k, Matrix::Zero(d, d));
  if (m > 0) {
    auto pad_rng = rng.substream("padding");
    std::vector<Matrix> grams;
    Matrix total = Matrix::Zero(m, m);
    for (int i = 0; i < k; ++i) {
      Matrix x(m, m);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) x(r, c) = pad_rng.complex_gaussian();
      }
      Matrix gram = x * x.adjoint();
      total += gram;
      grams.push_back(std::move(gram));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(total);
    const double floor = es.eigenvalues().maxCoeff() * 1e-14;
    RealVector inv_sqrt = es.eigenvalues();
    for (int i = 0; i < m; ++i) {
      inv_sqrt(i) = 1.0 / std::sqrt(std::max(inv_sqrt(i), floor));
    }
    const Matrix whiten =
        es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
    const Matrix lift = onb.rightCols(m);
    for (int i = 0; i < k; ++i) {
      const Matrix share = whiten * grams[i] * whiten;
      const Matrix padded = lift * share * lift.adjoint();
      pads[i] = 0.5 * (padded + padded.adjoint());
    }
  }

  DiscriminationStrategy strategy;
  for (int i = 0; i < k; ++i) {
    auto sub = rng.substream("unitary/" + std::to_string(i));
    const Matrix u = constrained_unitary(sigma.amplitudes(), onb.col(i), sub);
    strategy.ensemble.subchannels.push_back({std::sqrt(weights(i)) * u});
    strategy.povm.effects.push_back(onb.col(i) * onb.col(i).adjoint() + pads[i]);
  }
  return strategy;
}

OmegaMinimum min_over_omega(const DensityOperator& rho, const PureState& sigma, int samples,
                            RngStream& rng) {
  const int d = rho.dim();
  if (sigma.dim() != d) {
    throw DimensionError("state and reference state dimensions differ");
  }
  if (samples < 1) {
    throw DimensionError("need at least one sampled strategy");
  }

  OmegaMinimum result;
  const Vector& phi = sigma.amplitudes();
  result.analytic = std::real((phi.adjoint() * rho.matrix() * phi)(0, 0));

  auto attain_rng = rng.substream("attain");
  const RealVector uniform = RealVector::Constant(d, 1.0 / d);
  const DiscriminationStrategy attaining =
      build_perfect_strategy(sigma, uniform, Matrix::Identity(d, d), attain_rng);
  result.empirical_min = p_succ(attaining, rho);

  for (int s = 0; s < samples; ++s) {
    auto sub = rng.substream("sample/" + std::to_string(s));
    const int k = 1 + static_cast<int>(sub.integer(d));
    const DiscriminationStrategy strategy = sample_omega_strategy(sigma, k, sub);
    result.empirical_min = std::min(result.empirical_min, p_succ(strategy, rho));
  }
  return result;
}

DisadvantageResult operational_disadvantage(const DensityOperator& rho,
                                            const DeficiencyMeasure& measure, RngStream& rng) {
  const DeficiencyResult best = measure.solve(rho, rng.substream("optimize"));

  DisadvantageResult result;
  result.value = best.fidelity;
  result.deficiency_cross_check = best.value;
  result.method = best.method;
  result.witness = best.witness;

  // Independent check: the witness's perfect-answer strategy must succeed on
  // rho with probability equal to the optimized fidelity.
  const int d = result.witness.dim();
  auto game_rng = rng.substream("simulate");
  auto basis_rng = game_rng.substream("basis");
  const Matrix basis = haar_unitary(d, basis_rng);
  const RealVector uniform = RealVector::Constant(d, 1.0 / d);
  auto strat_rng = game_rng.substream("strategy");
  const DiscriminationStrategy strategy =
      build_perfect_strategy(result.witness, uniform, basis, strat_rng);
  result.simulated_p_succ = p_succ(strategy, rho);
  result.residual = std::abs(result.simulated_p_succ - result.value);
  if (result.residual > kSimulationTol) {
    throw InvariantError("simulated game disagrees with the optimized fidelity");
  }
  return result;
}

}  // namespace qdef
