#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdef/coherence.hpp"
#include "qdef/freeops.hpp"
#include "qdef/qcore.hpp"

using namespace qdef;

namespace {

DensityOperator plus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState(v).projector();
}

DensityOperator basis_projector(int d, int k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return DensityOperator(m);
}

KrausChannel identity_channel(int d) {
  return make_channel({Matrix::Identity(d, d)}, ChannelStructure::incoherent);
}

KrausChannel dephasing_channel(int d) {
  std::vector<Matrix> kraus;
  for (int i = 0; i < d; ++i) {
    Matrix k = Matrix::Zero(d, d);
    k(i, i) = 1.0;
    kraus.push_back(k);
  }
  return make_channel(std::move(kraus), ChannelStructure::incoherent);
}

// {identity w.p. 0.3, swap w.p. 0.7} on a qubit.
KrausChannel id_swap_mixture() {
  Matrix id = Matrix::Identity(2, 2) * std::sqrt(0.3);
  Matrix swap(2, 2);
  swap << 0.0, std::sqrt(0.7), std::sqrt(0.7), 0.0;
  return make_channel({id, swap}, ChannelStructure::permutation_mixture);
}

}  // namespace

TEST_CASE("channel validation: completeness and structure flags") {
  CHECK_THROWS_AS(make_channel({Matrix::Identity(2, 2) * 0.5}, ChannelStructure::general),
                  InvariantError);
  Matrix hadamard(2, 2);
  hadamard << 1, 1, 1, -1;
  hadamard /= std::sqrt(2.0);
  // Unitary but not column-structured: must be rejected under the incoherent
  // flag and accepted as general.
  CHECK_THROWS_AS(make_channel({hadamard}, ChannelStructure::incoherent), InvariantError);
  CHECK_NOTHROW(make_channel({hadamard}, ChannelStructure::general));
  CHECK(is_column_structured(Matrix::Identity(3, 3)));
  CHECK_FALSE(is_column_structured(hadamard));
}

TEST_CASE("apply_channel: identity, dephasing, permutation mixture") {
  RngStream rng(109);
  DensityOperator rho = random_density(3, 3, rng);
  CHECK((apply_channel(rho, identity_channel(3)).matrix() - rho.matrix()).cwiseAbs().maxCoeff() <
        1e-12);

  DensityOperator dephased = apply_channel(rho, dephasing_channel(3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex expected = i == j ? rho.matrix()(i, i) : Complex(0.0);
      CHECK(std::abs(dephased.matrix()(i, j) - expected) < 1e-12);
    }
  }

  DensityOperator out = apply_channel(basis_projector(2, 0), id_swap_mixture());
  CHECK(std::abs(out.matrix()(0, 0) - Complex(0.3)) < 1e-12);
  CHECK(std::abs(out.matrix()(1, 1) - Complex(0.7)) < 1e-12);

  CHECK_THROWS_AS(apply_channel(rho, identity_channel(2)), DimensionError);
}

TEST_CASE("selective_outcomes: frozen examples and resummation") {
  // Unitary channel: one outcome with p = 1.
  auto outs = selective_outcomes(plus_state(), identity_channel(2));
  REQUIRE(outs.size() == 1);
  CHECK(outs[0].prob == doctest::Approx(1.0).epsilon(1e-12));

  // Basis measurement on |+>: p = 0.5 each, posts |0><0| and |1><1|.
  auto meas = selective_outcomes(plus_state(), dephasing_channel(2));
  REQUIRE(meas.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(meas[i].prob == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(meas[i].post_state.has_value());
    CHECK((meas[i].post_state->matrix() - basis_projector(2, i).matrix()).cwiseAbs().maxCoeff() <
          1e-12);
  }

  // Permutation mixture {id 0.3, swap 0.7} on |0><0|.
  auto mix = selective_outcomes(basis_projector(2, 0), id_swap_mixture());
  REQUIRE(mix.size() == 2);
  CHECK(mix[0].prob == doctest::Approx(0.3).epsilon(1e-12));
  CHECK((mix[0].post_state->matrix() - basis_projector(2, 0).matrix()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(mix[1].prob == doctest::Approx(0.7).epsilon(1e-12));
  CHECK((mix[1].post_state->matrix() - basis_projector(2, 1).matrix()).cwiseAbs().maxCoeff() <
        1e-12);

  // Probabilities sum to 1 and sum p_n rho_n = Phi(rho) on random input.
  RngStream rng(113);
  for (int trial = 0; trial < 25; ++trial) {
    auto sub = rng.substream("t/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(3));
    DensityOperator rho = random_density(d, d, sub);
    auto sc = sub.substream("ch");
    KrausChannel ch = random_incoherent_channel(d, IncoherentFlavor::composed, sc);
    auto outcomes = selective_outcomes(rho, ch);
    double total = 0.0;
    Matrix resum = Matrix::Zero(d, d);
    for (const auto& o : outcomes) {
      total += o.prob;
      if (o.post_state) resum += o.prob * o.post_state->matrix();
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((resum - apply_channel(rho, ch).matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("incoherent generator: structure, completeness, cross-term bound") {
  RngStream rng(127);
  for (int trial = 0; trial < 60; ++trial) {
    auto sub = rng.substream("g/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(4));
    const auto flavor = static_cast<IncoherentFlavor>(trial % 3);
    KrausChannel ch = random_incoherent_channel(d, flavor, sub);
    CHECK_NOTHROW(validate_channel(ch));
    for (const Matrix& k : ch.kraus) CHECK(is_column_structured(k));
    CHECK(cross_term_bound(ch) <= 1.0 + 1e-9);

    if (flavor == IncoherentFlavor::basis_measurement) {
      CHECK(static_cast<int>(ch.kraus.size()) == d);
      Matrix acc = Matrix::Zero(d, d);
      for (const Matrix& k : ch.kraus) acc += k.adjoint() * k;
      CHECK((acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-15);
    }
    if (flavor == IncoherentFlavor::perm_phase_mixture) {
      // Every Kraus has exactly one nonzero per column, all of modulus
      // sqrt(p_n).
      for (const Matrix& k : ch.kraus) {
        const double first = std::abs(k.col(0).cwiseAbs().maxCoeff());
        for (int col = 0; col < d; ++col) {
          CHECK(k.col(col).cwiseAbs().maxCoeff() == doctest::Approx(first).epsilon(1e-12));
        }
      }
    }
  }
  RngStream bad(1);
  CHECK_THROWS_AS(random_incoherent_channel(1, IncoherentFlavor::composed, bad),
                  DimensionError);
}

TEST_CASE("local generator: completeness, product outcomes stay product") {
  RngStream rng(131);
  for (int trial = 0; trial < 30; ++trial) {
    auto sub = rng.substream("t/" + std::to_string(trial));
    const int da = 2 + static_cast<int>(sub.integer(2));
    const int db = 2 + static_cast<int>(sub.integer(2));
    const int na = 1 + static_cast<int>(sub.integer(3));
    const int nb = 1 + static_cast<int>(sub.integer(3));
    auto sc = sub.substream("ch");
    KrausChannel ch = random_local_channel(da, db, na, nb, sc);
    CHECK(ch.structure == ChannelStructure::local_product);
    CHECK(static_cast<int>(ch.kraus.size()) == na * nb);
    CHECK_NOTHROW(validate_channel(ch));
  }

  // nA = nB = 1: both factors unitary.
  auto s1 = rng.substream("unitary");
  KrausChannel u = random_local_channel(2, 2, 1, 1, s1);
  CHECK((u.factors_a[0].adjoint() * u.factors_a[0] - Matrix::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((u.factors_b[0].adjoint() * u.factors_b[0] - Matrix::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  // Product input stays product under every selective outcome.
  auto s2 = rng.substream("prod");
  DensityOperator ra = random_density(2, 2, s2);
  DensityOperator rb = random_density(2, 2, s2);
  DensityOperator prod(kron(ra.matrix(), rb.matrix()));
  auto s3 = rng.substream("prodch");
  KrausChannel ch = random_local_channel(2, 2, 2, 2, s3);
  for (const auto& o : selective_outcomes(prod, ch)) {
    if (!o.post_state) continue;
    BipartiteState post(*o.post_state, 2, 2);
    const Matrix rebuilt =
        kron(partial_trace(post, true).matrix(), partial_trace(post, false).matrix());
    CHECK((post.rho().matrix() - rebuilt).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("monotonicity_margin: identity is exactly zero; mismatches refused") {
  RngStream rng(137);
  DensityOperator rho = random_density(3, 3, rng);
  DeficiencyMeasure coh{Resource::coherence, 0, 0, 16};
  TrialReport r = monotonicity_margin(rho, identity_channel(3), coh, rng.substream("id"));
  CHECK(std::abs(r.margin) < 1e-12);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));

  // Coherence measure refuses non-incoherent channels.
  auto sl = rng.substream("local");
  KrausChannel local = random_local_channel(2, 2, 2, 1, sl);
  DeficiencyMeasure coh4{Resource::coherence, 0, 0, 8};
  DensityOperator rho4 = random_density(4, 4, rng);
  CHECK_THROWS_AS(monotonicity_margin(rho4, local, coh4, rng.substream("x")), InvariantError);
  // Entanglement measure refuses incoherent (non-local) channels.
  DeficiencyMeasure ent{Resource::entanglement, 2, 2, 8};
  CHECK_THROWS_AS(monotonicity_margin(rho4, dephasing_channel(4), ent, rng.substream("y")),
                  InvariantError);
}

TEST_CASE("permutation-mixture margins vanish to optimizer precision") {
  // Conjugation by P D leaves the phase-state set invariant, so every outcome
  // has the input's deficiency and the margin is 0 up to optimizer noise.
  RngStream rng(139);
  for (int trial = 0; trial < 20; ++trial) {
    auto sub = rng.substream("t/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(3));
    DensityOperator rho = random_density(d, d, sub);
    auto sc = sub.substream("ch");
    KrausChannel ch = random_incoherent_channel(d, IncoherentFlavor::perm_phase_mixture, sc);
    DeficiencyMeasure coh{Resource::coherence, 0, 0, 32};
    TrialReport r = monotonicity_margin(rho, ch, coh, sub.substream("m"));
    CHECK(r.margin >= -1e-8);
    CHECK(std::abs(r.margin) < 1e-6);
  }
}

TEST_CASE("D2b coherence: pure states, incoherent channels, d in 2..5") {
  RngStream rng(149);
  int warns = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto sub = rng.substream("t/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(4));
    DensityOperator rho = random_pure(d, sub).projector();
    auto sc = sub.substream("ch");
    const auto flavor = static_cast<IncoherentFlavor>(sub.integer(3));
    KrausChannel ch = random_incoherent_channel(d, flavor, sc);
    DeficiencyMeasure coh{Resource::coherence, 0, 0, 32};
    TrialReport r = monotonicity_margin(rho, ch, coh, sub.substream("m"));
    CHECK(r.margin >= -1e-7);
    if (r.verdict != Verdict::pass) ++warns;
  }
  (void)warns;
}

TEST_CASE("U-D2b coherence holds at d <= 3 with the true optimizer") {
  ViolationSearchConfig config;
  config.resource = Resource::coherence;
  config.dim = 3;
  config.flavor = IncoherentFlavor::composed;
  config.trials = 150;
  config.seed = 424242;
  auto reports = violation_search(config);
  REQUIRE(static_cast<int>(reports.size()) == config.trials);
  int violations = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::violation) ++violations;
  }
  CHECK(violations == 0);
  CHECK(reports.front().margin <= reports.back().margin);  // sorted ascending
}

TEST_CASE("U-D2b entanglement at 2x2: genuine violations exist and re-verify") {
  // The average entangled fraction can rise under selective local channels on
  // mixed two-qubit states, so the harness must find real, re-verified
  // violations in a modest random sample. This is the counterexample regime
  // for the universal-monotonicity claim at 2x2.
  ViolationSearchConfig config;
  config.resource = Resource::entanglement;
  config.dim_a = 2;
  config.dim_b = 2;
  config.trials = 60;
  config.seed = 20260814;
  config.tol_violation = 1e-6;
  auto reports = violation_search(config);
  int violations = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::violation) {
      ++violations;
      CHECK(r.re_verified);
      CHECK(r.margin < -1e-6);
      CHECK_FALSE(r.kraus.empty());
      CHECK(r.state.rows() == 4);
    }
  }
  CHECK(violations > 0);
}

TEST_CASE("majorization witness: unitary channel, random channels, Schur step") {
  RngStream rng(151);

  // Unitary on A: x = y up to sorting.
  auto su = rng.substream("u");
  PureState psi = random_pure(4, su);
  KrausChannel uch = make_channel({haar_unitary(2, su)}, ChannelStructure::general);
  auto rows = majorization_witness(psi, uch, 2, 2);
  REQUIRE(rows.size() == 1);
  RealVector xs = rows[0].x, ys = rows[0].y;
  std::sort(xs.data(), xs.data() + xs.size());
  std::sort(ys.data(), ys.data() + ys.size());
  CHECK((xs - ys).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(rows[0].x_majorizes_y);

  // Product input: x = (1, 0), majorizes anything.
  Vector prod = Vector::Zero(4);
  prod(2) = 1.0;
  auto sp = rng.substream("p");
  KrausChannel pch = random_local_channel(2, 2, 2, 1, sp);
  // Extract the A-side family as a channel on A alone.
  KrausChannel a_side = make_channel(pch.factors_a, ChannelStructure::general);
  for (const auto& row : majorization_witness(PureState(prod), a_side, 2, 2)) {
    CHECK(row.x(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row.x_majorizes_y);
  }

  // 200 random pairs: majorization always holds, and so does the
  // Schur-concavity step sum sqrt(x_i x_j) <= sum sqrt(y_i y_j).
  for (int trial = 0; trial < 200; ++trial) {
    auto sub = rng.substream("t/" + std::to_string(trial));
    PureState state = random_pure(4, sub);
    auto sc = sub.substream("ch");
    const int n_a = 1 + static_cast<int>(sc.integer(3));
    KrausChannel family = make_channel(
        random_local_channel(2, 2, n_a, 1, sc).factors_a, ChannelStructure::general);
    for (const auto& row : majorization_witness(state, family, 2, 2)) {
      CHECK(row.x_majorizes_y);
      double sx = 0.0, sy = 0.0;
      for (int i = 0; i < row.x.size(); ++i) {
        for (int j = 0; j < row.x.size(); ++j) {
          sx += std::sqrt(std::max(0.0, row.x(i) * row.x(j)));
          sy += std::sqrt(std::max(0.0, row.y(i) * row.y(j)));
        }
      }
      CHECK(sx <= sy + 1e-9);
    }
  }

  // Non-square / wrong-dimension channels are refused.
  CHECK_THROWS_AS(majorization_witness(psi, dephasing_channel(4), 2, 2), DimensionError);
}

TEST_CASE("violation_search: deterministic given seed") {
  ViolationSearchConfig config;
  config.resource = Resource::coherence;
  config.dim = 2;
  config.trials = 40;
  config.seed = 777;
  auto a = violation_search(config);
  auto b = violation_search(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].trial == b[i].trial);
    CHECK(a[i].margin == b[i].margin);  // bitwise equality expected
    CHECK(a[i].state_digest == b[i].state_digest);
    CHECK(a[i].channel_digest == b[i].channel_digest);
  }
}
