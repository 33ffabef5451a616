#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "qdef/qcore.hpp"

using namespace qdef;

namespace {

const Complex kI(0.0, 1.0);

DensityOperator diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return DensityOperator(m);
}

DensityOperator max_mixed(int d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

PureState basis_state(int d, int k) {
  Vector v = Vector::Zero(d);
  v(k) = 1.0;
  return PureState(v);
}

// Independent fidelity evaluation: singular values of sqrt(sigma)*sqrt(rho),
// each square root from its own eigendecomposition. Deliberately a different
// route from the library's rank-branched computation.
double fidelity_reference(const Matrix& sigma, const Matrix& rho) {
  auto sqrtm = [](const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    RealVector v = es.eigenvalues();
    for (int i = 0; i < v.size(); ++i) v(i) = v(i) > 0 ? std::sqrt(v(i)) : 0.0;
    return Matrix(es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint());
  };
  Eigen::JacobiSVD<Matrix> svd(sqrtm(sigma) * sqrtm(rho));
  const double s = svd.singularValues().sum();
  return s * s;
}

}  // namespace

TEST_CASE("fidelity: frozen two-level example") {
  // F(diag(1/2,1/2), diag(3/4,1/4)) = (sqrt(3/8) + sqrt(1/8))^2.
  const double expected = 0.9330127018922193;
  CHECK(fidelity(diag2(0.5, 0.5), diag2(0.75, 0.25)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fidelity_reference(diag2(0.5, 0.5).matrix(), diag2(0.75, 0.25).matrix()) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fidelity: identity, orthogonality, rank-1 branch") {
  RngStream rng(7);
  for (int d : {2, 3, 5}) {
    auto sub = rng.substream("id/" + std::to_string(d));
    DensityOperator rho = random_density(d, d, sub);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(fidelity(basis_state(2, 0).projector(), basis_state(2, 1).projector()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Pure vs mixed goes through <phi|rho|phi>.
  CHECK(fidelity(basis_state(2, 0).projector(), max_mixed(2)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fidelity(max_mixed(2), basis_state(2, 0).projector()) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fidelity: symmetry, unitary invariance, reference agreement") {
  RngStream rng(11);
  // Full-rank pairs: sqrt(sigma) is well conditioned, so the tight bounds
  // apply.
  for (int trial = 0; trial < 100; ++trial) {
    auto sub = rng.substream("pair/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(3));
    auto s1 = sub.substream("a");
    auto s2 = sub.substream("b");
    auto s3 = sub.substream("u");
    DensityOperator sigma = random_density(d, d, s1);
    DensityOperator rho = random_density(d, d, s2);
    const double f = fidelity(sigma, rho);
    CHECK(f == doctest::Approx(fidelity(rho, sigma)).epsilon(1e-10));
    Matrix u = haar_unitary(d, s3);
    DensityOperator usig(u * sigma.matrix() * u.adjoint());
    DensityOperator urho(u * rho.matrix() * u.adjoint());
    CHECK(fidelity(usig, urho) == doctest::Approx(f).epsilon(1e-9));
    CHECK(f >= -1e-12);
    CHECK(f <= 1.0 + 1e-12);
  }
  // Mixed-rank pairs against the independent reference. sqrt of a
  // rank-deficient PSD matrix is only sqrt(eps)-accurate, so agreement can't
  // be pushed past ~1e-8.
  for (int trial = 0; trial < 60; ++trial) {
    auto sub = rng.substream("lowrank/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(3));
    auto s1 = sub.substream("a");
    auto s2 = sub.substream("b");
    DensityOperator sigma = random_density(d, 1 + static_cast<int>(s1.integer(d)), s1);
    DensityOperator rho = random_density(d, 1 + static_cast<int>(s2.integer(d)), s2);
    const double f = fidelity(sigma, rho);
    CHECK(f == doctest::Approx(fidelity(rho, sigma)).epsilon(1e-7));
    CHECK(f == doctest::Approx(fidelity_reference(sigma.matrix(), rho.matrix())).epsilon(1e-7));
  }
}

TEST_CASE("schmidt: frozen two-qubit example") {
  // sqrt(0.8)|01> + sqrt(0.2)|10>.
  Vector v = Vector::Zero(4);
  v(1) = std::sqrt(0.8);
  v(2) = std::sqrt(0.2);
  SchmidtData sd = schmidt(PureState(v), 2, 2);
  REQUIRE(sd.coefficients.size() == 2);
  CHECK(sd.coefficients(0) == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
  CHECK(sd.coefficients(1) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
}

TEST_CASE("schmidt: product state and maximally entangled state") {
  Vector bell(4);
  bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  SchmidtData sd = schmidt(PureState(bell), 2, 2);
  CHECK(sd.coefficients(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sd.coefficients(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  Vector prod = Vector::Zero(6);  // |0> (x) |2> in 2x3
  prod(2) = 1.0;
  SchmidtData sp = schmidt(PureState(prod), 2, 3);
  CHECK(sp.coefficients(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sp.coefficients(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("schmidt: reconstruction and orthonormality on random states") {
  RngStream rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto sub = rng.substream("schmidt/" + std::to_string(trial));
    const int da = 2 + static_cast<int>(sub.integer(3));
    const int db = 2 + static_cast<int>(sub.integer(3));
    PureState psi = random_pure(da * db, sub);
    SchmidtData sd = schmidt(psi, da, db);
    const int k = static_cast<int>(sd.coefficients.size());
    REQUIRE(k == std::min(da, db));
    // Descending, nonnegative, unit two-norm.
    double sq = 0.0;
    for (int i = 0; i < k; ++i) {
      CHECK(sd.coefficients(i) >= -1e-14);
      if (i > 0) CHECK(sd.coefficients(i) <= sd.coefficients(i - 1) + 1e-14);
      sq += sd.coefficients(i) * sd.coefficients(i);
    }
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((sd.basis_a.adjoint() * sd.basis_a - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((sd.basis_b.adjoint() * sd.basis_b - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <
          1e-10);
    Vector rebuilt = Vector::Zero(da * db);
    for (int i = 0; i < k; ++i) {
      rebuilt += sd.coefficients(i) * kron(Vector(sd.basis_a.col(i)), Vector(sd.basis_b.col(i)));
    }
    CHECK((rebuilt - psi.amplitudes()).norm() < 1e-10);
  }
}

TEST_CASE("partial trace: product and entangled examples") {
  RngStream rng(17);
  auto s1 = rng.substream("a");
  auto s2 = rng.substream("b");
  DensityOperator ra = random_density(2, 2, s1);
  DensityOperator rb = random_density(3, 3, s2);
  BipartiteState prod(DensityOperator(kron(ra.matrix(), rb.matrix())), 2, 3);
  CHECK((partial_trace(prod, true).matrix() - ra.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(prod, false).matrix() - rb.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  Vector bell(4);
  bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  BipartiteState bp(PureState(bell).projector(), 2, 2);
  CHECK((partial_trace(bp, true).matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
        1e-12);

  // Both reductions of a pure state share their eigenvalue multiset.
  for (int trial = 0; trial < 20; ++trial) {
    auto sub = rng.substream("pure/" + std::to_string(trial));
    PureState psi = random_pure(6, sub);
    BipartiteState st(psi.projector(), 2, 3);
    Eigen::SelfAdjointEigenSolver<Matrix> ea(partial_trace(st, true).matrix());
    Eigen::SelfAdjointEigenSolver<Matrix> eb(partial_trace(st, false).matrix());
    // dB > dA: B's spectrum carries an extra zero.
    CHECK(ea.eigenvalues()(0) == doctest::Approx(eb.eigenvalues()(1)).epsilon(1e-10));
    CHECK(ea.eigenvalues()(1) == doctest::Approx(eb.eigenvalues()(2)).epsilon(1e-10));
    CHECK(eb.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("haar_unitary: unitarity and first moment") {
  RngStream rng(19);
  for (int d : {1, 2, 3, 5}) {
    auto sub = rng.substream("u/" + std::to_string(d));
    Matrix u = haar_unitary(d, sub);
    CHECK((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // E|U_00|^2 = 1/d for Haar; 1e5 samples puts the mean well inside +-0.01.
  auto sub = rng.substream("moment");
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += std::norm(haar_unitary(2, sub)(0, 0));
  CHECK(std::abs(acc / n - 0.5) < 0.01);
}

TEST_CASE("random_density: trace, rank, purity") {
  RngStream rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto sub = rng.substream("rho/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(4));
    const int rank = 1 + static_cast<int>(sub.integer(d));
    DensityOperator rho = random_density(d, rank, sub);
    CHECK(std::abs(rho.matrix().trace() - Complex(1.0)) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    int numerical_rank = 0;
    for (int i = 0; i < d; ++i) {
      if (es.eigenvalues()(i) > 1e-12) ++numerical_rank;
    }
    CHECK(numerical_rank == rank);
    CHECK(rho.is_pure() == (rank == 1));
  }
}

TEST_CASE("principal_component: recovers pure states, picks dominant branch") {
  RngStream rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    auto sub = rng.substream("pc/" + std::to_string(trial));
    const int d = 2 + static_cast<int>(sub.integer(4));
    PureState psi = random_pure(d, sub);
    PureState back = principal_component(psi.projector());
    // Agreement up to global phase.
    const Complex overlap = (back.amplitudes().adjoint() * psi.amplitudes())(0);
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
  }
  // Mixture 0.8 |0><0| + 0.2 |1><1|: the dominant eigenvector is |0>.
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.8;
  m(1, 1) = 0.2;
  PureState top = principal_component(DensityOperator(m));
  CHECK(std::abs(top.amplitudes()(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("majorizes: examples and properties") {
  RealVector a(3), b(3), u(3);
  a << 0.7, 0.2, 0.1;
  b << 0.5, 0.3, 0.2;
  u << 1.0 / 3, 1.0 / 3, 1.0 / 3;
  CHECK(majorizes(a, b));
  CHECK_FALSE(majorizes(b, a));
  CHECK(majorizes(b, u));
  CHECK(majorizes(a, u));
  CHECK(majorizes(a, a));
  // Sorting is internal: permuted input answers the same.
  RealVector ap(3);
  ap << 0.1, 0.7, 0.2;
  CHECK(majorizes(ap, b));
  // Incomparable pair.
  RealVector c(3), e(3);
  c << 0.6, 0.35, 0.05;
  e << 0.65, 0.2, 0.15;
  CHECK_FALSE(majorizes(c, e));
  CHECK_FALSE(majorizes(e, c));

  RealVector neg(2), short2(2), sum_off(3);
  neg << -0.5, 1.5;
  short2 << 0.5, 0.5;
  sum_off << 0.5, 0.3, 0.3;
  CHECK_THROWS_AS(majorizes(neg, short2), InvariantError);
  CHECK_THROWS_AS(majorizes(a, short2), DimensionError);
  CHECK_THROWS_AS(majorizes(a, sum_off), InvariantError);
}

TEST_CASE("kron: ordering convention |a>|b> -> a*dB + b") {
  Vector ea = Vector::Zero(2), eb = Vector::Zero(3);
  ea(1) = 1.0;
  eb(2) = 1.0;
  Vector v = kron(ea, eb);  // |1> (x) |2> must land at 1*3 + 2 = 5
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(v(i) - (i == 5 ? 1.0 : 0.0)) < 1e-15);
  }
  Matrix x(2, 2), y(2, 2);
  x << 0, 1, 1, 0;
  y << 1, 0, 0, -1;
  Matrix k = kron(x, y);
  CHECK(std::abs(k(0, 2) - 1.0) < 1e-15);
  CHECK(std::abs(k(1, 3) + 1.0) < 1e-15);
}

TEST_CASE("validation: malformed operators are rejected") {
  Matrix nh(2, 2);
  nh << 0.5, 0.1 + 0.2 * kI, 0.1 + 0.2 * kI, 0.5;  // equal corners: not Hermitian
  CHECK_THROWS_AS(DensityOperator{nh}, InvariantError);

  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator{bad_trace}, InvariantError);

  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityOperator{neg}, InvariantError);

  Vector unnorm(2);
  unnorm << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{unnorm}, InvariantError);

  CHECK_THROWS_AS(BipartiteState(max_mixed(4), 3, 2), DimensionError);

  RngStream rng(1);
  CHECK_THROWS_AS(random_density(2, 3, rng), DimensionError);
  CHECK_THROWS_AS(haar_unitary(0, rng), DimensionError);
  Vector empty;
  CHECK_THROWS_AS(PureState{empty}, DimensionError);
}

TEST_CASE("rng: substream determinism and independence") {
  RngStream root(12345);
  auto a1 = root.substream("trial/17/state");
  auto a2 = root.substream("trial/17/state");
  auto b = root.substream("trial/18/state");
  for (int i = 0; i < 16; ++i) {
    CHECK(a1.uniform() == a2.uniform());
  }
  // Consuming draws from the root must not shift derivations.
  RngStream root2(12345);
  root2.uniform();
  root2.gaussian();
  auto a3 = root2.substream("trial/17/state");
  auto a4 = root.substream("trial/17/state");
  CHECK(a3.uniform() == a4.uniform());
  // Distinct names give distinct sequences (overwhelmingly).
  bool any_diff = false;
  auto c = root.substream("trial/17/state");
  for (int i = 0; i < 8; ++i) any_diff |= (c.uniform() != b.uniform());
  CHECK(any_diff);
  // Bounded integers stay in range.
  for (int i = 0; i < 200; ++i) CHECK(root.integer(7) < 7);
  CHECK_THROWS_AS(root.integer(0), DimensionError);
}

TEST_CASE("matrix_digest: stable, sensitive, 16 hex chars") {
  Matrix m = Matrix::Identity(2, 2) / 2.0;
  const std::string d1 = matrix_digest(m);
  CHECK(d1.size() == 16);
  CHECK(d1 == matrix_digest(m));
  Matrix m2 = m;
  m2(0, 0) += 1e-15;
  CHECK(matrix_digest(m2) != d1);
}
