#include "qdef/qcore.hpp"

#include <algorithm>
#include <cstring>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qdef {

namespace {

constexpr double kRankCutoff = 1e-12;

// Dominant eigenvector if the operator has numerical rank 1, else empty.
Vector rank_one_vector(const DensityOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix());
  const auto& vals = es.eigenvalues();
  int rank = 0;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) > kRankCutoff) ++rank;
  }
  if (rank != 1) return Vector();
  return es.eigenvectors().col(vals.size() - 1);  // eigenvalues are ascending
}

Matrix matrix_sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) {
    vals(i) = vals(i) > 0.0 ? std::sqrt(vals(i)) : 0.0;
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityOperator& sigma, const DensityOperator& rho) {
  if (sigma.dim() != rho.dim()) {
    throw DimensionError("fidelity arguments have dimensions " + std::to_string(sigma.dim()) +
                         " and " + std::to_string(rho.dim()));
  }
  // Rank-1 branch: F(|phi><phi|, rho) = <phi|rho|phi>.
  Vector phi = rank_one_vector(sigma);
  const DensityOperator* other = &rho;
  if (phi.size() == 0) {
    phi = rank_one_vector(rho);
    other = &sigma;
  }
  if (phi.size() != 0) {
    const double f = std::real((phi.adjoint() * other->matrix() * phi)(0, 0));
    return std::clamp(f, 0.0, 1.0);
  }
  // General case: F = (sum of singular values of sqrt(sigma) sqrt(rho))^2,
  // computed as (sum_i sqrt(lambda_i(A rho A)))^2 with A = sqrt(sigma).
  const Matrix a = matrix_sqrt_psd(sigma.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(a * rho.matrix() * a, Eigen::EigenvaluesOnly);
  double root_sum = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > 0.0) root_sum += std::sqrt(v);
  }
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

SchmidtData schmidt(const PureState& psi, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || psi.dim() != dim_a * dim_b) {
    throw DimensionError("state of dimension " + std::to_string(psi.dim()) +
                         " does not factor as " + std::to_string(dim_a) + "x" +
                         std::to_string(dim_b));
  }
  // Coefficient matrix C(a, b) = psi[a*dB + b], so psi = sum_ab C(a,b)|a>|b>.
  Matrix c(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a) {
    for (int b = 0; b < dim_b; ++b) {
      c(a, b) = psi.amplitudes()(a * dim_b + b);
    }
  }
  // C = U S V^dag gives psi = sum_i s_i |u_i> (x) conj(|v_i>).
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData out;
  out.coefficients = svd.singularValues();
  out.basis_a = svd.matrixU();
  out.basis_b = svd.matrixV().conjugate();
  return out;
}

DensityOperator partial_trace(const BipartiteState& state, bool keep_a) {
  const int da = state.dim_a();
  const int db = state.dim_b();
  const Matrix& rho = state.rho().matrix();
  if (keep_a) {
    Matrix out = Matrix::Zero(da, da);
    for (int a = 0; a < da; ++a) {
      for (int c = 0; c < da; ++c) {
        Complex sum = 0.0;
        for (int b = 0; b < db; ++b) sum += rho(a * db + b, c * db + b);
        out(a, c) = sum;
      }
    }
    return DensityOperator(out);
  }
  Matrix out = Matrix::Zero(db, db);
  for (int b = 0; b < db; ++b) {
    for (int e = 0; e < db; ++e) {
      Complex sum = 0.0;
      for (int a = 0; a < da; ++a) sum += rho(a * db + b, a * db + e);
      out(b, e) = sum;
    }
  }
  return DensityOperator(out);
}

Matrix haar_unitary(int dim, RngStream& rng) {
  if (dim < 1) {
    throw DimensionError("haar_unitary needs dim >= 1");
  }
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge: multiply column i by r_ii/|r_ii|. QR without this phase
  // correction is not Haar-distributed.
  for (int i = 0; i < dim; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= (mag > 0.0) ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

DensityOperator random_density(int dim, int rank, RngStream& rng) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw DimensionError("random_density needs 1 <= rank <= dim");
  }
  Matrix g(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = rng.complex_gaussian();
  }
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  // Exact Hermitization of the roundoff; the operator is Hermitian by
  // construction, this only cleans the last bits so validation never flakes.
  m = ((m + m.adjoint()) / 2.0).eval();
  return DensityOperator(m);
}

PureState random_pure(int dim, RngStream& rng) {
  if (dim < 1) {
    throw DimensionError("random_pure needs dim >= 1");
  }
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
  v /= v.norm();
  return PureState(v);
}

PureState principal_component(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Vector v = es.eigenvectors().col(es.eigenvalues().size() - 1);
  v /= v.norm();
  return PureState(v);
}

bool majorizes(const RealVector& x, const RealVector& y) {
  if (x.size() != y.size() || x.size() == 0) {
    throw DimensionError("majorizes needs equal-length nonempty vectors");
  }
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < -1e-12 || y(i) < -1e-12) {
      throw InvariantError("majorizes arguments must be nonnegative within 1e-12");
    }
  }
  if (std::abs(x.sum() - y.sum()) > 1e-9) {
    throw InvariantError("majorizes arguments must have equal sums within 1e-9");
  }
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ys(y.data(), y.data() + y.size());
  std::sort(xs.begin(), xs.end(), std::greater<double>());
  std::sort(ys.begin(), ys.end(), std::greater<double>());
  double px = 0.0, py = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    px += xs[i];
    py += ys[i];
    if (px < py - 1e-12) return false;
  }
  return true;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

std::string matrix_digest(const Matrix& m) {
  constexpr std::uint64_t kOffset = 14695981039346656037ull;
  constexpr std::uint64_t kPrime = 1099511628211ull;
  std::uint64_t h = kOffset;
  auto mix_u64 = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= kPrime;
    }
  };
  auto mix_double = [&](double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    mix_u64(bits);
  };
  mix_u64(static_cast<std::uint64_t>(m.rows()));
  mix_u64(static_cast<std::uint64_t>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      mix_double(m(i, j).real());
      mix_double(m(i, j).imag());
    }
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace qdef
