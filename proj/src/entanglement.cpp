#include "qdef/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qdef/qcore.hpp"

namespace qdef {

namespace {

constexpr double kStepTol = 1e-12;
constexpr int kMaxIterations = 5000;
constexpr double kMonotoneSlack = 1e-12;
constexpr int kRefineSteps = 100;

void check_square_bipartite(const BipartiteState& state) {
  if (state.dim_a() != state.dim_b()) {
    throw DimensionError("equal local dimensions required, got " +
                         std::to_string(state.dim_a()) + "x" + std::to_string(state.dim_b()));
  }
}

// u(a*d + b) = U(b, a)/sqrt(d), the vector form of (I (x) U)|Phi+>.
Vector vector_from_unitary(const Matrix& u) {
  const int d = static_cast<int>(u.rows());
  Vector v(d * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) v(a * d + b) = u(b, a) * scale;
  }
  return v;
}

double objective(const Matrix& rho, const Vector& u) {
  return std::real((u.adjoint() * rho * u)(0, 0));
}

// Unitary polar factor via full SVD; robust to rank deficiency (any
// completion maximizes the trace just as well).
Matrix polar_unitary(const Matrix& w) {
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

DeficiencyResult finish(double fidelity_raw, const Matrix& best_u, Method method, int iterations,
                        bool converged) {
  DeficiencyResult out;
  out.raw_value = 1.0 - fidelity_raw;
  out.fidelity = std::clamp(fidelity_raw, 0.0, 1.0);
  out.value = 1.0 - out.fidelity;
  out.witness = max_entangled_from_unitary(best_u).vector;
  out.method = method;
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

}  // namespace

MaxEntWitness max_entangled_from_unitary(const Matrix& local_u) {
  if (local_u.rows() != local_u.cols() || local_u.rows() < 1) {
    throw DimensionError("witness unitary must be square and nonempty");
  }
  const double unitarity =
      (local_u.adjoint() * local_u - Matrix::Identity(local_u.rows(), local_u.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (unitarity > 1e-8) {
    throw InvariantError("witness matrix is not unitary: deviation " +
                         std::to_string(unitarity));
  }
  return MaxEntWitness{local_u, PureState(vector_from_unitary(local_u))};
}

DeficiencyResult pure_entanglement_deficiency(const PureState& psi, int dim_a, int dim_b) {
  if (dim_a != dim_b) {
    throw DimensionError("equal local dimensions required, got " + std::to_string(dim_a) +
                         "x" + std::to_string(dim_b));
  }
  const int d = dim_a;
  SchmidtData sd = schmidt(psi, d, d);
  const double q_sum = sd.coefficients.sum();
  // Witness (1/sqrt d) sum_i |a_i>|b_i> corresponds to U = B A^T: the state
  // (I (x) U)|Phi+> with that U reproduces the Schmidt bases pairing.
  const Matrix local_u = sd.basis_b * sd.basis_a.transpose();
  DeficiencyResult out = finish(q_sum * q_sum / d, local_u, Method::pure_formula, 0, true);
  return out;
}

DeficiencyResult entangled_fraction(const BipartiteState& state, int restarts, RngStream& rng) {
  check_square_bipartite(state);
  if (restarts < 1) {
    throw DimensionError("entangled_fraction needs restarts >= 1");
  }
  const int d = state.dim_a();
  const Matrix& rho = state.rho().matrix();

  double best_f = -1.0;
  Matrix best_u = Matrix::Identity(d, d);
  int best_iters = 0;
  bool best_converged = false;

  for (int r = 0; r < restarts; ++r) {
    auto sub = rng.substream("restart/" + std::to_string(r));
    Matrix u = haar_unitary(d, sub);
    Vector vec = vector_from_unitary(u);
    double f = objective(rho, vec);
    int iters = 0;
    bool converged = false;
    while (iters < kMaxIterations) {
      ++iters;
      // Ascent step: u' maximizes Re<u'|rho|u> over maximally entangled u',
      // i.e. the polar factor of the environment matrix W(b,a) = (rho u)_(ab).
      const Vector w = rho * vec;
      Matrix env(d, d);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) env(b, a) = w(a * d + b);
      }
      u = polar_unitary(env);
      vec = vector_from_unitary(u);
      const double f_new = objective(rho, vec);
      if (f_new < f - kMonotoneSlack) {
        throw InvariantError("projected power iteration decreased the objective by " +
                             std::to_string(f - f_new));
      }
      if (f_new - f < kStepTol) {
        f = std::max(f, f_new);
        converged = true;
        break;
      }
      f = f_new;
    }
    if (f > best_f) {
      best_f = f;
      best_u = u;
      best_iters = iters;
      best_converged = converged;
    }
  }
  return finish(best_f, best_u, Method::power_iteration, best_iters, best_converged);
}

double entangled_fraction_oracle(const BipartiteState& state, int samples, RngStream& rng) {
  check_square_bipartite(state);
  const int d = state.dim_a();
  if (d > 3) {
    throw DimensionError("sampling oracle supports d <= 3 only");
  }
  if (samples < 10000) {
    throw DimensionError("sampling oracle needs samples >= 1e4");
  }
  const Matrix& rho = state.rho().matrix();

  double best = -1.0;
  for (int s = 0; s < samples; ++s) {
    auto sub = rng.substream("sample/" + std::to_string(s));
    Matrix u = haar_unitary(d, sub);
    double f = objective(rho, vector_from_unitary(u));
    // Keep-if-better polish with adaptive step; stays a lower bound no matter
    // how it converges.
    double eps = 0.2;
    for (int step = 0; step < kRefineSteps && eps > 1e-9; ++step) {
      Matrix g(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = sub.complex_gaussian();
      }
      const Matrix candidate = polar_unitary(u + eps * g);
      const double f_new = objective(rho, vector_from_unitary(candidate));
      if (f_new > f) {
        f = f_new;
        u = candidate;
        eps *= 1.25;
      } else {
        eps *= 0.6;
      }
    }
    best = std::max(best, f);
  }
  return best;
}

DeficiencyResult entanglement_deficiency(const BipartiteState& state) {
  return entanglement_deficiency(state, 32, RngStream(0).substream("entanglement/default"));
}

DeficiencyResult entanglement_deficiency(const BipartiteState& state, int restarts,
                                         RngStream rng) {
  check_square_bipartite(state);
  if (state.rho().is_pure()) {
    // Dominant eigenvector carries the whole state within the purity
    // tolerance; the Schmidt route is exact there.
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho().matrix());
    Vector top = es.eigenvectors().col(state.rho().dim() - 1);
    top /= top.norm();
    return pure_entanglement_deficiency(PureState(top), state.dim_a(), state.dim_b());
  }
  return entangled_fraction(state, restarts, rng);
}

}  // namespace qdef
