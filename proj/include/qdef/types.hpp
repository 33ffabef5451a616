#ifndef QDEF_TYPES_HPP
#define QDEF_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdef {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Validation tolerances. Inputs that fail them are rejected, never silently
// repaired.
inline constexpr double kHermitianTol = 1e-9;   // max |rho - rho^dag| entry
inline constexpr double kPsdFloor = -1e-10;     // min eigenvalue may dip this far
inline constexpr double kTraceTol = 1e-10;      // |tr(rho) - 1|
inline constexpr double kNormTol = 1e-10;       // | ||psi|| - 1 |
inline constexpr double kPurityTol = 1e-10;     // 1 - tr(rho^2) below this => pure
inline constexpr double kProbFloor = 1e-12;     // outcomes below this are dropped

// Error taxonomy. The CLI maps these onto its exit codes, so raising the
// right type is part of the contract, not a style choice.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed input files / JSON shape problems.
struct ParseError : Error {
  using Error::Error;
};
// Well-formed input that violates a mathematical invariant (not Hermitian,
// negative eigenvalue beyond tolerance, trace off, ...).
struct InvariantError : Error {
  using Error::Error;
};
// Dimension mismatches and combinations the toolkit refuses (dA != dB, ...).
struct DimensionError : Error {
  using Error::Error;
};
// A discrimination target that is not a valid pure state.
struct TargetStateError : Error {
  using Error::Error;
};

// Trace-1, PSD, Hermitian matrix. Validates on construction and is immutable
// afterwards, so a DensityOperator in hand is always safe to compute with.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

  // 1 - tr(rho^2) <= kPurityTol. Cached at construction.
  bool is_pure() const { return pure_; }
  double purity() const { return purity_; }

 private:
  Matrix mat_;
  double purity_ = 0.0;
  bool pure_ = false;
};

// Unit vector in C^d.
class PureState {
 public:
  // Trivial one-dimensional state; placeholder so result structs holding a
  // witness are default-constructible before assignment.
  PureState() : amp_(Vector::Ones(1)) {}
  explicit PureState(Vector amplitudes);

  int dim() const { return static_cast<int>(amp_.size()); }
  const Vector& amplitudes() const { return amp_; }

  DensityOperator projector() const;

 private:
  Vector amp_;
};

// Density operator on C^{dA} (x) C^{dB} with the factorization remembered.
// Basis ordering everywhere: |a>(x)|b> sits at index a*dB + b ("A is the slow
// factor").
class BipartiteState {
 public:
  BipartiteState(DensityOperator rho, int dim_a, int dim_b);

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  const DensityOperator& rho() const { return rho_; }

 private:
  DensityOperator rho_;
  int dim_a_;
  int dim_b_;
};

// Schmidt decomposition |psi> = sum_i q_i |a_i>|b_i>, q_i >= 0 descending,
// both basis sets orthonormal (columns of basis_a / basis_b).
struct SchmidtData {
  RealVector coefficients;
  Matrix basis_a;
  Matrix basis_b;
};

}  // namespace qdef

#endif  // QDEF_TYPES_HPP
