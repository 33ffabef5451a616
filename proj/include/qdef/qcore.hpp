#ifndef QDEF_QCORE_HPP
#define QDEF_QCORE_HPP

#include <cstdint>
#include <string>

#include "qdef/rng.hpp"
#include "qdef/types.hpp"

namespace qdef {

// Uhlmann fidelity F(sigma, rho) = ||sqrt(sigma) sqrt(rho)||_1^2.
// Branches to <phi|rho|phi> when either argument has numerical rank 1
// (eigenvalues above 1e-12), avoiding matrix square roots in the common case.
double fidelity(const DensityOperator& sigma, const DensityOperator& rho);

// Schmidt decomposition of |psi> in C^{dA} (x) C^{dB} (index a*dB + b).
// Coefficients are descending; min(dA, dB) of them, padded by exact zeros for
// rank-deficient states.
SchmidtData schmidt(const PureState& psi, int dim_a, int dim_b);

// Partial trace of a bipartite state. keep_a = true traces out B.
DensityOperator partial_trace(const BipartiteState& state, bool keep_a);

// Haar-distributed d x d unitary: complex Ginibre, QR, then the R-diagonal
// phase correction (without it QR is not Haar).
Matrix haar_unitary(int dim, RngStream& rng);

// Random rank-r density operator: G G^dag / tr with G a d x r Ginibre draw.
DensityOperator random_density(int dim, int rank, RngStream& rng);

// Haar-random pure state in C^d.
PureState random_pure(int dim, RngStream& rng);

// Eigenvector of the largest eigenvalue. For states that pass is_pure() this
// recovers the underlying state vector (up to global phase).
PureState principal_component(const DensityOperator& rho);

// Does x majorize y? Both must be probability vectors of equal length
// (nonnegative within 1e-12, sums within 1e-9 of each other); sorts
// internally, compares partial sums with slack 1e-12.
bool majorizes(const RealVector& x, const RealVector& y);

// Kronecker product, (A(x)B)[a*rowsB+b, c*colsB+e] = A(a,c)*B(b,e).
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

// FNV-1a over dims + row-major (re, im) doubles, as 16 hex digits. Stable
// across runs; used to identify states/channels in reports.
std::string matrix_digest(const Matrix& m);

}  // namespace qdef

#endif  // QDEF_QCORE_HPP
