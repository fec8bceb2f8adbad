#pragma once

#include <type_traits>
#include <utility>
#include <vector>

#include "qaec/types.hpp"

namespace qaec {

enum class Keep { First, Second };

// Eigendecomposition of a Hermitian matrix, eigenvalues nonincreasing.
struct EigHermitian {
  RVector values;
  CMatrix vectors;  // columns ordered like values
};

// Kronecker product; the left factor is the most significant index.
// Accepts any Eigen expressions; two column vectors produce a column vector.
template <typename DA, typename DB>
auto tensor(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  constexpr bool kVec = DA::ColsAtCompileTime == 1 && DB::ColsAtCompileTime == 1;
  using Ret = std::conditional_t<kVec, CVector, CMatrix>;
  Ret out(a.rows() * b.rows(), kVec ? 1 : a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = cx(a(i, j)) * b;
  return out;
}

// Reduced operator of rho on H_{d1} (x) H_{d2}; trace is preserved.
CMatrix partial_trace(const CMatrix& rho, std::pair<int, int> dims, Keep keep);

bool is_hermitian(const CMatrix& h, double tol = kHermTol);
CMatrix hermitize(const CMatrix& a);

// P = P^dag, P^2 = P (Frobenius) and trace(P) = rank, all within tol.
bool is_projector(const Projector& p, double tol = 1e-10);

EigHermitian eig_hermitian(const CMatrix& h);

// exp(iH) for Hermitian H, via eigendecomposition.
CMatrix unitary_from_generator(const CMatrix& h);

// Hermitian H with exp(iH) = u (principal branch); u must be unitary.
CMatrix hermitian_generator(const CMatrix& u);

// Extends an isometry (orthonormal columns) to a square unitary whose first
// columns equal v. Deterministic: remaining columns are Gram-Schmidt picks
// from the standard basis in ascending index order.
CMatrix complete_isometry(const CMatrix& v);

// Square unitary with cols(:,j) placed at column positions[j]; the free
// columns are filled by the same deterministic Gram-Schmidt rule.
CMatrix complete_unitary_columns(const CMatrix& cols, const std::vector<int>& positions, int dim);

// Sum of the m largest eigenvalues of a Hermitian matrix.
double kyfan_sum(const CMatrix& h, int m);

CVector basis_ket(int dim, int index);
CMatrix proj(const CVector& k);

// Deterministic order-insensitive reduction helpers.
double pairwise_sum(const std::vector<double>& xs);
double pairwise_mean(const std::vector<double>& xs);

}  // namespace qaec
