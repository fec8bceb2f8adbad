#include "qaec/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace qaec {

CMatrix partial_trace(const CMatrix& rho, std::pair<int, int> dims, Keep keep) {
  const int d1 = dims.first, d2 = dims.second;
  if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(d1) * d2)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep == Keep::First) {
    CMatrix out = CMatrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int b = 0; b < d2; ++b) out(i, j) += rho(i * d2 + b, j * d2 + b);
    return out;
  }
  CMatrix out = CMatrix::Zero(d2, d2);
  for (int a = 0; a < d2; ++a)
    for (int b = 0; b < d2; ++b)
      for (int i = 0; i < d1; ++i) out(a, b) += rho(i * d2 + a, i * d2 + b);
  return out;
}

bool is_hermitian(const CMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).norm() <= tol * std::max(1.0, h.norm());
}

CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

bool is_projector(const Projector& p, double tol) {
  if (p.matrix.rows() != p.matrix.cols()) return false;
  if ((p.matrix - p.matrix.adjoint()).norm() > tol) return false;
  if ((p.matrix * p.matrix - p.matrix).norm() > tol) return false;
  return std::abs(p.matrix.trace().real() - p.rank) <= tol * std::max<double>(1, p.rank);
}

EigHermitian eig_hermitian(const CMatrix& h) {
  if (!is_hermitian(h)) throw std::invalid_argument("eig_hermitian: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(h));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: solver failed");
  const Eigen::Index n = h.rows();
  EigHermitian out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  (void)n;
  return out;
}

CMatrix unitary_from_generator(const CMatrix& h) {
  EigHermitian e = eig_hermitian(h);
  CVector phases(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    phases(i) = std::exp(cx(0.0, e.values(i)));
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

CMatrix hermitian_generator(const CMatrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("hermitian_generator: not square");
  if ((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm() > 1e-8)
    throw std::invalid_argument("hermitian_generator: input not unitary");
  Eigen::ComplexSchur<CMatrix> schur(u, true);
  if (schur.info() != Eigen::Success) throw std::runtime_error("hermitian_generator: Schur failed");
  const CMatrix& q = schur.matrixU();
  RVector angles(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) angles(i) = std::arg(schur.matrixT()(i, i));
  CMatrix h = q * angles.asDiagonal().toDenseMatrix().cast<cx>() * q.adjoint();
  return hermitize(h);
}

namespace {

// Two-pass Gram-Schmidt of e_i against the columns of q; returns the residual
// norm and writes the orthonormalized candidate into out when accepted.
bool gs_candidate(const CMatrix& q, int used, int i, CVector& out) {
  CVector r = CVector::Zero(q.rows());
  r(i) = 1.0;
  for (int pass = 0; pass < 2; ++pass)
    for (int c = 0; c < used; ++c) r -= q.col(c).dot(r) * q.col(c);
  double n = r.norm();
  if (n < 1e-6) return false;
  out = r / n;
  return true;
}

}  // namespace

CMatrix complete_isometry(const CMatrix& v) {
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  if (rows < cols) throw std::invalid_argument("complete_isometry: rows < cols");
  if ((v.adjoint() * v - CMatrix::Identity(cols, cols)).norm() > 1e-10)
    throw std::invalid_argument("complete_isometry: columns not orthonormal");
  CMatrix u(rows, rows);
  u.leftCols(cols) = v;
  int used = cols;
  CVector cand(rows);
  for (int i = 0; i < rows && used < rows; ++i) {
    if (gs_candidate(u, used, i, cand)) u.col(used++) = cand;
  }
  if (used != rows) throw std::runtime_error("complete_isometry: completion failed");
  return u;
}

CMatrix complete_unitary_columns(const CMatrix& cols, const std::vector<int>& positions, int dim) {
  if (cols.rows() != dim) throw std::invalid_argument("complete_unitary_columns: row mismatch");
  if (static_cast<int>(positions.size()) != cols.cols())
    throw std::invalid_argument("complete_unitary_columns: position count mismatch");
  if ((cols.adjoint() * cols - CMatrix::Identity(cols.cols(), cols.cols())).norm() > 1e-8)
    throw std::invalid_argument("complete_unitary_columns: columns not orthonormal");

  // Orthonormal frame: prescribed columns first, then Gram-Schmidt fill.
  CMatrix frame(dim, dim);
  frame.leftCols(cols.cols()) = cols;
  int used = static_cast<int>(cols.cols());
  CVector cand(dim);
  for (int i = 0; i < dim && used < dim; ++i) {
    if (gs_candidate(frame, used, i, cand)) frame.col(used++) = cand;
  }
  if (used != dim) throw std::runtime_error("complete_unitary_columns: completion failed");

  std::vector<bool> taken(dim, false);
  for (int p : positions) {
    if (p < 0 || p >= dim || taken[p])
      throw std::invalid_argument("complete_unitary_columns: bad positions");
    taken[p] = true;
  }
  CMatrix u(dim, dim);
  for (int j = 0; j < static_cast<int>(positions.size()); ++j) u.col(positions[j]) = frame.col(j);
  int next = static_cast<int>(positions.size());
  for (int p = 0; p < dim; ++p)
    if (!taken[p]) u.col(p) = frame.col(next++);
  return u;
}

double kyfan_sum(const CMatrix& h, int m) {
  if (m < 0 || m > h.rows()) throw std::invalid_argument("kyfan_sum: m out of range");
  EigHermitian e = eig_hermitian(h);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += e.values(i);
  return s;
}

CVector basis_ket(int dim, int index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("basis_ket: index out of range");
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

CMatrix proj(const CVector& k) { return k * k.adjoint(); }

namespace {
double pairwise_sum_range(const double* xs, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_range(xs, half) + pairwise_sum_range(xs + half, n - half);
}
}  // namespace

double pairwise_sum(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : pairwise_sum_range(xs.data(), xs.size());
}

double pairwise_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("pairwise_mean: empty input");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace qaec
