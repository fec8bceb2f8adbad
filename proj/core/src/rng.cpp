#include "qaec/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qaec {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xda3e39cb94b95bdbull * (stream + 1));
  gen_.seed(splitmix64(s));
}

std::uint64_t Rng::next_u64() { return gen_(); }

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  return next_u64() % n;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

cx Rng::complex_gaussian() {
  double re = gaussian();
  double im = gaussian();
  return {re, im};
}

CVector Rng::gaussian_vector(int dim) {
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
  return v;
}

CVector Rng::unit_vector(int dim) {
  CVector v = gaussian_vector(dim);
  double n = v.norm();
  while (n < 1e-300) {  // never in practice
    v = gaussian_vector(dim);
    n = v.norm();
  }
  return v / n;
}

CMatrix random_hermitian(int dim, double scale, Rng& rng) {
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  return scale * 0.5 * (g + g.adjoint());
}

CMatrix random_isometry(int rows, int cols, Rng& rng) {
  if (rows < cols) throw std::invalid_argument("random_isometry: rows < cols");
  CMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // fix the column phases so the draw is Haar and reproducible
  for (int j = 0; j < cols; ++j) {
    cx d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0) ? (d / a) : cx(1, 0);
  }
  return q;
}

CMatrix random_unitary(int dim, Rng& rng) { return random_isometry(dim, dim, rng); }

}  // namespace qaec
