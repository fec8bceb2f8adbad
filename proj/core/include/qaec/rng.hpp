#pragma once

#include <cstdint>
#include <random>

#include "qaec/types.hpp"

namespace qaec {

// Seeded generator with derived streams. All floating-point draws are
// produced by explicit bit extraction (not std::*_distribution), so the
// same (seed, stream) pair yields the same sequence on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  std::uint64_t next_below(std::uint64_t n);  // uniform in [0, n)
  double uniform();                           // [0, 1)
  double gaussian();                          // standard normal
  cx complex_gaussian();                      // re, im independent N(0,1)

  CVector gaussian_vector(int dim);
  CVector unit_vector(int dim);  // Haar on the unit sphere of C^dim

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

CMatrix random_hermitian(int dim, double scale, Rng& rng);
CMatrix random_unitary(int dim, Rng& rng);
CMatrix random_isometry(int rows, int cols, Rng& rng);

}  // namespace qaec
