#pragma once

#include <array>
#include <string>
#include <vector>

#include "qaec/sources.hpp"
#include "qaec/types.hpp"

namespace qaec {

// 28x28 grayscale image, row-major, values in [0,1].
using Image = std::array<double, 784>;

struct PrepConfig {
  int n = 3;
  int k = 1;
  double head_energy = 0.9;
};

struct PreparedState {
  CVector ket;
  double head_mass = 0.0;
  bool degenerate = false;  // zero tail energy, alpha forced to 0
};

// IDX image container (big-endian, magic 2051), pixels rescaled by 1/255.
std::vector<Image> read_idx(const std::string& path);
void write_idx(const std::string& path, const std::vector<Image>& images);

// Low-frequency-first ordering of the 28x28 frequency grid: indices into the
// shifted spectrum sorted by squared radius from (14,14), ties broken by
// (row, column) ascending. A fixed permutation of 0..783.
const std::vector<int>& radial_permutation();

// Unitary-scaled 2D DFT followed by the centering shift.
std::vector<cx> fft2_shifted(const Image& img);

PreparedState prepare_state(const Image& img, const PrepConfig& cfg);

SourceEnsemble prepare_dataset(const std::string& idx_path, const PrepConfig& cfg, int count);

}  // namespace qaec
