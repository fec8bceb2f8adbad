#include "qaec/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace qaec {

namespace {

constexpr int kSide = 28;
constexpr int kPixels = kSide * kSide;
constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_u32_be(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("idx: truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

std::vector<Image> read_idx(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_idx: cannot open " + path);
  if (read_u32_be(f) != kImageMagic) throw std::runtime_error("read_idx: bad magic in " + path);
  std::uint32_t count = read_u32_be(f);
  std::uint32_t rows = read_u32_be(f);
  std::uint32_t cols = read_u32_be(f);
  if (rows != kSide || cols != kSide)
    throw std::runtime_error("read_idx: expected 28x28 images in " + path);
  std::vector<Image> images(count);
  std::vector<unsigned char> buf(kPixels);
  for (std::uint32_t i = 0; i < count; ++i) {
    f.read(reinterpret_cast<char*>(buf.data()), kPixels);
    if (!f) throw std::runtime_error("read_idx: truncated image data in " + path);
    for (int p = 0; p < kPixels; ++p) images[i][p] = buf[p] / 255.0;
  }
  return images;
}

void write_idx(const std::string& path, const std::vector<Image>& images) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_idx: cannot open " + path);
  write_u32_be(f, kImageMagic);
  write_u32_be(f, static_cast<std::uint32_t>(images.size()));
  write_u32_be(f, kSide);
  write_u32_be(f, kSide);
  std::vector<unsigned char> buf(kPixels);
  for (const auto& img : images) {
    for (int p = 0; p < kPixels; ++p)
      buf[p] = static_cast<unsigned char>(std::lround(std::clamp(img[p], 0.0, 1.0) * 255.0));
    f.write(reinterpret_cast<char*>(buf.data()), kPixels);
  }
  if (!f) throw std::runtime_error("write_idx: write failed for " + path);
}

const std::vector<int>& radial_permutation() {
  static const std::vector<int> perm = [] {
    struct Bin {
      int d2, y, x;
    };
    std::vector<Bin> bins;
    bins.reserve(kPixels);
    for (int y = 0; y < kSide; ++y)
      for (int x = 0; x < kSide; ++x)
        bins.push_back({(y - 14) * (y - 14) + (x - 14) * (x - 14), y, x});
    std::stable_sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) {
      if (a.d2 != b.d2) return a.d2 < b.d2;
      if (a.y != b.y) return a.y < b.y;
      return a.x < b.x;
    });
    std::vector<int> p(kPixels);
    for (int i = 0; i < kPixels; ++i) p[i] = bins[i].y * kSide + bins[i].x;
    return p;
  }();
  return perm;
}

std::vector<cx> fft2_shifted(const Image& img) {
  // direct DFT; 28^3 per axis is nothing at this size
  static const auto twiddle = [] {
    std::array<cx, kSide * kSide> t{};
    for (int k = 0; k < kSide; ++k)
      for (int j = 0; j < kSide; ++j)
        t[k * kSide + j] = std::exp(cx(0.0, -2.0 * std::numbers::pi * k * j / kSide));
    return t;
  }();
  std::vector<cx> rowpass(kPixels);
  for (int y = 0; y < kSide; ++y)
    for (int u = 0; u < kSide; ++u) {
      cx acc = 0.0;
      for (int x = 0; x < kSide; ++x) acc += img[y * kSide + x] * twiddle[u * kSide + x];
      rowpass[y * kSide + u] = acc;
    }
  std::vector<cx> full(kPixels);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kPixels));
  for (int v = 0; v < kSide; ++v)
    for (int u = 0; u < kSide; ++u) {
      cx acc = 0.0;
      for (int y = 0; y < kSide; ++y) acc += rowpass[y * kSide + u] * twiddle[v * kSide + y];
      full[v * kSide + u] = scale * acc;
    }
  // index rotation by 14 on each axis puts DC at the center (14,14)
  std::vector<cx> shifted(kPixels);
  for (int y = 0; y < kSide; ++y)
    for (int x = 0; x < kSide; ++x)
      shifted[y * kSide + x] = full[((y + 14) % kSide) * kSide + ((x + 14) % kSide)];
  return shifted;
}

PreparedState prepare_state(const Image& img, const PrepConfig& cfg) {
  if (cfg.n >= 10)
    throw std::invalid_argument("prepare_state: n >= 10 leaves the truncation rule undefined");
  if (!(cfg.n > cfg.k && cfg.k >= 1)) throw std::invalid_argument("prepare_state: need n > k >= 1");
  if (!(cfg.head_energy > 0.0 && cfg.head_energy < 1.0))
    throw std::invalid_argument("prepare_state: head energy must lie in (0,1)");
  const int d = 1 << cfg.n;
  const int m = 1 << cfg.k;

  std::vector<cx> spec = fft2_shifted(img);
  const auto& perm = radial_permutation();

  CVector head(m), tail(d - m);
  for (int j = 0; j < m; ++j) head(j) = spec[perm[j]];
  for (int j = m; j < d; ++j) tail(j - m) = spec[perm[j]];

  const double hu = head.squaredNorm();
  const double hv = tail.squaredNorm();
  if (hu + hv < 1e-300 || hu == 0.0)
    throw std::invalid_argument("prepare_state: image has no normalizable state");

  PreparedState out;
  const double e = cfg.head_energy;
  double alpha = 0.0;
  // tails at roundoff level count as zero, otherwise alpha would blow
  // numerical noise up to the 1-e mass
  if (hv > 1e-18 * hu) {
    alpha = std::sqrt((1.0 - e) / e) * std::sqrt(hu / hv);
  } else {
    out.degenerate = true;
  }
  CVector psi(d);
  psi.head(m) = head;
  psi.tail(d - m) = alpha * tail;
  psi /= psi.norm();
  out.ket = std::move(psi);
  out.head_mass = out.ket.head(m).squaredNorm();
  return out;
}

SourceEnsemble prepare_dataset(const std::string& idx_path, const PrepConfig& cfg, int count) {
  std::vector<Image> images = read_idx(idx_path);
  if (static_cast<int>(images.size()) < count)
    throw std::runtime_error("prepare_dataset: not enough images");
  std::vector<CVector> states;
  states.reserve(count);
  for (int i = 0; i < count; ++i) states.push_back(prepare_state(images[i], cfg).ket);
  return empirical_source(std::move(states));
}

}  // namespace qaec
