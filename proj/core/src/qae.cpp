#include "qaec/qae.hpp"

#include <cmath>
#include <stdexcept>

#include "qaec/linalg.hpp"

namespace qaec {

void validate(const QaeArchitecture& a) {
  if (!(a.n > a.k && a.k >= 1)) throw std::invalid_argument("arch: need n > k >= 1");
  if (a.n_B < 0) throw std::invalid_argument("arch: n_B must be >= 0");
  if (a.n_E < a.n - a.k) throw std::invalid_argument("arch: need n_E >= n - k");
}

namespace {

void check_params(const QaeParams& p) {
  validate(p.arch);
  const Eigen::Index du = Eigen::Index(1) << (p.arch.n + p.arch.n_B);
  const Eigen::Index dv = Eigen::Index(1) << (p.arch.k + p.arch.n_E);
  if (p.gen_U.rows() != du || p.gen_U.cols() != du)
    throw std::invalid_argument("params: gen_U size mismatch");
  if (p.gen_V.rows() != dv || p.gen_V.cols() != dv)
    throw std::invalid_argument("params: gen_V size mismatch");
}

}  // namespace

CMatrix encoder_unitary(const QaeParams& p) {
  check_params(p);
  return unitary_from_generator(p.gen_U);
}

CMatrix decoder_unitary(const QaeParams& p) {
  check_params(p);
  return unitary_from_generator(p.gen_V);
}

KrausChannel encoder_from_unitary(const QaeArchitecture& arch, const CMatrix& u) {
  validate(arch);
  const int da = 1 << arch.n;
  const int db = 1 << arch.n_B;
  const int dc = 1 << arch.k;
  const int dd = 1 << (arch.n + arch.n_B - arch.k);
  if (u.rows() != Eigen::Index(da) * db || u.cols() != u.rows())
    throw std::invalid_argument("encoder_from_unitary: unitary size mismatch");
  KrausChannel ch{da, dc, {}};
  ch.kraus.reserve(dd);
  for (int b = 0; b < dd; ++b) {
    CMatrix k(dc, da);
    for (int c = 0; c < dc; ++c)
      for (int a = 0; a < da; ++a) k(c, a) = u(Eigen::Index(c) * dd + b, Eigen::Index(a) * db);
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

KrausChannel decoder_from_unitary(const QaeArchitecture& arch, const CMatrix& v) {
  validate(arch);
  const int dc = 1 << arch.k;
  const int de = 1 << arch.n_E;
  const int df = 1 << arch.n;
  const int dg = 1 << (arch.k + arch.n_E - arch.n);
  if (v.rows() != Eigen::Index(dc) * de || v.cols() != v.rows())
    throw std::invalid_argument("decoder_from_unitary: unitary size mismatch");
  KrausChannel ch{dc, df, {}};
  ch.kraus.reserve(dg);
  for (int g = 0; g < dg; ++g) {
    CMatrix k(df, dc);
    for (int f = 0; f < df; ++f)
      for (int c = 0; c < dc; ++c) k(f, c) = v(Eigen::Index(f) * dg + g, Eigen::Index(c) * de);
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

KrausChannel encoder_channel(const QaeParams& p) {
  return encoder_from_unitary(p.arch, encoder_unitary(p));
}

KrausChannel decoder_channel(const QaeParams& p) {
  return decoder_from_unitary(p.arch, decoder_unitary(p));
}

FidelityReport average_fidelity(const KrausChannel& enc, const KrausChannel& dec,
                                const std::vector<CVector>& samples, bool keep_per_sample) {
  if (samples.empty()) throw std::invalid_argument("average_fidelity: no samples");
  if (enc.dim_out != dec.dim_in || dec.dim_out != enc.dim_in)
    throw std::invalid_argument("average_fidelity: dimension chain mismatch");
  std::vector<double> fs;
  fs.reserve(samples.size());
  for (const auto& psi : samples) {
    if (psi.size() != enc.dim_in)
      throw std::invalid_argument("average_fidelity: sample dimension mismatch");
    CMatrix sigma = CMatrix::Zero(enc.dim_out, enc.dim_out);
    for (const auto& k : enc.kraus) {
      CVector w = k * psi;
      sigma += w * w.adjoint();
    }
    double f = 0.0;
    for (const auto& d : dec.kraus) {
      CVector w = d.adjoint() * psi;
      f += (w.adjoint() * sigma * w)(0, 0).real();
    }
    if (f < -1e-8 || f > 1.0 + 1e-8)
      throw std::runtime_error("average_fidelity: fidelity outside [0,1] beyond tolerance");
    fs.push_back(std::min(1.0, std::max(0.0, f)));
  }
  FidelityReport rep;
  rep.mean_fidelity = pairwise_mean(fs);
  rep.mean_infidelity = 1.0 - rep.mean_fidelity;
  if (fs.size() > 1) {
    std::vector<double> sq(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      double d = fs[i] - rep.mean_fidelity;
      sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / (fs.size() - 1);
    rep.stderr_mean = std::sqrt(var / fs.size());
  }
  if (keep_per_sample) rep.per_sample = std::move(fs);
  return rep;
}

namespace {

// Stacks a padded Kraus list into prescribed unitary columns. The channel's
// input ket |a> enters at composite index a * anc_dim, and Kraus index i is
// read off the least significant trace-out register.
CMatrix embed_kraus(const std::vector<CMatrix>& kraus, int in_dim, int out_dim, int capacity,
                    int anc_dim, int total_dim) {
  CMatrix cols(total_dim, in_dim);
  cols.setZero();
  for (int i = 0; i < static_cast<int>(kraus.size()); ++i)
    for (int o = 0; o < out_dim; ++o)
      for (int a = 0; a < in_dim; ++a) cols(Eigen::Index(o) * capacity + i, a) = kraus[i](o, a);
  std::vector<int> positions(in_dim);
  for (int a = 0; a < in_dim; ++a) positions[a] = a * anc_dim;
  return complete_unitary_columns(cols, positions, total_dim);
}

std::vector<CMatrix> padded_kraus(const KrausChannel& ch, int capacity, const char* what) {
  std::vector<CMatrix> ks = ch.kraus;
  if (static_cast<int>(ks.size()) > capacity) {
    // try a minimal list before giving up
    ks = choi_to_kraus(to_choi(ch)).kraus;
    if (static_cast<int>(ks.size()) > capacity)
      throw std::invalid_argument(std::string(what) + ": Kraus rank exceeds capacity");
  }
  while (static_cast<int>(ks.size()) < capacity)
    ks.push_back(CMatrix::Zero(ch.dim_out, ch.dim_in));
  return ks;
}

}  // namespace

CMatrix embed_encoder(const KrausChannel& ch, const QaeArchitecture& arch) {
  validate(arch);
  if (ch.dim_in != (1 << arch.n) || ch.dim_out != (1 << arch.k))
    throw std::invalid_argument("embed_encoder: channel dimensions mismatch arch");
  const int capacity = 1 << (arch.n + arch.n_B - arch.k);
  auto ks = padded_kraus(ch, capacity, "embed_encoder");
  return embed_kraus(ks, ch.dim_in, ch.dim_out, capacity, 1 << arch.n_B,
                     1 << (arch.n + arch.n_B));
}

CMatrix embed_decoder(const KrausChannel& ch, const QaeArchitecture& arch) {
  validate(arch);
  if (ch.dim_in != (1 << arch.k) || ch.dim_out != (1 << arch.n))
    throw std::invalid_argument("embed_decoder: channel dimensions mismatch arch");
  const int capacity = 1 << (arch.k + arch.n_E - arch.n);
  auto ks = padded_kraus(ch, capacity, "embed_decoder");
  return embed_kraus(ks, ch.dim_in, ch.dim_out, capacity, 1 << arch.n_E,
                     1 << (arch.k + arch.n_E));
}

std::vector<std::pair<double, QaeParams>> purify_ancilla_gauge(const QaeParams& p,
                                                               const CMatrix& sigma_B,
                                                               const CMatrix& tau_E) {
  check_params(p);
  const int db = 1 << p.arch.n_B;
  const int de = 1 << p.arch.n_E;
  auto check_density = [](const CMatrix& rho, int dim, const char* name) {
    if (rho.rows() != dim || rho.cols() != dim)
      throw std::invalid_argument(std::string(name) + ": size mismatch");
    if (!is_hermitian(rho) || std::abs(rho.trace().real() - 1.0) > 1e-9)
      throw std::invalid_argument(std::string(name) + ": not a density matrix");
  };
  check_density(sigma_B, db, "sigma_B");
  check_density(tau_E, de, "tau_E");

  EigHermitian eb = eig_hermitian(sigma_B);
  EigHermitian ee = eig_hermitian(tau_E);
  CMatrix u = encoder_unitary(p);
  CMatrix v = decoder_unitary(p);
  const int da = 1 << p.arch.n;
  const int dc = 1 << p.arch.k;

  std::vector<std::pair<double, QaeParams>> out;
  for (Eigen::Index r = 0; r < eb.values.size(); ++r) {
    if (eb.values(r) < 1e-12) continue;
    CMatrix wb = complete_isometry(eb.vectors.col(r));
    CMatrix ur = u * tensor(CMatrix::Identity(da, da), wb);
    for (Eigen::Index s = 0; s < ee.values.size(); ++s) {
      if (ee.values(s) < 1e-12) continue;
      CMatrix we = complete_isometry(ee.vectors.col(s));
      CMatrix vs = v * tensor(CMatrix::Identity(dc, dc), we);
      QaeParams q{p.arch, hermitian_generator(ur), hermitian_generator(vs)};
      out.emplace_back(eb.values(r) * ee.values(s), std::move(q));
    }
  }
  return out;
}

}  // namespace qaec
