#include "qaec/sources.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "qaec/linalg.hpp"
#include "qaec/rng.hpp"

namespace qaec {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SourceEnsemble haar_source(int dim, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("haar_source: dim must be >= 2");
  SourceEnsemble s;
  s.dim = dim;
  s.kind = SourceKind::Haar;
  s.seed = seed;
  return s;
}

SourceEnsemble mu1_source(int dim, double epsilon, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("mu1_source: dim must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("mu1_source: epsilon must lie in (0,1)");
  SourceEnsemble s;
  s.dim = dim;
  s.kind = SourceKind::Mu1;
  s.epsilon = epsilon;
  s.seed = seed;
  return s;
}

SourceEnsemble phase_source(std::uint64_t seed) {
  SourceEnsemble s;
  s.dim = 4;
  s.kind = SourceKind::Phase;
  s.seed = seed;
  return s;
}

SourceEnsemble phase_extended_source(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("phase_extended_source: n must be >= 2");
  SourceEnsemble s;
  s.dim = 1 << n;
  s.kind = SourceKind::PhaseExtended;
  s.n_qubits = n;
  s.seed = seed;
  return s;
}

SourceEnsemble empirical_source(std::vector<CVector> states) {
  if (states.empty()) throw std::invalid_argument("empirical_source: no states");
  const int dim = static_cast<int>(states[0].size());
  for (const auto& psi : states) {
    if (psi.size() != dim) throw std::invalid_argument("empirical_source: dim mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-8)
      throw std::invalid_argument("empirical_source: state not normalized");
  }
  SourceEnsemble s;
  s.dim = dim;
  s.kind = SourceKind::Empirical;
  s.states = std::move(states);
  return s;
}

SourceEnsemble eigen_ensemble_source(const CMatrix& rho, std::uint64_t seed) {
  if (!is_hermitian(rho) || std::abs(rho.trace().real() - 1.0) > 1e-9)
    throw std::invalid_argument("eigen_ensemble_source: not a density matrix");
  SourceEnsemble s;
  s.dim = static_cast<int>(rho.rows());
  s.kind = SourceKind::EigenEnsemble;
  s.rho = rho;
  s.seed = seed;
  return s;
}

double MeanState::s_m(int m) const {
  if (m < 1 || m > static_cast<int>(s.size())) throw std::invalid_argument("s_m: m out of range");
  return s[m - 1];
}

namespace {

CVector mu1_state(int dim, double eps, const CVector& phi_perp) {
  CVector psi = CVector::Zero(dim);
  psi(0) = std::sqrt(1.0 - eps);
  psi.tail(dim - 1) = std::sqrt(eps) * phi_perp;
  return psi;
}

}  // namespace

std::vector<CVector> sample(const SourceEnsemble& src, int count, std::uint64_t stream) {
  if (count < 0) throw std::invalid_argument("sample: negative count");
  std::vector<CVector> out;
  out.reserve(count);
  Rng rng(src.seed, stream);
  switch (src.kind) {
    case SourceKind::Haar:
      for (int i = 0; i < count; ++i) out.push_back(rng.unit_vector(src.dim));
      break;
    case SourceKind::Mu1:
      for (int i = 0; i < count; ++i)
        out.push_back(mu1_state(src.dim, src.epsilon, rng.unit_vector(src.dim - 1)));
      break;
    case SourceKind::Phase:
      for (int i = 0; i < count; ++i) out.push_back(phase_state(kTwoPi * rng.uniform(), 2));
      break;
    case SourceKind::PhaseExtended:
      for (int i = 0; i < count; ++i)
        out.push_back(phase_state(kTwoPi * rng.uniform(), src.n_qubits));
      break;
    case SourceKind::Empirical:
      if (count > static_cast<int>(src.states.size()))
        throw std::invalid_argument("sample: empirical ensemble exhausted");
      out.assign(src.states.begin(), src.states.begin() + count);
      break;
    case SourceKind::EigenEnsemble: {
      EigHermitian e = eig_hermitian(src.rho);
      for (int i = 0; i < count; ++i) {
        double u = rng.uniform(), acc = 0.0;
        Eigen::Index pick = e.values.size() - 1;
        for (Eigen::Index j = 0; j < e.values.size(); ++j) {
          acc += std::max(0.0, e.values(j));
          if (u <= acc) {
            pick = j;
            break;
          }
        }
        out.push_back(e.vectors.col(pick));
      }
      break;
    }
  }
  return out;
}

MeanState mean_state(const SourceEnsemble& src) {
  MeanState ms;
  const int d = src.dim;
  switch (src.kind) {
    case SourceKind::Haar:
      ms.rho_bar = CMatrix::Identity(d, d) / d;
      break;
    case SourceKind::Mu1: {
      CMatrix rho = CMatrix::Zero(d, d);
      rho(0, 0) = 1.0 - src.epsilon;
      for (int j = 1; j < d; ++j) rho(j, j) = src.epsilon / (d - 1);
      ms.rho_bar = rho;
      break;
    }
    case SourceKind::Phase:
    case SourceKind::PhaseExtended: {
      CMatrix rho4 = CMatrix::Zero(4, 4);
      CVector sig = (basis_ket(4, 1) + basis_ket(4, 2)) / std::sqrt(2.0);
      rho4 = 0.25 * proj(basis_ket(4, 0)) + 0.5 * proj(sig) + 0.25 * proj(basis_ket(4, 3));
      if (src.kind == SourceKind::Phase) {
        ms.rho_bar = rho4;
      } else {
        const int dr = 1 << (src.n_qubits - 2);
        ms.rho_bar = tensor(rho4, proj(basis_ket(dr, 0)));
      }
      break;
    }
    case SourceKind::Empirical: {
      CMatrix rho = CMatrix::Zero(d, d);
      for (const auto& psi : src.states) rho += proj(psi);
      ms.rho_bar = rho / static_cast<double>(src.states.size());
      break;
    }
    case SourceKind::EigenEnsemble:
      ms.rho_bar = src.rho;
      break;
  }
  EigHermitian e = eig_hermitian(ms.rho_bar);
  double acc = 0.0;
  ms.s.resize(d);
  for (int m = 0; m < d; ++m) {
    acc += e.values(m);
    ms.s[m] = std::min(1.0, acc);
  }
  return ms;
}

CVector phase_state(double phi, int n) {
  if (n < 2) throw std::invalid_argument("phase_state: n must be >= 2");
  CVector q(2);
  q << cx(1.0 / std::sqrt(2.0), 0.0), std::exp(cx(0.0, phi)) / std::sqrt(2.0);
  CVector two = tensor(q, q);
  if (n == 2) return two;
  return tensor(two, basis_ket(1 << (n - 2), 0));
}

double pipeline_fidelity(const KrausChannel& enc, const KrausChannel& dec, const CVector& psi) {
  if (psi.size() != enc.dim_in || enc.dim_out != dec.dim_in || dec.dim_out != enc.dim_in)
    throw std::invalid_argument("pipeline_fidelity: dimension mismatch");
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
  return f;
}

double exact_haar_fidelity(const KrausChannel& enc, const KrausChannel& dec) {
  if (enc.dim_in != dec.dim_out || enc.dim_out != dec.dim_in)
    throw std::invalid_argument("exact_haar_fidelity: dimension mismatch");
  const double d = enc.dim_in;
  double cross = 0.0;
  for (const auto& di : dec.kraus)
    for (const auto& ej : enc.kraus) cross += std::norm((di * ej).trace());
  return 1.0 / (d + 1.0) + cross / (d * (d + 1.0));
}

double exact_mu1_fidelity(const KrausChannel& enc, const KrausChannel& dec, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("exact_mu1_fidelity: epsilon out of [0,1]");
  if (enc.dim_in != dec.dim_out || enc.dim_out != dec.dim_in)
    throw std::invalid_argument("exact_mu1_fidelity: dimension mismatch");
  const int d = enc.dim_in;
  const double q = d - 1;

  // Sphere moments on H_perp turn the phi average into traces of the
  // composed Kraus blocks; the result is exactly quadratic in epsilon.
  double t00 = 0.0, t1_proj = 0.0, t2 = 0.0;
  cx t1_cross = 0.0;
  for (const auto& di : dec.kraus)
    for (const auto& ej : enc.kraus) {
      CMatrix a = di * ej;
      cx a00 = a(0, 0);
      t00 += std::norm(a00);
      double col0 = a.col(0).tail(d - 1).squaredNorm();   // ||Pi A |0>||^2
      double row0 = a.row(0).tail(d - 1).squaredNorm();   // ||Pi A^dag |0>||^2
      CMatrix sub = a.block(1, 1, d - 1, d - 1);
      cx trsub = sub.trace();
      t1_proj += col0 + row0;
      t1_cross += std::conj(a00) * trsub;
      t2 += (sub.squaredNorm() + std::norm(trsub)) / (q * (q + 1.0));
    }
  double t1 = (t1_proj + 2.0 * t1_cross.real()) / q;
  const double b = 1.0 - epsilon;
  return t00 * b * b + t1 * epsilon * b + t2 * epsilon * epsilon;
}

double five_point_phase_fidelity(const KrausChannel& enc, const KrausChannel& dec) {
  if (enc.dim_in != 4 || dec.dim_out != 4)
    throw std::invalid_argument("five_point_phase_fidelity: pipeline must act on two qubits");
  double acc = 0.0;
  for (int j = 0; j < 5; ++j) acc += pipeline_fidelity(enc, dec, phase_state(kTwoPi * j / 5.0, 2));
  return acc / 5.0;
}

std::optional<std::vector<std::pair<double, CVector>>> exact_support(const SourceEnsemble& src) {
  std::vector<std::pair<double, CVector>> out;
  switch (src.kind) {
    case SourceKind::Phase:
    case SourceKind::PhaseExtended: {
      // 16 equispaced phases: exact for trigonometric degree <= 15, enough
      // for any degree-(2,2) polynomial in |psi><psi| (degree 8).
      const int n = (src.kind == SourceKind::Phase) ? 2 : src.n_qubits;
      const int pts = 16;
      for (int j = 0; j < pts; ++j)
        out.emplace_back(1.0 / pts, phase_state(kTwoPi * j / pts, n));
      return out;
    }
    case SourceKind::Empirical: {
      for (const auto& psi : src.states)
        out.emplace_back(1.0 / src.states.size(), psi);
      return out;
    }
    case SourceKind::EigenEnsemble: {
      EigHermitian e = eig_hermitian(src.rho);
      for (Eigen::Index j = 0; j < e.values.size(); ++j)
        if (e.values(j) > 1e-14) out.emplace_back(e.values(j), e.vectors.col(j));
      return out;
    }
    case SourceKind::Haar:
    case SourceKind::Mu1:
      return std::nullopt;
  }
  return std::nullopt;
}

SourceEnsemble load_empirical(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_empirical: cannot open " + path);
  int dim = 0, n = 0;
  if (!(f >> dim >> n)) throw std::runtime_error("load_empirical: malformed header in " + path);
  if (dim <= 0 || n <= 0) throw std::runtime_error("load_empirical: empty or malformed " + path);
  std::vector<CVector> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) {
    CVector psi(dim);
    for (int j = 0; j < dim; ++j) {
      double re = 0, im = 0;
      if (!(f >> re >> im)) throw std::runtime_error("load_empirical: truncated " + path);
      psi(j) = cx(re, im);
    }
    states.push_back(std::move(psi));
  }
  return empirical_source(std::move(states));
}

void save_states(const std::string& path, const std::vector<CVector>& states) {
  if (states.empty()) throw std::invalid_argument("save_states: no states");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_states: cannot open " + path);
  f << states[0].size() << ' ' << states.size() << '\n';
  f << std::setprecision(17);
  for (const auto& psi : states) {
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      if (j) f << ' ';
      f << psi(j).real() << ' ' << psi(j).imag();
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("save_states: write failed for " + path);
}

}  // namespace qaec
