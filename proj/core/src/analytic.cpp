#include "qaec/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qaec/linalg.hpp"

namespace qaec {

namespace {
bool power_of_two_factor(int d, int m) { return m >= 1 && d >= m && d % m == 0; }
}  // namespace

double haar_optimum(int d, int m) {
  if (m > d || m < 1) throw std::invalid_argument("haar_optimum: need 1 <= m <= d");
  return (d + double(m) * m) / (double(d) * (d + 1));
}

std::pair<KrausChannel, KrausChannel> haar_optimal_pair(int d, int m) {
  if (!power_of_two_factor(d, m))
    throw std::invalid_argument("haar_optimal_pair: m must divide d");
  const int r = d / m;
  KrausChannel enc{d, m, {}};
  for (int b = 0; b < r; ++b) {
    CMatrix k = CMatrix::Zero(m, d);
    for (int c = 0; c < m; ++c) k(c, c * r + b) = 1.0;
    enc.kraus.push_back(std::move(k));
  }
  KrausChannel dec{m, d, {}};
  const double w = 1.0 / std::sqrt(double(r));
  for (int b = 0; b < r; ++b) {
    CMatrix k = CMatrix::Zero(d, m);
    for (int c = 0; c < m; ++c) k(c * r + b, c) = w;
    dec.kraus.push_back(std::move(k));
  }
  return {std::move(enc), std::move(dec)};
}

double haar_mixture_value(int d, int m, double c) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("haar_mixture_value: c must lie in (0,1)");
  if (m > d || m < 1) throw std::invalid_argument("haar_mixture_value: need 1 <= m <= d");
  return 1.0 - c * (double(d) + m) * (double(d) - m) / (double(d) * (d + 1));
}

std::pair<KrausChannel, KrausChannel> phase_family_achiever() {
  KrausChannel enc{4, 2, {}};
  for (int b = 0; b < 2; ++b) {
    CMatrix k = CMatrix::Zero(2, 4);
    k(0, 0 * 2 + b) = 1.0;
    k(1, 1 * 2 + b) = 1.0;
    enc.kraus.push_back(std::move(k));
  }
  CVector sig = (basis_ket(4, 1) + basis_ket(4, 2)) / std::sqrt(2.0);
  const double r3 = std::sqrt(1.0 / 3.0), r23 = std::sqrt(2.0 / 3.0);
  CMatrix a0 = r3 * basis_ket(4, 0) * basis_ket(2, 0).adjoint() +
               r23 * sig * basis_ket(2, 1).adjoint();
  CMatrix a1 = r23 * sig * basis_ket(2, 0).adjoint() +
               r3 * basis_ket(4, 3) * basis_ket(2, 1).adjoint();
  KrausChannel dec{2, 4, {a0, a1}};
  return {std::move(enc), std::move(dec)};
}

double isometric_upper_bound(const SourceEnsemble& src, int m) {
  return kyfan_sum(mean_state(src).rho_bar, m);
}

GramCriterionReport gram_criterion(const std::vector<CVector>& inputs,
                                   const std::vector<CVector>& outputs) {
  if (inputs.size() != outputs.size() || inputs.empty())
    throw std::invalid_argument("gram_criterion: need equal-length nonempty families");
  const int n = static_cast<int>(inputs.size());
  for (const auto& v : inputs)
    if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("gram_criterion: input not unit");
  for (const auto& v : outputs)
    if (std::abs(v.norm() - 1.0) > 1e-8)
      throw std::invalid_argument("gram_criterion: output not unit");

  GramCriterionReport rep;
  rep.g_alpha = CMatrix(n, n);
  rep.g_beta = CMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      rep.g_alpha(i, j) = inputs[i].dot(inputs[j]);
      rep.g_beta(i, j) = outputs[i].dot(outputs[j]);
    }
  rep.m_matrix = CMatrix::Zero(n, n);
  bool contradiction = false;
  const double zero_tol = 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::abs(rep.g_beta(i, j)) > zero_tol) {
        rep.m_matrix(i, j) = rep.g_alpha(i, j) / rep.g_beta(i, j);
      } else if (std::abs(rep.g_alpha(i, j)) > zero_tol) {
        contradiction = true;  // forced entry has no quotient
      } else {
        ++rep.undefined_entries;  // free entry, completed with 0
      }
    }
  EigHermitian e = eig_hermitian(hermitize(rep.m_matrix));
  rep.min_eigenvalue = e.values(e.values.size() - 1);
  bool diag_ok = true;
  for (int i = 0; i < n; ++i)
    if (std::abs(rep.m_matrix(i, i) - cx(1.0, 0.0)) > 1e-10) diag_ok = false;
  rep.feasible = !contradiction && rep.undefined_entries == 0 && diag_ok &&
                 rep.min_eigenvalue >= -1e-9;
  return rep;
}

CMatrix phase_projector(double t, double gamma) {
  CVector sig = (basis_ket(4, 1) + basis_ket(4, 2)) / std::sqrt(2.0);
  CVector eta = std::cos(t) * basis_ket(4, 0) +
                std::exp(cx(0.0, gamma)) * std::sin(t) * basis_ket(4, 3);
  return proj(sig) + proj(eta);
}

CMatrix phase_shift_unitary(double beta) {
  CMatrix u = CMatrix::Identity(2, 2);
  u(1, 1) = std::exp(cx(0.0, beta));
  return tensor(u, u);
}

std::vector<CVector> projected_phase_states(double t, double gamma,
                                            const std::vector<double>& phis) {
  if (t < 0.0 || t > std::numbers::pi / 2)
    throw std::invalid_argument("projected_phase_states: t out of [0, pi/2]");
  CMatrix p = phase_projector(t, gamma);
  std::vector<CVector> out;
  out.reserve(phis.size());
  for (double phi : phis) {
    CVector v = p * phase_state(phi, 2);
    double nrm = v.norm();
    if (nrm < 1e-12) throw std::runtime_error("projected_phase_states: vanishing projection");
    out.push_back(v / nrm);
  }
  return out;
}

namespace {

// Isometry C^m -> C^d with image im(P) and prescribed first column.
CMatrix projector_isometry(const CMatrix& p, int m, const CVector& first, const char* what) {
  const int d = static_cast<int>(p.rows());
  if ((p * first - first).norm() > 1e-8)
    throw std::invalid_argument(std::string(what) + ": first column not in im(P)");
  EigHermitian e = eig_hermitian(p);
  CMatrix v(d, m);
  v.col(0) = first;
  int used = 1;
  for (Eigen::Index j = 0; j < e.values.size() && used < m; ++j) {
    if (e.values(j) < 0.5) break;
    CVector cand = e.vectors.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < used; ++c) cand -= v.col(c).dot(cand) * v.col(c);
    double nrm = cand.norm();
    if (nrm > 1e-6) v.col(used++) = cand / nrm;
  }
  if (used != m) throw std::invalid_argument(std::string(what) + ": rank(P) != m");
  return v;
}

// Encoder keeping im(P) plus the reset remainder, decoder Ad_V.
std::pair<KrausChannel, KrausChannel> keep_subspace_pair(const CMatrix& p, const CMatrix& v, int d,
                                                         int m) {
  KrausChannel enc{d, m, {}};
  enc.kraus.push_back(v.adjoint());
  EigHermitian e = eig_hermitian(CMatrix::Identity(d, d) - p);
  for (Eigen::Index j = 0; j < e.values.size(); ++j) {
    if (e.values(j) < 0.5) break;
    enc.kraus.push_back(basis_ket(m, 0) * e.vectors.col(j).adjoint());
  }
  KrausChannel dec{m, d, {v}};
  return {std::move(enc), std::move(dec)};
}

}  // namespace

std::pair<KrausChannel, KrausChannel> reset_construction(const Projector& p, int d, int m) {
  if (p.matrix.rows() != d || p.rank != m)
    throw std::invalid_argument("reset_construction: projector mismatch");
  if (!is_projector(p)) throw std::invalid_argument("reset_construction: not a projector");
  CMatrix v = projector_isometry(p.matrix, m, basis_ket(d, 0), "reset_construction");
  return keep_subspace_pair(p.matrix, v, d, m);
}

std::pair<KrausChannel, KrausChannel> concentration_pair(const CMatrix& p_star, const CVector& xi,
                                                         int m) {
  const int d = static_cast<int>(p_star.rows());
  CMatrix v = projector_isometry(p_star, m, xi, "concentration_pair");
  return keep_subspace_pair(p_star, v, d, m);
}

namespace {

// E[p_P(psi)^2] and Y_P = E[(1 - p) P|psi><psi|P] for the mu1 family,
// assembled from the exact sphere moments on H_perp.
void mu1_second_moments(const CMatrix& p, int d, double eps, double& e_p2, CMatrix& y) {
  const double q = d - 1.0;
  const double b = 1.0 - eps;
  const CMatrix pi = CMatrix::Identity(d, d) - proj(basis_ket(d, 0)).eval();
  const CVector zero = basis_ket(d, 0);
  const CMatrix pperp = (pi * p * pi).eval();
  const double p00 = (zero.adjoint() * p * zero)(0, 0).real();
  const double trp = pperp.trace().real();

  // E[Tr(P rho) rho] over the source
  CMatrix epr = CMatrix::Zero(d, d);
  epr += b * b * p00 * proj(zero);
  epr += b * eps * (p00 / q) * pi;
  epr += b * eps * (trp / q) * proj(zero);
  epr += eps * eps * (pperp + trp * pi) / (q * (q + 1.0));
  CVector pz = pi * (p * zero);
  epr += eps * b * (pz * zero.adjoint() + zero * pz.adjoint()) / q;

  e_p2 = (p * epr).trace().real();

  CMatrix rho_bar = CMatrix::Zero(d, d);
  rho_bar(0, 0) = b;
  for (int j = 1; j < d; ++j) rho_bar(j, j) = eps / q;
  y = p * rho_bar * p - p * epr * p;
  y = hermitize(y);
}

}  // namespace

ConcentrationReport concentration_bound(const SourceEnsemble& src, int m) {
  if (m < 1 || m > src.dim) throw std::invalid_argument("concentration_bound: m out of range");
  MeanState ms = mean_state(src);
  ConcentrationReport rep;
  rep.m = m;
  rep.s_m = ms.s_m(m);
  rep.eta_m = 1.0 - rep.s_m;
  rep.lower_bound_ratio = 1.0 - (1.0 - 1.0 / m) * rep.eta_m;

  EigHermitian e = eig_hermitian(ms.rho_bar);
  CMatrix p = CMatrix::Zero(src.dim, src.dim);
  for (int j = 0; j < m; ++j) p += proj(e.vectors.col(j));
  rep.p_star = p;

  double e_p2 = 0.0;
  CMatrix y = CMatrix::Zero(src.dim, src.dim);
  if (auto support = exact_support(src)) {
    for (const auto& [w, psi] : *support) {
      double pp = (psi.adjoint() * p * psi)(0, 0).real();
      e_p2 += w * pp * pp;
      CVector ppsi = p * psi;
      y += w * (1.0 - pp) * (ppsi * ppsi.adjoint());
    }
    y = hermitize(y);
  } else if (src.kind == SourceKind::Haar) {
    const double d = src.dim;
    e_p2 = (m + double(m) * m) / (d * (d + 1.0));
    y = p * ((d - m) / (d * (d + 1.0)));
  } else if (src.kind == SourceKind::Mu1) {
    mu1_second_moments(p, src.dim, src.epsilon, e_p2, y);
  } else {
    throw std::invalid_argument("concentration_bound: unsupported source");
  }

  EigHermitian ey = eig_hermitian(y);
  rep.b_mu_lower = e_p2 + ey.values(0);
  rep.xi = ey.vectors.col(0);
  return rep;
}

std::pair<double, double> fixed_encoder_gap(double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("fixed_encoder_gap: eps must lie in (0, 1/2)");
  // two-point source mean on {|00>, |11>}
  CMatrix rho_bar = CMatrix::Zero(4, 4);
  rho_bar(0, 0) = 1.0 - eps;
  rho_bar(3, 3) = eps;
  double iso_best = kyfan_sum(rho_bar, 2) / 2.0;

  // constant-|00> decoder applied to the discard encoder, evaluated exactly
  KrausChannel discard{4, 2, {}};
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 4; ++b)
      discard.kraus.push_back((1.0 / std::sqrt(2.0)) * basis_ket(2, i) * basis_ket(4, b).adjoint());
  KrausChannel constant{2, 4, {}};
  for (int i = 0; i < 2; ++i)
    constant.kraus.push_back(basis_ket(4, 0) * basis_ket(2, i).adjoint());
  double f00 = pipeline_fidelity(discard, constant, basis_ket(4, 0));
  double f11 = pipeline_fidelity(discard, constant, basis_ket(4, 3));
  double nonisometric = (1.0 - eps) * f00 + eps * f11;
  return {iso_best, nonisometric};
}

std::pair<KrausChannel, KrausChannel> decoder_k1_extension(int n) {
  if (n < 2) throw std::invalid_argument("decoder_k1_extension: n must be >= 2");
  auto [enc_ph, dec_ph] = phase_family_achiever();
  if (n == 2) return {enc_ph, dec_ph};
  const int dr = 1 << (n - 2);
  KrausChannel enc{1 << n, 2, {}};
  for (const auto& e : enc_ph.kraus)
    for (int r = 0; r < dr; ++r) {
      CMatrix bra = basis_ket(dr, r).adjoint();
      enc.kraus.push_back(e * tensor(CMatrix::Identity(4, 4), bra));
    }
  KrausChannel dec{2, 1 << n, {}};
  CMatrix pad = basis_ket(dr, 0);
  for (const auto& a : dec_ph.kraus) dec.kraus.push_back(tensor(a, pad));
  return {std::move(enc), std::move(dec)};
}

}  // namespace qaec
