#pragma once

#include <utility>
#include <vector>

#include "qaec/channel.hpp"
#include "qaec/sources.hpp"
#include "qaec/types.hpp"

namespace qaec {

// Outcome of the pure-state transformation criterion G_alpha = M o G_beta.
struct GramCriterionReport {
  CMatrix g_alpha;
  CMatrix g_beta;
  CMatrix m_matrix;
  double min_eigenvalue = 0.0;
  bool feasible = false;
  int undefined_entries = 0;
};

struct ConcentrationReport {
  int m = 0;
  double s_m = 0.0;
  double eta_m = 0.0;
  double lower_bound_ratio = 0.0;  // 1 - (1 - 1/m) eta_m
  double b_mu_lower = 0.0;         // E[p^2] + lambda_max(Y_P) at P = P_star
  CMatrix p_star;                  // top-m eigenprojector of rho_bar
  CVector xi;                      // top eigenvector of Y_{P_star}
};

// (d + m^2) / (d (d + 1))
double haar_optimum(int d, int m);

// Optimal pair for the Haar prior: partial trace and tensoring the
// maximally mixed state on the discarded factor.
std::pair<KrausChannel, KrausChannel> haar_optimal_pair(int d, int m);

// 1 - c (d + m)(d - m) / (d (d + 1)) for a c-weighted Haar mixture.
double haar_mixture_value(int d, int m, double c);

// Partial-trace encoder plus the rank-2 decoder with per-phase fidelity 3/4.
std::pair<KrausChannel, KrausChannel> phase_family_achiever();

// Ky Fan bound on any pipeline with an isometric decoder.
double isometric_upper_bound(const SourceEnsemble& src, int m);

GramCriterionReport gram_criterion(const std::vector<CVector>& inputs,
                                   const std::vector<CVector>& outputs);

// P_{t,gamma} = |Sigma><Sigma| + |eta_{t,gamma}><eta_{t,gamma}|
CMatrix phase_projector(double t, double gamma);

// diag(1, e^{i beta})^(x)2; shifts the phase family by beta.
CMatrix phase_shift_unitary(double beta);

// Normalized projections P_{t,gamma}|Psi_phi> / ||.||.
std::vector<CVector> projected_phase_states(double t, double gamma, const std::vector<double>& phis);

// Encoder/decoder pair whose composition is the reset channel of P.
std::pair<KrausChannel, KrausChannel> reset_construction(const Projector& p, int d, int m);

ConcentrationReport concentration_bound(const SourceEnsemble& src, int m);

// The pair behind b_mu_lower: encoder keeping im(P) with remainder sent to
// the latent reference, decoder the isometry with V|0> = xi.
std::pair<KrausChannel, KrausChannel> concentration_pair(const CMatrix& p_star, const CVector& xi,
                                                         int m);

// (best isometric value, constant-|00> decoder value) for the fixed
// discard encoder on the two-point source {|00> : 1-eps, |11> : eps}.
std::pair<double, double> fixed_encoder_gap(double eps);

// Pipeline on n qubits achieving phase-family fidelity 3/4 for every phase.
std::pair<KrausChannel, KrausChannel> decoder_k1_extension(int n);

}  // namespace qaec
