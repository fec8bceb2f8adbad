#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaec/channel.hpp"
#include "qaec/types.hpp"

namespace qaec {

enum class SourceKind { Haar, Mu1, Phase, PhaseExtended, Empirical, EigenEnsemble };

struct SourceEnsemble {
  int dim = 0;
  SourceKind kind = SourceKind::Haar;
  std::uint64_t seed = 0;
  double epsilon = 0.0;        // Mu1
  int n_qubits = 2;            // PhaseExtended
  std::vector<CVector> states; // Empirical
  CMatrix rho;                 // EigenEnsemble
};

SourceEnsemble haar_source(int dim, std::uint64_t seed);
SourceEnsemble mu1_source(int dim, double epsilon, std::uint64_t seed);
SourceEnsemble phase_source(std::uint64_t seed);
SourceEnsemble phase_extended_source(int n, std::uint64_t seed);
SourceEnsemble empirical_source(std::vector<CVector> states);
SourceEnsemble eigen_ensemble_source(const CMatrix& rho, std::uint64_t seed);

// Average source state with its cumulative top-m spectral weights.
struct MeanState {
  CMatrix rho_bar;
  std::vector<double> s;  // s[m-1] = weight of the top m eigenvalues
  double s_m(int m) const;
  double eta_m(int m) const { return 1.0 - s_m(m); }
};

// Deterministic given (source seed, stream); empirical sources iterate in
// stored order.
std::vector<CVector> sample(const SourceEnsemble& src, int count, std::uint64_t stream = 0);

MeanState mean_state(const SourceEnsemble& src);

// |psi_phi>^(x)2 (x) |0...0> on n qubits.
CVector phase_state(double phi, int n = 2);

// <psi| D(E(|psi><psi|)) |psi>
double pipeline_fidelity(const KrausChannel& enc, const KrausChannel& dec, const CVector& psi);

// Closed-form Haar average of the pipeline fidelity.
double exact_haar_fidelity(const KrausChannel& enc, const KrausChannel& dec);

// Exact average fidelity over the mu1(epsilon) family, valid for all
// epsilon in [0,1] (the average is quadratic in epsilon).
double exact_mu1_fidelity(const KrausChannel& enc, const KrausChannel& dec, double epsilon);

// Exact phase-family average from five equispaced phases.
double five_point_phase_fidelity(const KrausChannel& enc, const KrausChannel& dec);

// Finite weighted support that reproduces the measure exactly for all
// integrands of degree (2,2) in |psi><psi|; empty for Haar and mu1.
std::optional<std::vector<std::pair<double, CVector>>> exact_support(const SourceEnsemble& src);

// State-list file format: "dim N" header, then per state 2*dim reals
// (re im interleaved), 17 significant digits.
SourceEnsemble load_empirical(const std::string& path);
void save_states(const std::string& path, const std::vector<CVector>& states);

}  // namespace qaec
