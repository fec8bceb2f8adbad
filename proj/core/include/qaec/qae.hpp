#pragma once

#include <utility>
#include <vector>

#include "qaec/channel.hpp"
#include "qaec/types.hpp"

namespace qaec {

// Register sizes of an (n, k, n_B, n_E) autoencoder. Global index
// convention: within every tensor product the left register is the most
// significant factor, so A(B) and C(D) split at the top k qubits of the
// encoder output, F(G) at the top n qubits of the decoder output.
struct QaeArchitecture {
  int n = 0;
  int k = 0;
  int n_B = 0;
  int n_E = 0;
};

void validate(const QaeArchitecture& arch);

struct QaeParams {
  QaeArchitecture arch;
  CMatrix gen_U;  // Hermitian, 2^(n+n_B)
  CMatrix gen_V;  // Hermitian, 2^(k+n_E)
};

struct FidelityReport {
  double mean_fidelity = 0.0;
  double mean_infidelity = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> per_sample;  // empty unless requested
};

CMatrix encoder_unitary(const QaeParams& p);
CMatrix decoder_unitary(const QaeParams& p);

KrausChannel encoder_from_unitary(const QaeArchitecture& arch, const CMatrix& u);
KrausChannel decoder_from_unitary(const QaeArchitecture& arch, const CMatrix& v);
KrausChannel encoder_channel(const QaeParams& p);
KrausChannel decoder_channel(const QaeParams& p);

FidelityReport average_fidelity(const KrausChannel& enc, const KrausChannel& dec,
                                const std::vector<CVector>& samples,
                                bool keep_per_sample = false);

// Encoder unitary realizing ch on n+n_B qubits (Kraus list padded with zeros
// to the register capacity, stacked isometry completed deterministically).
CMatrix embed_encoder(const KrausChannel& ch, const QaeArchitecture& arch);
CMatrix embed_decoder(const KrausChannel& ch, const QaeArchitecture& arch);

// Spectral reduction of mixed ancilla states to weighted pure-ancilla QAEs.
// The weighted fidelity sum over components equals the mixed-ancilla value.
std::vector<std::pair<double, QaeParams>> purify_ancilla_gauge(const QaeParams& p,
                                                               const CMatrix& sigma_B,
                                                               const CMatrix& tau_E);

}  // namespace qaec
