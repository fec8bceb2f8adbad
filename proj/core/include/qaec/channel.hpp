#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qaec/linalg.hpp"
#include "qaec/rng.hpp"
#include "qaec/types.hpp"

namespace qaec {

// CPTP map in Kraus form; every operator is dim_out x dim_in. Zero operators
// are allowed (padding constructions rely on them).
struct KrausChannel {
  int dim_in = 0;
  int dim_out = 0;
  std::vector<CMatrix> kraus;

  // sum_i K_i rho K_i^dag
  CMatrix apply(const CMatrix& rho) const;
};

// Channel as a bipartite operator on H_in (x) H_out (input factor most
// significant).
struct ChoiMatrix {
  int dim_in = 0;
  int dim_out = 0;
  CMatrix matrix;
};

struct CptpReport {
  bool cp = false;
  bool tp = false;
  double max_violation = 0.0;
};

// Per-Kraus block data of a channel fixing |0><0|, relative to the splitting
// C^d = span{|0>} (+) H_perp.
struct BlockDecomposition {
  std::vector<cx> alphas;
  std::vector<CVector> vs;
  std::vector<CMatrix> bs;
  double s_sum = 0.0;  // sum ||v_i||^2
  double t_sum = 0.0;  // sum ||B_i||_F^2
};

KrausChannel identity_channel(int dim);
CptpReport validate_cptp(const KrausChannel& ch);

ChoiMatrix to_choi(const KrausChannel& ch);
CMatrix choi_apply(const ChoiMatrix& lam, const CMatrix& rho);
KrausChannel choi_to_kraus(const ChoiMatrix& lam, double tol = 1e-10);

// Choi matrix of the composition second-after-first.
ChoiMatrix link_product(const ChoiMatrix& lam2, const ChoiMatrix& lam1);

int kraus_rank(const ChoiMatrix& lam, double tol = 1e-8);

// Stinespring isometry V = sum_i K_i (x) |i>_E; Tr_E(V rho V^dag) = ch(rho).
CMatrix stinespring(const KrausChannel& ch);

// Kraus products {D_i E_j} of the composition D o E.
KrausChannel compose(const KrausChannel& dec, const KrausChannel& enc);

// P rho P + Tr[(I-P) rho] |0><0|, with Kraus family {P} u {|0><e_j|}.
KrausChannel reset_channel(const Projector& p, int d);

BlockDecomposition block_decompose(const KrausChannel& ch);
double first_order_coefficient(const BlockDecomposition& bd, int d);

// Plain-text interchange format: "dim_in dim_out n_kraus" header, then each
// operator row-major as re im pairs, 17 significant digits.
void write_channel(std::ostream& os, const KrausChannel& ch);
KrausChannel read_channel(std::istream& is);
void save_channel(const std::string& path, const KrausChannel& ch);
KrausChannel load_channel(const std::string& path);

// Haar-random channel of the given Kraus rank (random Stinespring isometry).
KrausChannel random_channel(int dim_in, int dim_out, int rank, Rng& rng);

}  // namespace qaec
