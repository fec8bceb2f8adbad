#pragma once

#include <vector>

#include <cmath>

#include "qaec/channel.hpp"
#include "qaec/linalg.hpp"
#include "qaec/qae.hpp"
#include "qaec/rng.hpp"
#include "qaec/types.hpp"

namespace testsupport {

using namespace qaec;

inline bool mat_close(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).norm() <= tol;
}

inline CMatrix random_density(int dim, Rng& rng) {
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// Isometry whose first column equals the given unit vector; the remaining
// columns are random.
inline CMatrix random_isometry_with_first_column(int rows, int cols, const CVector& first,
                                                 Rng& rng) {
  if (rows < cols) throw std::invalid_argument("random_isometry_with_first_column: rows < cols");
  CMatrix m(rows, cols);
  m.col(0) = first;
  for (int j = 1; j < cols; ++j) m.col(j) = rng.gaussian_vector(rows);
  for (int j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < j; ++c) m.col(j) -= m.col(c).dot(m.col(j)) * m.col(c);
    m.col(j) /= m.col(j).norm();
  }
  return m;
}

// Random channel L(C^d) -> L(C^m) sending |0_d><0_d| to |0_m><0_m|, built
// from a Stinespring isometry whose first column is |0_m> (x) |chi>.
inline KrausChannel random_fixing_channel(int dim_in, int dim_out, int rank, Rng& rng) {
  CVector chi = rng.unit_vector(rank);
  CVector first = tensor(basis_ket(dim_out, 0), chi);
  CMatrix s = random_isometry_with_first_column(dim_out * rank, dim_in, first, rng);
  KrausChannel ch{dim_in, dim_out, {}};
  for (int e = 0; e < rank; ++e) {
    CMatrix k(dim_out, dim_in);
    for (int b = 0; b < dim_out; ++b) k.row(b) = s.row(b * rank + e);
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

// Pipeline D o E with E: d -> m and D: m -> d, both fixing the reference
// state, so the composition fixes |0><0|.
inline std::pair<KrausChannel, KrausChannel> random_fixing_pipeline(int d, int m, Rng& rng) {
  const int min_enc_rank = (d + m - 1) / m;  // dim_out * rank >= dim_in
  KrausChannel enc =
      random_fixing_channel(d, m, min_enc_rank + static_cast<int>(rng.next_below(2)), rng);
  KrausChannel dec = random_fixing_channel(m, d, 1 + static_cast<int>(rng.next_below(2)), rng);
  return {std::move(enc), std::move(dec)};
}

// Encoder channel Tr_D(U (rho (x) sigma_B) U^dag) with a mixed ancilla,
// spelled out as a plain Kraus list; the reference oracle for the
// pure-ancilla gauge decomposition.
inline KrausChannel mixed_ancilla_encoder(const QaeArchitecture& arch, const CMatrix& u,
                                          const CMatrix& sigma_b) {
  const int da = 1 << arch.n, db = 1 << arch.n_B;
  const int dc = 1 << arch.k, dd = 1 << (arch.n + arch.n_B - arch.k);
  EigHermitian e = eig_hermitian(sigma_b);
  KrausChannel ch{da, dc, {}};
  for (Eigen::Index r = 0; r < e.values.size(); ++r) {
    if (e.values(r) < 1e-14) continue;
    double w = std::sqrt(e.values(r));
    for (int b = 0; b < dd; ++b) {
      CMatrix k(dc, da);
      for (int c = 0; c < dc; ++c)
        for (int a = 0; a < da; ++a) {
          cx acc = 0.0;
          for (int bb = 0; bb < db; ++bb)
            acc += u(Eigen::Index(c) * dd + b, Eigen::Index(a) * db + bb) * e.vectors(bb, r);
          k(c, a) = w * acc;
        }
      ch.kraus.push_back(std::move(k));
    }
  }
  return ch;
}

inline KrausChannel mixed_ancilla_decoder(const QaeArchitecture& arch, const CMatrix& v,
                                          const CMatrix& tau_e) {
  const int dc = 1 << arch.k, de = 1 << arch.n_E;
  const int df = 1 << arch.n, dg = 1 << (arch.k + arch.n_E - arch.n);
  EigHermitian e = eig_hermitian(tau_e);
  KrausChannel ch{dc, df, {}};
  for (Eigen::Index r = 0; r < e.values.size(); ++r) {
    if (e.values(r) < 1e-14) continue;
    double w = std::sqrt(e.values(r));
    for (int g = 0; g < dg; ++g) {
      CMatrix k(df, dc);
      for (int f = 0; f < df; ++f)
        for (int c = 0; c < dc; ++c) {
          cx acc = 0.0;
          for (int ee = 0; ee < de; ++ee)
            acc += v(Eigen::Index(f) * dg + g, Eigen::Index(c) * de + ee) * e.vectors(ee, r);
          k(f, c) = w * acc;
        }
      ch.kraus.push_back(std::move(k));
    }
  }
  return ch;
}

}  // namespace testsupport
