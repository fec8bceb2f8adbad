#include "qaec/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qaec {

namespace {

void check_shapes(const KrausChannel& ch) {
  if (ch.dim_in <= 0 || ch.dim_out <= 0 || ch.kraus.empty())
    throw std::invalid_argument("channel: empty or degenerate");
  for (const auto& k : ch.kraus)
    if (k.rows() != ch.dim_out || k.cols() != ch.dim_in)
      throw std::invalid_argument("channel: Kraus shape mismatch");
}

}  // namespace

KrausChannel identity_channel(int dim) {
  return {dim, dim, {CMatrix::Identity(dim, dim)}};
}

CptpReport validate_cptp(const KrausChannel& ch) {
  check_shapes(ch);
  CMatrix acc = CMatrix::Zero(ch.dim_in, ch.dim_in);
  for (const auto& k : ch.kraus) acc += k.adjoint() * k;
  double tp_violation = (acc - CMatrix::Identity(ch.dim_in, ch.dim_in)).norm();

  // CP holds for any Kraus list; the Choi spectrum is the numerical cross-check.
  ChoiMatrix lam = to_choi(ch);
  EigHermitian e = eig_hermitian(lam.matrix);
  double min_eig = e.values(e.values.size() - 1);

  CptpReport rep;
  rep.tp = tp_violation <= 1e-9;
  rep.cp = min_eig >= -1e-9;
  rep.max_violation = std::max(tp_violation, std::max(0.0, -min_eig));
  return rep;
}

CMatrix KrausChannel::apply(const CMatrix& rho) const {
  check_shapes(*this);
  if (rho.rows() != dim_in || rho.cols() != dim_in)
    throw std::invalid_argument("apply: dimension mismatch");
  CMatrix out = CMatrix::Zero(dim_out, dim_out);
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

ChoiMatrix to_choi(const KrausChannel& ch) {
  check_shapes(ch);
  const int din = ch.dim_in, dout = ch.dim_out;
  CMatrix lam = CMatrix::Zero(din * dout, din * dout);
  for (const auto& k : ch.kraus) {
    // w[(i,b)] = K[b,i], so lam += w w^dag realizes sum_ij |i><j| (x) K|i><j|K^dag.
    CVector w(din * dout);
    for (int i = 0; i < din; ++i)
      for (int b = 0; b < dout; ++b) w(i * dout + b) = k(b, i);
    lam += w * w.adjoint();
  }
  return {din, dout, std::move(lam)};
}

CMatrix choi_apply(const ChoiMatrix& lam, const CMatrix& rho) {
  if (rho.rows() != lam.dim_in || rho.cols() != lam.dim_in)
    throw std::invalid_argument("choi_apply: dimension mismatch");
  CMatrix rho_t = rho.transpose();
  CMatrix big = lam.matrix * tensor(rho_t, CMatrix::Identity(lam.dim_out, lam.dim_out));
  return partial_trace(big, {lam.dim_in, lam.dim_out}, Keep::Second);
}

KrausChannel choi_to_kraus(const ChoiMatrix& lam, double tol) {
  EigHermitian e = eig_hermitian(lam.matrix);
  double cutoff = tol * std::max(e.values(0), 0.0);
  KrausChannel ch{lam.dim_in, lam.dim_out, {}};
  for (Eigen::Index r = 0; r < e.values.size(); ++r) {
    if (e.values(r) <= cutoff) break;
    double s = std::sqrt(e.values(r));
    CMatrix k(lam.dim_out, lam.dim_in);
    for (int i = 0; i < lam.dim_in; ++i)
      for (int b = 0; b < lam.dim_out; ++b) k(b, i) = s * e.vectors(i * lam.dim_out + b, r);
    ch.kraus.push_back(std::move(k));
  }
  if (ch.kraus.empty()) ch.kraus.push_back(CMatrix::Zero(lam.dim_out, lam.dim_in));
  return ch;
}

ChoiMatrix link_product(const ChoiMatrix& lam2, const ChoiMatrix& lam1) {
  if (lam1.dim_out != lam2.dim_in)
    throw std::invalid_argument("link_product: middle dimension mismatch");
  const int da = lam1.dim_in, db = lam1.dim_out, dc = lam2.dim_out;
  CMatrix out = CMatrix::Zero(da * dc, da * dc);
  // Tr_B[(I_A (x) lam2)(lam1^{T_B} (x) I_C)] written out per entry.
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int c = 0; c < dc; ++c)
        for (int c2 = 0; c2 < dc; ++c2) {
          cx acc = 0.0;
          for (int b = 0; b < db; ++b)
            for (int b2 = 0; b2 < db; ++b2)
              acc += lam1.matrix(a * db + b, a2 * db + b2) * lam2.matrix(b * dc + c, b2 * dc + c2);
          out(a * dc + c, a2 * dc + c2) = acc;
        }
  return {da, dc, std::move(out)};
}

int kraus_rank(const ChoiMatrix& lam, double tol) {
  if (tol <= 0) throw std::invalid_argument("kraus_rank: tol must be positive");
  EigHermitian e = eig_hermitian(lam.matrix);
  double top = std::max(e.values(0), 0.0);
  if (top == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > tol * top) ++r;
  return r;
}

CMatrix stinespring(const KrausChannel& ch) {
  check_shapes(ch);
  const int env = static_cast<int>(ch.kraus.size());
  CMatrix v(ch.dim_out * env, ch.dim_in);
  for (int e = 0; e < env; ++e)
    for (int b = 0; b < ch.dim_out; ++b)
      for (int a = 0; a < ch.dim_in; ++a) v(b * env + e, a) = ch.kraus[e](b, a);
  return v;
}

KrausChannel compose(const KrausChannel& dec, const KrausChannel& enc) {
  check_shapes(dec);
  check_shapes(enc);
  if (enc.dim_out != dec.dim_in) throw std::invalid_argument("compose: dimension mismatch");
  KrausChannel out{enc.dim_in, dec.dim_out, {}};
  out.kraus.reserve(dec.kraus.size() * enc.kraus.size());
  for (const auto& d : dec.kraus)
    for (const auto& e : enc.kraus) out.kraus.push_back(d * e);
  return out;
}

KrausChannel reset_channel(const Projector& p, int d) {
  if (p.matrix.rows() != d || p.matrix.cols() != d)
    throw std::invalid_argument("reset_channel: projector dimension mismatch");
  if (!is_projector(p)) throw std::invalid_argument("reset_channel: not a projector");
  CVector zero = basis_ket(d, 0);
  if ((p.matrix * zero - zero).norm() > 1e-10)
    throw std::invalid_argument("reset_channel: |0> not in the image of P");
  KrausChannel ch{d, d, {p.matrix}};
  // orthonormal basis of im(I - P) from the top eigenvectors of I - P
  EigHermitian e = eig_hermitian(CMatrix::Identity(d, d) - p.matrix);
  for (Eigen::Index j = 0; j < e.values.size(); ++j) {
    if (e.values(j) < 0.5) break;
    ch.kraus.push_back(zero * e.vectors.col(j).adjoint());
  }
  return ch;
}

BlockDecomposition block_decompose(const KrausChannel& ch) {
  check_shapes(ch);
  if (ch.dim_in != ch.dim_out) throw std::invalid_argument("block_decompose: channel not square");
  const int d = ch.dim_in;
  CVector zero = basis_ket(d, 0);
  CMatrix fixed = ch.apply(proj(zero));
  if ((fixed - proj(zero)).norm() > 1e-8)
    throw std::invalid_argument("block_decompose: channel does not fix |0><0|");

  BlockDecomposition bd;
  for (const auto& a : ch.kraus) {
    bd.alphas.push_back(a(0, 0));
    CVector v(d - 1);
    for (int j = 1; j < d; ++j) v(j - 1) = std::conj(a(0, j));
    bd.s_sum += v.squaredNorm();
    CMatrix b = a.block(1, 1, d - 1, d - 1);
    bd.t_sum += b.squaredNorm();
    bd.vs.push_back(std::move(v));
    bd.bs.push_back(std::move(b));
  }
  return bd;
}

double first_order_coefficient(const BlockDecomposition& bd, int d) {
  cx cross = 0.0;
  for (std::size_t i = 0; i < bd.alphas.size(); ++i)
    cross += std::conj(bd.alphas[i]) * bd.bs[i].trace();
  return 2.0 - (bd.s_sum + 2.0 * cross.real()) / (d - 1);
}

void write_channel(std::ostream& os, const KrausChannel& ch) {
  check_shapes(ch);
  os << ch.dim_in << ' ' << ch.dim_out << ' ' << ch.kraus.size() << '\n';
  os << std::setprecision(17);
  for (const auto& k : ch.kraus) {
    for (int b = 0; b < ch.dim_out; ++b) {
      for (int a = 0; a < ch.dim_in; ++a) {
        if (a) os << ' ';
        os << k(b, a).real() << ' ' << k(b, a).imag();
      }
      os << '\n';
    }
  }
}

KrausChannel read_channel(std::istream& is) {
  int din = 0, dout = 0;
  std::size_t nk = 0;
  if (!(is >> din >> dout >> nk)) throw std::runtime_error("channel parse: bad header");
  if (din <= 0 || dout <= 0 || nk == 0 || din > 4096 || dout > 4096)
    throw std::runtime_error("channel parse: implausible header");
  KrausChannel ch{din, dout, {}};
  for (std::size_t i = 0; i < nk; ++i) {
    CMatrix k(dout, din);
    for (int b = 0; b < dout; ++b)
      for (int a = 0; a < din; ++a) {
        double re = 0, im = 0;
        if (!(is >> re >> im)) throw std::runtime_error("channel parse: truncated data");
        k(b, a) = cx(re, im);
      }
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

void save_channel(const std::string& path, const KrausChannel& ch) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_channel: cannot open " + path);
  write_channel(f, ch);
  if (!f) throw std::runtime_error("save_channel: write failed for " + path);
}

KrausChannel load_channel(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_channel: cannot open " + path);
  return read_channel(f);
}

KrausChannel random_channel(int dim_in, int dim_out, int rank, Rng& rng) {
  if (rank < 1) throw std::invalid_argument("random_channel: rank must be >= 1");
  if (dim_out * rank < dim_in)
    throw std::invalid_argument("random_channel: rank too small for an isometry");
  CMatrix s = random_isometry(dim_out * rank, dim_in, rng);
  KrausChannel ch{dim_in, dim_out, {}};
  for (int e = 0; e < rank; ++e) {
    CMatrix k(dim_out, dim_in);
    for (int b = 0; b < dim_out; ++b) k.row(b) = s.row(b * rank + e);
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

}  // namespace qaec
