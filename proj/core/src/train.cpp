#include "qaec/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qaec/linalg.hpp"
#include "qaec/rng.hpp"

namespace qaec {

namespace {
std::atomic<int> g_train_threads{1};
constexpr int kChunk = 64;
}  // namespace

void set_train_threads(int n) { g_train_threads.store(std::max(1, n)); }
int train_threads() { return g_train_threads.load(); }

QaeParams init_params(const QaeArchitecture& arch, const TrainConfig& cfg) {
  validate(arch);
  Rng rng(cfg.seed, 0);
  const int du = 1 << (arch.n + arch.n_B);
  const int dv = 1 << (arch.k + arch.n_E);
  QaeParams p;
  p.arch = arch;
  p.gen_U = random_hermitian(du, cfg.init_scale, rng);
  p.gen_V = random_hermitian(dv, cfg.init_scale, rng);
  return p;
}

namespace {

struct SpectralUnitary {
  RVector values;
  CMatrix vectors;
  CMatrix u;
};

SpectralUnitary spectral_unitary(const CMatrix& h) {
  SpectralUnitary s;
  EigHermitian e = eig_hermitian(h);
  s.values = e.values;
  s.vectors = e.vectors;
  CVector phases(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) phases(i) = std::exp(cx(0.0, e.values(i)));
  s.u = e.vectors * phases.asDiagonal() * e.vectors.adjoint();
  return s;
}

// Divided-difference kernel of exp(i .) at the eigenvalues; the diagonal
// limit handles clusters tighter than 1e-9.
CMatrix exp_kernel(const RVector& lam) {
  const Eigen::Index n = lam.size();
  CMatrix phi(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      double diff = lam(a) - lam(b);
      if (std::abs(diff) < 1e-9) {
        phi(a, b) = cx(0.0, 1.0) * std::exp(cx(0.0, 0.5 * (lam(a) + lam(b))));
      } else {
        phi(a, b) = (std::exp(cx(0.0, lam(a))) - std::exp(cx(0.0, lam(b)))) / diff;
      }
    }
  return phi;
}

// dF = 2 Re Tr[W^dag dU] pulled back through U = exp(iH): returns the
// Hermitian gradient with respect to H.
CMatrix chain_to_generator(const CMatrix& w, const SpectralUnitary& s) {
  CMatrix a = s.vectors.adjoint() * w.adjoint() * s.vectors;
  CMatrix phi = exp_kernel(s.values);
  CMatrix c = a.transpose().cwiseProduct(phi);
  CMatrix g = s.vectors * c.transpose() * s.vectors.adjoint();
  return g + g.adjoint();
}

struct Workspace {
  int da, db, dc, dd, de, df, dg, nu, nv;
};

Workspace workspace_for(const QaeArchitecture& a) {
  Workspace w;
  w.da = 1 << a.n;
  w.db = 1 << a.n_B;
  w.dc = 1 << a.k;
  w.dd = 1 << (a.n + a.n_B - a.k);
  w.de = 1 << a.n_E;
  w.df = 1 << a.n;
  w.dg = 1 << (a.k + a.n_E - a.n);
  w.nu = w.da * w.db;
  w.nv = w.dc * w.de;
  return w;
}

// Per-sample fidelity F = sum_{g,b} |c_{gb}|^2 plus the rank-structured
// accumulators for the two unitary gradients.
double sample_terms(const Workspace& w, const CMatrix& u, const CMatrix& v, const CVector& psi,
                    bool want_grad, CMatrix* wu, CMatrix* wv) {
  CVector ain = CVector::Zero(w.nu);
  for (int a = 0; a < w.da; ++a) ain(Eigen::Index(a) * w.db) = psi(a);
  CVector uout = u * ain;

  // c(g,b) and the decoder-side vectors y_b = V (K_b psi (x) |0>)
  CMatrix c(w.dg, w.dd);
  std::vector<CVector> kpsi(w.dd), yb;
  if (want_grad) yb.resize(w.dd);
  double f = 0.0;
  for (int b = 0; b < w.dd; ++b) {
    CVector kb(w.dc);
    for (int cc = 0; cc < w.dc; ++cc) kb(cc) = uout(Eigen::Index(cc) * w.dd + b);
    kpsi[b] = kb;
    CVector z = CVector::Zero(w.nv);
    for (int cc = 0; cc < w.dc; ++cc) z(Eigen::Index(cc) * w.de) = kb(cc);
    CVector y = v * z;
    for (int g = 0; g < w.dg; ++g) {
      cx acc = 0.0;
      for (int ff = 0; ff < w.df; ++ff) acc += std::conj(psi(ff)) * y(Eigen::Index(ff) * w.dg + g);
      c(g, b) = acc;
      f += std::norm(acc);
    }
    if (want_grad) yb[b] = std::move(y);
  }
  if (!want_grad) return f;

  // w_g = E-zero slice of V^dag (psi (x) e_g)
  CMatrix psig = CMatrix::Zero(w.nv, w.dg);
  for (int ff = 0; ff < w.df; ++ff)
    for (int g = 0; g < w.dg; ++g) psig(Eigen::Index(ff) * w.dg + g, g) = psi(ff);
  CMatrix vdag_psig = v.adjoint() * psig;

  // encoder gradient: W_U += s ain^dag with s[(c,b)] = sum_g c(g,b) w_g[c]
  CVector s = CVector::Zero(w.nu);
  for (int b = 0; b < w.dd; ++b)
    for (int cc = 0; cc < w.dc; ++cc) {
      cx acc = 0.0;
      for (int g = 0; g < w.dg; ++g) acc += c(g, b) * vdag_psig(Eigen::Index(cc) * w.de, g);
      s(Eigen::Index(cc) * w.dd + b) = acc;
    }
  wu->noalias() += s * ain.adjoint();

  // decoder gradient: W_V += sum_b t_b z_b^dag with t_b[(f,g)] = psi_f c(g,b)
  for (int b = 0; b < w.dd; ++b) {
    CVector t = CVector::Zero(w.nv);
    for (int ff = 0; ff < w.df; ++ff)
      for (int g = 0; g < w.dg; ++g) t(Eigen::Index(ff) * w.dg + g) = psi(ff) * c(g, b);
    CVector z = CVector::Zero(w.nv);
    for (int cc = 0; cc < w.dc; ++cc) z(Eigen::Index(cc) * w.de) = kpsi[b](cc);
    wv->noalias() += t * z.adjoint();
  }
  return f;
}

}  // namespace

namespace {

// Runs sample_terms over fixed-size chunks, possibly on worker threads; the
// chunk partition and the merge order never depend on the thread count.
void accumulate_samples(const Workspace& w, const CMatrix& u, const CMatrix& v,
                        const std::vector<CVector>& states, bool want_grad,
                        std::vector<double>& fs, CMatrix* wu, CMatrix* wv) {
  const std::size_t n = states.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  fs.assign(n, 0.0);
  std::vector<CMatrix> wu_c, wv_c;
  if (want_grad) {
    wu_c.assign(chunks, CMatrix::Zero(w.nu, w.nu));
    wv_c.assign(chunks, CMatrix::Zero(w.nv, w.nv));
  }
  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i)
      fs[i] = sample_terms(w, u, v, states[i], want_grad, want_grad ? &wu_c[c] : nullptr,
                           want_grad ? &wv_c[c] : nullptr);
  };
  const int workers = std::min<int>(train_threads(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }
  if (want_grad)
    for (std::size_t c = 0; c < chunks; ++c) {
      *wu += wu_c[c];
      *wv += wv_c[c];
    }
}

}  // namespace

LossGradient loss_and_gradient(const QaeParams& p, const std::vector<CVector>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
  Workspace w = workspace_for(p.arch);
  for (const auto& psi : batch)
    if (psi.size() != w.da) throw std::invalid_argument("loss_and_gradient: sample dim mismatch");

  SpectralUnitary su = spectral_unitary(p.gen_U);
  SpectralUnitary sv = spectral_unitary(p.gen_V);
  CMatrix wu = CMatrix::Zero(w.nu, w.nu);
  CMatrix wv = CMatrix::Zero(w.nv, w.nv);
  std::vector<double> fs;
  accumulate_samples(w, su.u, sv.u, batch, true, fs, &wu, &wv);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  LossGradient out;
  out.loss = 1.0 - pairwise_mean(fs);
  out.grad_U = -inv_b * chain_to_generator(wu, su);
  out.grad_V = -inv_b * chain_to_generator(wv, sv);
  return out;
}

namespace {

struct AdamState {
  CMatrix m;
  Eigen::MatrixXd v_re, v_im;
  int t = 0;

  explicit AdamState(int dim)
      : m(CMatrix::Zero(dim, dim)),
        v_re(Eigen::MatrixXd::Zero(dim, dim)),
        v_im(Eigen::MatrixXd::Zero(dim, dim)) {}

  void update(CMatrix& param, const CMatrix& grad, const TrainConfig& cfg) {
    ++t;
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v_re = cfg.adam_beta2 * v_re + (1.0 - cfg.adam_beta2) * grad.real().cwiseAbs2().matrix();
    v_im = cfg.adam_beta2 * v_im + (1.0 - cfg.adam_beta2) * grad.imag().cwiseAbs2().matrix();
    double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for (Eigen::Index i = 0; i < param.rows(); ++i)
      for (Eigen::Index j = 0; j < param.cols(); ++j) {
        double mr = m(i, j).real() / bc1, mi = m(i, j).imag() / bc1;
        double vr = v_re(i, j) / bc2, vi = v_im(i, j) / bc2;
        param(i, j) -= cfg.learning_rate *
                       cx(mr / (std::sqrt(vr) + cfg.adam_eps), mi / (std::sqrt(vi) + cfg.adam_eps));
      }
  }
};

double eval_infidelity(const QaeParams& p, const std::vector<CVector>& states) {
  Workspace w = workspace_for(p.arch);
  SpectralUnitary su = spectral_unitary(p.gen_U);
  SpectralUnitary sv = spectral_unitary(p.gen_V);
  std::vector<double> fs;
  accumulate_samples(w, su.u, sv.u, states, false, fs, nullptr, nullptr);
  return 1.0 - pairwise_mean(fs);
}

}  // namespace

TrainTrace train(const QaeArchitecture& arch, const std::vector<CVector>& train_states,
                 const std::vector<CVector>& test_states, const TrainConfig& cfg,
                 const TrainOptions& opts) {
  if (train_states.empty()) throw std::invalid_argument("train: no training states");
  if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.learning_rate <= 0.0)
    throw std::invalid_argument("train: bad config");

  QaeParams params = init_params(arch, cfg);
  AdamState adam_u(static_cast<int>(params.gen_U.rows()));
  AdamState adam_v(static_cast<int>(params.gen_V.rows()));
  Rng shuffle_rng(cfg.seed, 1);

  std::vector<int> order(train_states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  TrainTrace trace;
  trace.per_epoch.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (opts.steps_per_epoch > 0) {
      for (int s = 0; s < opts.steps_per_epoch; ++s) {
        LossGradient lg = loss_and_gradient(params, train_states);
        adam_u.update(params.gen_U, lg.grad_U, cfg);
        adam_v.update(params.gen_V, lg.grad_V, cfg);
      }
    } else {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        std::size_t stop = std::min(order.size(), start + cfg.batch_size);
        std::vector<CVector> batch;
        batch.reserve(stop - start);
        for (std::size_t i = start; i < stop; ++i) batch.push_back(train_states[order[i]]);
        LossGradient lg = loss_and_gradient(params, batch);
        adam_u.update(params.gen_U, lg.grad_U, cfg);
        adam_v.update(params.gen_V, lg.grad_V, cfg);
      }
    }
    double train_inf, test_inf;
    if (opts.exact_eval) {
      double f = opts.exact_eval(encoder_channel(params), decoder_channel(params));
      train_inf = test_inf = 1.0 - f;
    } else {
      train_inf = eval_infidelity(params, train_states);
      test_inf = test_states.empty() ? train_inf : eval_infidelity(params, test_states);
    }
    trace.per_epoch.emplace_back(train_inf, test_inf);
  }
  trace.final_params = std::move(params);
  return trace;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(trim(item)));
  return out;
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_experiment: cannot open " + path);
  ExperimentSpec spec;
  std::uint64_t base_seed = 0;
  int reps = 5;
  bool have_seeds = false;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("parse_experiment: expected key=value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "source") spec.source = val;
    else if (key == "path") spec.path = val;
    else if (key == "epsilon") spec.epsilon = std::stod(val);
    else if (key == "n") spec.n = std::stoi(val);
    else if (key == "k") spec.k = std::stoi(val);
    else if (key == "nB") spec.n_Bs = parse_int_list(val);
    else if (key == "nE") spec.n_Es = parse_int_list(val);
    else if (key == "epochs") spec.cfg.epochs = std::stoi(val);
    else if (key == "lr") spec.cfg.learning_rate = std::stod(val);
    else if (key == "batch") spec.cfg.batch_size = std::stoi(val);
    else if (key == "init_scale") spec.cfg.init_scale = std::stod(val);
    else if (key == "train_count") spec.train_count = std::stoi(val);
    else if (key == "test_count") spec.test_count = std::stoi(val);
    else if (key == "seeds") {
      have_seeds = true;
      for (int s : parse_int_list(val)) spec.seeds.push_back(static_cast<std::uint64_t>(s));
    } else if (key == "seed") base_seed = std::stoull(val);
    else if (key == "reps") reps = std::stoi(val);
    else if (key == "mode") {
      if (val == "sampled") spec.mode = TrainMode::Sampled;
      else if (val == "five_point") spec.mode = TrainMode::FivePoint;
      else if (val == "exact_mu1") spec.mode = TrainMode::ExactMu1;
      else throw std::runtime_error("parse_experiment: unknown mode " + val);
    } else {
      throw std::runtime_error("parse_experiment: unknown key " + key);
    }
  }
  if (!have_seeds)
    for (int r = 0; r < reps; ++r) spec.seeds.push_back(base_seed + r);
  if (spec.n_Bs.size() != spec.n_Es.size() || spec.n_Bs.empty())
    throw std::runtime_error("parse_experiment: nB and nE must be nonempty lists of equal length");
  if (spec.source.empty()) throw std::runtime_error("parse_experiment: missing source");
  return spec;
}

namespace {

std::string arch_label(const QaeArchitecture& a) {
  std::ostringstream os;
  os << '(' << a.n << ',' << a.k << ',' << a.n_B << ',' << a.n_E << ')';
  return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string curves_path = (fs::path(out_dir) / "curves.csv").string();
  const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();

  std::ofstream curves(curves_path);
  if (!curves) throw std::runtime_error("run_experiment: cannot write " + curves_path);
  curves << "epoch,train_infidelity,test_infidelity,seed,arch\n";
  curves << std::setprecision(12);

  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("run_experiment: cannot write " + summary_path);
  summary << "arch,n,k,nB,nE,reps,final_mean_test_infidelity,final_2sigma\n";
  summary << std::setprecision(12);

  for (std::size_t ai = 0; ai < spec.n_Bs.size(); ++ai) {
    QaeArchitecture arch{spec.n, spec.k, spec.n_Bs[ai], spec.n_Es[ai]};
    validate(arch);
    std::vector<double> finals;
    for (std::uint64_t seed : spec.seeds) {
      TrainConfig cfg = spec.cfg;
      cfg.seed = seed;
      std::vector<CVector> train_states, test_states;
      TrainOptions opts;
      if (spec.mode == TrainMode::FivePoint) {
        if (spec.source != "phase")
          throw std::runtime_error("run_experiment: five_point mode requires the phase source");
        for (int j = 0; j < 5; ++j)
          train_states.push_back(phase_state(2.0 * std::numbers::pi * j / 5.0, 2));
        opts.steps_per_epoch = (spec.train_count + cfg.batch_size - 1) / cfg.batch_size;
        opts.exact_eval = [](const KrausChannel& e, const KrausChannel& d) {
          return five_point_phase_fidelity(e, d);
        };
      } else {
        SourceEnsemble src;
        if (spec.source == "mu1") src = mu1_source(1 << spec.n, spec.epsilon, seed);
        else if (spec.source == "haar") src = haar_source(1 << spec.n, seed);
        else if (spec.source == "phase") {
          if (spec.n == 2) src = phase_source(seed);
          else src = phase_extended_source(spec.n, seed);
        } else if (spec.source == "file") {
          src = load_empirical(spec.path);
        } else {
          throw std::runtime_error("run_experiment: unknown source " + spec.source);
        }
        if (src.kind == SourceKind::Empirical) {
          if (static_cast<int>(src.states.size()) < spec.train_count + spec.test_count)
            throw std::runtime_error("run_experiment: state file too small for split");
          train_states.assign(src.states.begin(), src.states.begin() + spec.train_count);
          test_states.assign(src.states.begin() + spec.train_count,
                             src.states.begin() + spec.train_count + spec.test_count);
        } else {
          train_states = sample(src, spec.train_count, 0);
          test_states = sample(src, spec.test_count, 1);
        }
        if (spec.mode == TrainMode::ExactMu1) {
          if (spec.source != "mu1")
            throw std::runtime_error("run_experiment: exact_mu1 mode requires the mu1 source");
          double eps = spec.epsilon;
          opts.exact_eval = [eps](const KrausChannel& e, const KrausChannel& d) {
            return exact_mu1_fidelity(e, d, eps);
          };
        }
      }
      TrainTrace trace = train(arch, train_states, test_states, cfg, opts);
      for (std::size_t ep = 0; ep < trace.per_epoch.size(); ++ep)
        curves << ep << ',' << trace.per_epoch[ep].first << ',' << trace.per_epoch[ep].second
               << ',' << seed << ',' << arch_label(arch) << '\n';
      finals.push_back(trace.per_epoch.empty() ? 1.0 : trace.per_epoch.back().second);
    }
    double mean = pairwise_mean(finals);
    double var = 0.0;
    for (double fv : finals) var += (fv - mean) * (fv - mean);
    var = finals.size() > 1 ? var / (finals.size() - 1) : 0.0;
    summary << arch_label(arch) << ',' << arch.n << ',' << arch.k << ',' << arch.n_B << ','
            << arch.n_E << ',' << finals.size() << ',' << mean << ',' << 2.0 * std::sqrt(var)
            << '\n';
  }
  curves.close();
  summary.close();
  if (!curves || !summary) throw std::runtime_error("run_experiment: write failure");
  return {{curves_path, summary_path}};
}

}  // namespace qaec
