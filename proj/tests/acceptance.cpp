// Acceptance checklist: one pass/fail line per criterion, nonzero exit on
// any failure. Criteria 7-9 run full trainings and dominate the runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qaec/analytic.hpp"
#include "qaec/channel.hpp"
#include "qaec/linalg.hpp"
#include "qaec/mnist.hpp"
#include "qaec/qae.hpp"
#include "qaec/sources.hpp"
#include "qaec/train.hpp"
#include "support.hpp"

using namespace qaec;
using testsupport::mixed_ancilla_decoder;
using testsupport::mixed_ancilla_encoder;
using testsupport::random_fixing_pipeline;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  s.mean = pairwise_mean(xs);
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  if (xs.size() > 1) var /= (xs.size() - 1.0);
  s.sd = std::sqrt(var);
  return s;
}

double pooled_sd(const Stats& a, const Stats& b, int n) {
  return std::sqrt(((n - 1) * a.sd * a.sd + (n - 1) * b.sd * b.sd) / (2.0 * n - 2.0));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

TrainConfig paper_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 64;
  cfg.seed = seed;
  return cfg;
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

std::vector<double> train_finals_mu1(const QaeArchitecture& arch, double eps) {
  std::vector<double> finals;
  for (std::uint64_t seed : kSeeds) {
    SourceEnsemble src = mu1_source(1 << arch.n, eps, seed);
    TrainTrace trace =
        train(arch, sample(src, 2000, 0), sample(src, 1000, 1), paper_config(seed));
    finals.push_back(trace.per_epoch.back().second);
  }
  return finals;
}

// Deterministic stand-in for the image corpus: the preparation pipeline's
// guarantees are content independent, so smooth synthetic images exercise it
// end to end without the external download.
std::vector<Image> synthetic_images(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Image> images(count);
  for (auto& img : images) {
    const int blobs = 2 + static_cast<int>(rng.next_below(3));
    for (int b = 0; b < blobs; ++b) {
      double cy = 4.0 + 20.0 * rng.uniform();
      double cx_ = 4.0 + 20.0 * rng.uniform();
      double s = 1.5 + 3.0 * rng.uniform();
      double amp = 0.3 + 0.7 * rng.uniform();
      for (int y = 0; y < 28; ++y)
        for (int x = 0; x < 28; ++x) {
          double d2 = (y - cy) * (y - cy) + (x - cx_) * (x - cx_);
          img[y * 28 + x] += amp * std::exp(-d2 / (2.0 * s * s));
        }
    }
    for (double& p : img) p = std::min(1.0, p);
  }
  return images;
}

const std::vector<CVector>& prepared_synthetic_states() {
  static const std::vector<CVector> states = [] {
    std::vector<Image> images = synthetic_images(3000, 2026);
    PrepConfig cfg{3, 1, 0.9};
    std::vector<CVector> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(prepare_state(img, cfg).ket);
    return out;
  }();
  return states;
}

// ---- criteria ----------------------------------------------------------

void criterion_1(Outcome& o) {
  const int pairs[4][2] = {{4, 2}, {8, 2}, {8, 4}, {16, 2}};
  for (auto [d, m] : pairs) {
    auto [enc, dec] = haar_optimal_pair(d, m);
    double exact = exact_haar_fidelity(enc, dec);
    double target = (d + double(m) * m) / (double(d) * (d + 1));
    o.require(std::abs(exact - target) < 1e-12,
              "closed form off at d=" + std::to_string(d) + " m=" + std::to_string(m));

    SourceEnsemble src = haar_source(d, 1000 + d + m);
    std::vector<double> fs;
    for (const auto& psi : sample(src, 20000)) fs.push_back(pipeline_fidelity(enc, dec, psi));
    Stats s = stats(fs);
    double se = s.sd / std::sqrt(double(fs.size()));
    o.require(std::abs(s.mean - target) <= 3.0 * se,
              "Monte Carlo off at d=" + std::to_string(d) + ": " + fmt(s.mean) + " vs " +
                  fmt(target));
  }
}

void criterion_2(Outcome& o) {
  auto [enc, dec] = phase_family_achiever();
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    double phi = 2.0 * kPi * rng.uniform();
    double f = pipeline_fidelity(enc, dec, phase_state(phi, 2));
    o.require(std::abs(f - 0.75) < 1e-12, "per-phase fidelity off at phi=" + fmt(phi));
  }
  o.require(std::abs(five_point_phase_fidelity(enc, dec) - 0.75) < 1e-12, "five-point value off");
}

void criterion_3(Outcome& o) {
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    KrausChannel enc = random_channel(4, 2, 2 + static_cast<int>(rng.next_below(3)), rng);
    KrausChannel dec = random_channel(2, 4, 1 + static_cast<int>(rng.next_below(2)), rng);
    double five = five_point_phase_fidelity(enc, dec);
    double quad = 0.0;
    const int n = 10000;
    for (int j = 0; j < n; ++j)
      quad += pipeline_fidelity(enc, dec, phase_state(2.0 * kPi * j / n, 2));
    quad /= n;
    o.require(std::abs(five - quad) < 1e-9, "five-point vs quadrature rep " + std::to_string(rep));
  }
}

void criterion_4(Outcome& o) {
  std::vector<double> phis3 = {0.0, kPi / 6.0, 5.0 * kPi / 6.0};
  std::vector<CVector> ins3;
  for (double p : phis3) ins3.push_back(phase_state(p, 2));
  GramCriterionReport r3 = gram_criterion(ins3, projected_phase_states(kPi / 4.0, 0.0, phis3));
  o.require(std::abs(r3.min_eigenvalue + 0.75) < 1e-9,
            "pi/4 witness min eigenvalue " + fmt(r3.min_eigenvalue));
  o.require(!r3.feasible, "pi/4 witness must be infeasible");

  std::vector<double> phis4 = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
  std::vector<CVector> ins4;
  for (double p : phis4) ins4.push_back(phase_state(p, 2));
  GramCriterionReport r4 = gram_criterion(ins4, projected_phase_states(0.0, 0.0, phis4));
  o.require(std::abs(r4.min_eigenvalue + 0.2) < 1e-9,
            "four-phase witness min eigenvalue " + fmt(r4.min_eigenvalue));
  o.require(!r4.feasible, "four-phase witness must be infeasible");
}

void criterion_5(Outcome& o) {
  const int pairs[3][2] = {{4, 2}, {8, 2}, {8, 4}};
  for (auto [d, m] : pairs) {
    CMatrix p = CMatrix::Zero(d, d);
    for (int j = 0; j < m; ++j) p(j, j) = 1.0;
    auto [enc, dec] = reset_construction(Projector{p, m}, d, m);
    double c_star = double(d - m) / (d - 1);
    double eps = 1e-5;
    double slope = (1.0 - exact_mu1_fidelity(enc, dec, eps)) / eps;
    o.require(std::abs(slope - c_star) <= 1e-5 * c_star,
              "slope off at d=" + std::to_string(d) + " m=" + std::to_string(m) + ": " +
                  fmt(slope));
    BlockDecomposition bd = block_decompose(compose(dec, enc));
    o.require(std::abs(first_order_coefficient(bd, d) - c_star) < 1e-9,
              "block coefficient off at d=" + std::to_string(d));
  }
}

void criterion_6(Outcome& o) {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    auto [enc, dec] = random_fixing_pipeline(4, 2, rng);
    double f1 = exact_mu1_fidelity(enc, dec, 0.1);
    double f2 = exact_mu1_fidelity(enc, dec, 0.2);
    double f3 = exact_mu1_fidelity(enc, dec, 0.3);
    double f4 = exact_mu1_fidelity(enc, dec, 0.4);
    double residual = std::abs((f1 - 3.0 * f2 + 3.0 * f3) - f4);  // third difference
    o.require(residual < 1e-9, "quadratic residual " + fmt(residual) + " at rep " +
                                   std::to_string(rep));
  }
}

void criterion_7(Outcome& o) {
  std::vector<double> conv = train_finals_mu1({2, 1, 0, 1}, 0.1);
  std::vector<double> mid = train_finals_mu1({2, 1, 0, 2}, 0.1);
  std::vector<double> gold = train_finals_mu1({2, 1, 1, 2}, 0.1);
  Stats sc = stats(conv), sm = stats(mid), sg = stats(gold);
  o.detail << "finals: (2,1,0,1)=" << fmt(sc.mean) << " (2,1,0,2)=" << fmt(sm.mean)
           << " (2,1,1,2)=" << fmt(sg.mean);
  o.require(sc.mean > sm.mean && sm.mean > sg.mean, "ordering violated");
  o.require(sc.mean - sm.mean > 2.0 * pooled_sd(sc, sm, 5), "gap conv-mid below 2 pooled sigma");
  o.require(sm.mean - sg.mean > 2.0 * pooled_sd(sm, sg, 5), "gap mid-gold below 2 pooled sigma");
  o.require(sc.mean >= 0.09 && sc.mean <= 0.115, "(2,1,0,1) final outside [0.09, 0.115]");
  o.require(sg.mean >= 0.060 && sg.mean <= 0.075, "(2,1,1,2) final outside [0.060, 0.075]");
}

void criterion_8(Outcome& o) {
  std::vector<CVector> five;
  for (int j = 0; j < 5; ++j) five.push_back(phase_state(2.0 * kPi * j / 5.0, 2));
  TrainOptions opts;
  opts.steps_per_epoch = (2000 + 63) / 64;  // optimizer work per epoch as in sampled mode
  opts.exact_eval = [](const KrausChannel& e, const KrausChannel& d) {
    return five_point_phase_fidelity(e, d);
  };
  auto finals_for = [&](const QaeArchitecture& arch) {
    std::vector<double> finals;
    for (std::uint64_t seed : kSeeds) {
      TrainTrace t = train(arch, five, {}, paper_config(seed), opts);
      finals.push_back(t.per_epoch.back().second);
    }
    return finals;
  };
  std::vector<double> iso = finals_for({2, 1, 1, 1});
  std::vector<double> wide = finals_for({2, 1, 1, 2});
  double best_iso = *std::min_element(iso.begin(), iso.end());
  double best_wide = *std::min_element(wide.begin(), wide.end());
  o.detail << "best n_E=1: " << fmt(best_iso) << ", best n_E=2: " << fmt(best_wide);
  o.require(best_wide <= 0.2501, "n_E=2 fails to reach 0.2501");
  for (double f : iso) o.require(f >= 0.2501, "n_E=1 final " + fmt(f) + " below 0.2501");
  o.require(best_iso > best_wide, "n_E=1 does not exceed n_E=2");
}

void criterion_9(Outcome& o) {
  const std::vector<CVector>& all = prepared_synthetic_states();
  std::vector<CVector> train_states(all.begin(), all.begin() + 2000);
  std::vector<CVector> test_states(all.begin() + 2000, all.begin() + 3000);
  auto finals_for = [&](const QaeArchitecture& arch) {
    std::vector<double> finals;
    for (std::uint64_t seed : kSeeds) {
      TrainTrace t = train(arch, train_states, test_states, paper_config(seed));
      finals.push_back(t.per_epoch.back().second);
    }
    return stats(finals);
  };
  Stats conv = finals_for({3, 1, 0, 2});
  Stats tight = finals_for({3, 1, 1, 2});
  Stats extra = finals_for({3, 1, 1, 3});
  o.detail << "finals: (3,1,0,2)=" << fmt(conv.mean) << " (3,1,1,2)=" << fmt(tight.mean)
           << " (3,1,1,3)=" << fmt(extra.mean);
  double big_gap = conv.mean - tight.mean;
  double small_gap = std::abs(tight.mean - extra.mean);
  o.require(big_gap > 0.0, "no visible gap to the conventional architecture");
  o.require(small_gap < 0.1 * big_gap,
            "decoder-ancilla gap " + fmt(small_gap) + " not below 10% of " + fmt(big_gap));
}

void criterion_10(Outcome& o) {
  ConcentrationReport rep = concentration_bound(phase_source(0), 2);
  o.require(std::abs(rep.s_m - 0.75) < 1e-12, "s_2 off");
  o.require(std::abs(rep.eta_m - 0.25) < 1e-12, "eta_2 off");
  o.require(std::abs(rep.lower_bound_ratio - 0.875) < 1e-12, "ratio bound off");
  o.require(rep.b_mu_lower >= 0.65625 - 1e-10, "b_mu_lower below the explicit floor");
  auto [enc, dec] = concentration_pair(rep.p_star, rep.xi, 2);
  double sim = five_point_phase_fidelity(enc, dec);
  o.require(std::abs(sim - rep.b_mu_lower) < 1e-9,
            "direct simulation " + fmt(sim) + " vs bound " + fmt(rep.b_mu_lower));
}

void criterion_11(Outcome& o) {
  Rng rng(10);
  const int dims[2] = {2, 4};
  // Choi round trips
  for (int rep = 0; rep < 100; ++rep) {
    int din = dims[rng.next_below(2)], dout = dims[rng.next_below(2)];
    int rank = std::max((din + dout - 1) / dout, 1 + static_cast<int>(rng.next_below(3)));
    KrausChannel ch = random_channel(din, dout, rank, rng);
    KrausChannel back = choi_to_kraus(to_choi(ch));
    for (int i = 0; i < din && o.pass; ++i)
      for (int j = 0; j < din; ++j) {
        CMatrix unit = CMatrix::Zero(din, din);
        unit(i, j) = 1.0;
        if ((back.apply(unit) - ch.apply(unit)).norm() > 1e-9) {
          o.require(false, "choi round trip rep " + std::to_string(rep));
          break;
        }
      }
  }
  // link products against direct composition
  for (int rep = 0; rep < 100; ++rep) {
    int da = dims[rng.next_below(2)], db = dims[rng.next_below(2)], dc = dims[rng.next_below(2)];
    KrausChannel f = random_channel(da, db, std::max(1, (da + db - 1) / db), rng);
    KrausChannel g = random_channel(db, dc, std::max(1, (db + dc - 1) / dc), rng);
    CMatrix linked = link_product(to_choi(g), to_choi(f)).matrix;
    CMatrix direct = to_choi(compose(g, f)).matrix;
    o.require((linked - direct).norm() < 1e-9, "link product rep " + std::to_string(rep));
  }
  // Stinespring reconstruction
  for (int rep = 0; rep < 100; ++rep) {
    int din = dims[rng.next_below(2)], dout = dims[rng.next_below(2)];
    int rank = std::max((din + dout - 1) / dout, 1 + static_cast<int>(rng.next_below(3)));
    KrausChannel ch = random_channel(din, dout, rank, rng);
    CMatrix v = stinespring(ch);
    CVector psi = rng.unit_vector(din);
    CMatrix big = v * proj(psi) * v.adjoint();
    CMatrix rec = partial_trace(big, {dout, static_cast<int>(ch.kraus.size())}, Keep::First);
    o.require((rec - ch.apply(proj(psi))).norm() < 1e-10,
              "stinespring rep " + std::to_string(rep));
  }
  // pure-ancilla gauge decomposition
  QaeArchitecture arch{2, 1, 1, 2};
  std::vector<CVector> probe;
  for (int i = 0; i < 3; ++i) probe.push_back(rng.unit_vector(4));
  for (int rep = 0; rep < 100; ++rep) {
    QaeParams p{arch, random_hermitian(8, 0.4, rng), random_hermitian(8, 0.4, rng)};
    CMatrix sb = testsupport::random_density(2, rng);
    CMatrix te = testsupport::random_density(4, rng);
    KrausChannel enc_mixed = mixed_ancilla_encoder(arch, encoder_unitary(p), sb);
    KrausChannel dec_mixed = mixed_ancilla_decoder(arch, decoder_unitary(p), te);
    double f_mixed = average_fidelity(enc_mixed, dec_mixed, probe).mean_fidelity;
    double f_sum = 0.0, f_best = 0.0;
    for (const auto& [w, q] : purify_ancilla_gauge(p, sb, te)) {
      double f = average_fidelity(encoder_channel(q), decoder_channel(q), probe).mean_fidelity;
      f_sum += w * f;
      f_best = std::max(f_best, f);
    }
    o.require(std::abs(f_sum - f_mixed) < 1e-9, "gauge sum rep " + std::to_string(rep));
    o.require(f_best >= f_mixed - 1e-9, "gauge max rep " + std::to_string(rep));
  }
}

void criterion_12(Outcome& o) {
  const std::vector<CVector>& states = prepared_synthetic_states();
  int good = 0;
  for (const auto& psi : states)
    if (std::abs(psi.head(2).squaredNorm() - 0.9) <= 1e-9) ++good;
  double frac = double(good) / states.size();
  o.detail << "head-mass fraction " << fmt(frac);
  o.require(frac >= 0.99, "fewer than 99% of states at the target head mass");
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::function<void(Outcome&)> fn;
    double budget_s;
  };
  const std::vector<Entry> entries = {
      {1, "Haar optimum closed form and Monte Carlo", criterion_1, 10},
      {2, "phase-family rank-2 achiever at 3/4", criterion_2, 1},
      {3, "five-point rule equals dense quadrature", criterion_3, 30},
      {4, "Gram infeasibility certificates", criterion_4, 1},
      {5, "reset-channel first-order coefficient", criterion_5, 5},
      {6, "quadratic-in-epsilon law", criterion_6, 10},
      {7, "mu1 architecture ordering with brackets", criterion_7, 900},
      {8, "five-point isometric vs non-isometric gap", criterion_8, 600},
      {9, "prepared-source decoder-ancilla trend", criterion_9, 1200},
      {10, "spectral concentration consistency", criterion_10, 5},
      {11, "channel-calculus property suite", criterion_11, 60},
      {12, "prepared-state head energy", criterion_12, 30},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  for (const auto& e : entries) {
    if (only != 0 && e.id != only) continue;
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < e.budget_s, "runtime " + fmt(secs) + "s over budget " + fmt(e.budget_s) + "s");
    all_pass = all_pass && o.pass;
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", e.id, e.name,
                secs, o.detail.str().empty() ? "" : " -- ", o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all_pass ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
  return all_pass ? 0 : 1;
}
