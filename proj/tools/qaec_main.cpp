#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaec/analytic.hpp"
#include "qaec/channel.hpp"
#include "qaec/mnist.hpp"
#include "qaec/qae.hpp"
#include "qaec/sources.hpp"
#include "qaec/train.hpp"
#include "qaec/version.hpp"

namespace {

using namespace qaec;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.12g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(ss.str()));
  return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& digest, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config_digest"] = digest;
  m["seed"] = seed;
  m["tool_version"] = kVersion;
  m["outputs"] = outputs;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest " + path);
  f << m.dump(2) << '\n';
}

SourceEnsemble source_from_flags(const std::string& name, int d, double eps, int n,
                                 const std::string& path, std::uint64_t seed) {
  if (name == "phase") return phase_source(seed);
  if (name == "phase_extended") return phase_extended_source(n, seed);
  if (name == "haar") return haar_source(d, seed);
  if (name == "mu1") return mu1_source(d, eps, seed);
  if (name == "file") return load_empirical(path);
  throw CLI::ValidationError("--source", "unknown source " + name);
}

int cmd_oracle_gram(const std::string& witness, double t, double gamma,
                    const std::string& phi_list) {
  std::vector<double> phis;
  if (!witness.empty()) {
    const double pi = std::numbers::pi;
    if (witness == "t0-fourphase") {
      t = 0.0;
      gamma = 0.0;
      phis = {0.0, pi / 2.0, pi, 3.0 * pi / 2.0};
    } else if (witness == "tpi8-fourphase") {
      t = pi / 8.0;
      gamma = 0.0;
      phis = {0.0, pi / 2.0, pi, 3.0 * pi / 2.0};
    } else if (witness == "tpi4-threephase") {
      t = pi / 4.0;
      gamma = 0.0;
      phis = {0.0, pi / 6.0, 5.0 * pi / 6.0};
    } else {
      throw CLI::ValidationError("--witness", "unknown witness " + witness);
    }
  } else {
    std::stringstream ss(phi_list);
    std::string item;
    while (std::getline(ss, item, ',')) phis.push_back(std::stod(item));
    if (phis.empty()) throw CLI::ValidationError("--phis", "no phases given");
  }
  std::vector<CVector> ins;
  for (double p : phis) ins.push_back(phase_state(p, 2));
  GramCriterionReport rep = gram_criterion(ins, projected_phase_states(t, gamma, phis));
  std::cout << (rep.feasible ? "feasible" : "infeasible") << " min_eig=" << fmt12(rep.min_eigenvalue)
            << " undefined_entries=" << rep.undefined_entries << '\n';
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"quantum-channel calculus and autoencoder workbench"};
  app.set_version_flag("--version", std::string(kVersion));
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  app.add_option("--seed", seed, "global RNG seed");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for batched evaluation");
  app.require_subcommand(1);

  // ---- oracle ----------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "closed-form optima, bounds and certificates");
  oracle->require_subcommand(1);

  int d = 4, m = 2, n = 3;
  double c = 0.5, eps = 0.1, t_arg = 0.0, gamma_arg = 0.0;
  std::string src_name = "phase", src_path, witness, phis_arg;
  std::string enc_path, dec_path;

  auto* haar_opt = oracle->add_subcommand("haar-opt", "optimal Haar-average fidelity");
  haar_opt->add_option("--d", d)->required();
  haar_opt->add_option("--m", m)->required();
  haar_opt->callback([&] { std::cout << fmt12(haar_optimum(d, m)) << '\n'; });

  auto* mixture = oracle->add_subcommand("mixture", "Haar mixture with a compressible prior");
  mixture->add_option("--d", d)->required();
  mixture->add_option("--m", m)->required();
  mixture->add_option("--c", c)->required();
  mixture->callback([&] { std::cout << fmt12(haar_mixture_value(d, m, c)) << '\n'; });

  auto* iso = oracle->add_subcommand("iso-bound", "Ky Fan bound for isometric decoders");
  iso->add_option("--source", src_name);
  iso->add_option("--m", m)->required();
  iso->add_option("--d", d);
  iso->add_option("--n", n);
  iso->add_option("--eps", eps);
  iso->add_option("--path", src_path);
  iso->callback([&] {
    std::cout << fmt12(isometric_upper_bound(source_from_flags(src_name, d, eps, n, src_path, seed), m))
              << '\n';
  });

  auto* gram = oracle->add_subcommand("gram", "pure-state transformation criterion");
  gram->add_option("--witness", witness, "t0-fourphase | tpi8-fourphase | tpi4-threephase");
  gram->add_option("--t", t_arg);
  gram->add_option("--gamma", gamma_arg);
  gram->add_option("--phis", phis_arg, "comma-separated phases");
  gram->callback([&] { cmd_oracle_gram(witness, t_arg, gamma_arg, phis_arg); });

  auto* conc = oracle->add_subcommand("concentration", "spectral concentration bounds");
  conc->add_option("--source", src_name);
  conc->add_option("--m", m)->required();
  conc->add_option("--d", d);
  conc->add_option("--n", n);
  conc->add_option("--eps", eps);
  conc->add_option("--path", src_path);
  conc->callback([&] {
    ConcentrationReport rep =
        concentration_bound(source_from_flags(src_name, d, eps, n, src_path, seed), m);
    std::cout << "s_m=" << fmt12(rep.s_m) << " eta_m=" << fmt12(rep.eta_m)
              << " ratio_bound=" << fmt12(rep.lower_bound_ratio)
              << " b_mu_lower=" << fmt12(rep.b_mu_lower) << '\n';
  });

  auto* reset = oracle->add_subcommand("reset-c", "reset-channel factorization facts");
  reset->add_option("--d", d)->required();
  reset->add_option("--m", m)->required();
  reset->callback([&] {
    CMatrix p = CMatrix::Zero(d, d);
    for (int j = 0; j < m; ++j) p(j, j) = 1.0;
    auto [enc, dec] = reset_construction(Projector{p, m}, d, m);
    BlockDecomposition bd = block_decompose(compose(dec, enc));
    std::cout << "c=" << fmt12(first_order_coefficient(bd, d))
              << " c_star=" << fmt12(double(d - m) / (d - 1))
              << " encoder_rank=" << kraus_rank(to_choi(enc)) << '\n';
  });

  auto* gap = oracle->add_subcommand("fixed-encoder-gap", "fixed suboptimal encoder comparison");
  gap->add_option("--eps", eps)->required();
  gap->callback([&] {
    auto [iso_best, nonisometric] = fixed_encoder_gap(eps);
    std::cout << "isometric_best=" << fmt12(iso_best)
              << " nonisometric=" << fmt12(nonisometric) << '\n';
  });

  auto* five = oracle->add_subcommand("five-point", "exact phase-family average");
  five->add_option("--encoder", enc_path, "channel file (defaults to the 3/4 achiever)");
  five->add_option("--decoder", dec_path);
  five->callback([&] {
    KrausChannel enc, dec;
    if (enc_path.empty() != dec_path.empty())
      throw CLI::ValidationError("--encoder", "need both --encoder and --decoder");
    if (enc_path.empty()) {
      std::tie(enc, dec) = phase_family_achiever();
    } else {
      enc = load_channel(enc_path);
      dec = load_channel(dec_path);
    }
    std::cout << fmt12(five_point_phase_fidelity(enc, dec)) << '\n';
  });

  // ---- train -----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "run a training experiment from a descriptor");
  std::string config_path;
  train_cmd->add_option("--config", config_path, "experiment descriptor")->required();
  train_cmd->callback([&] {
    set_train_threads(threads);
    ExperimentSpec spec = parse_experiment(config_path);
    if (app.count("--seed") > 0) {
      spec.seeds.clear();
      spec.seeds.push_back(seed);
    }
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> made;
    try {
      ExperimentResult res = run_experiment(spec, out_dir);
      made = res.outputs;
      std::string manifest = (fs::path(out_dir) / "manifest.json").string();
      write_manifest(manifest, "train", file_digest(config_path),
                     spec.seeds.empty() ? 0 : spec.seeds.front(), made);
      for (const auto& p : res.outputs) std::cout << p << '\n';
      std::cout << manifest << '\n';
    } catch (...) {
      for (const auto& p : made) fs::remove(p);
      fs::remove(fs::path(out_dir) / "curves.csv");
      fs::remove(fs::path(out_dir) / "summary.csv");
      throw;
    }
  });

  // ---- prepare ---------------------------------------------------------
  auto* prep = app.add_subcommand("prepare", "map IDX images to amplitude-encoded states");
  std::string mnist_path, out_path;
  int prep_n = 3, prep_k = 1, count = 3000;
  double head_energy = 0.9;
  bool audit = false;
  prep->add_option("--mnist-path", mnist_path)->required();
  prep->add_option("--n", prep_n)->required();
  prep->add_option("--k", prep_k)->required();
  prep->add_option("--head-energy", head_energy);
  prep->add_option("--count", count)->required();
  prep->add_option("--out", out_path)->required();
  prep->add_flag("--audit", audit, "print the fraction of states at the target head mass");
  prep->callback([&] {
    PrepConfig cfg{prep_n, prep_k, head_energy};
    SourceEnsemble ens = prepare_dataset(mnist_path, cfg, count);
    save_states(out_path, ens.states);
    if (audit) {
      const int m = 1 << prep_k;
      int good = 0;
      for (const auto& psi : ens.states)
        if (std::abs(psi.head(m).squaredNorm() - head_energy) <= 1e-9) ++good;
      std::cout << "head_mass_fraction=" << fmt12(double(good) / ens.states.size()) << '\n';
    }
    write_manifest(out_path + ".manifest.json", "prepare", file_digest(mnist_path), seed,
                   {out_path});
    std::cout << out_path << '\n';
  });

  // ---- validate --------------------------------------------------------
  auto* val = app.add_subcommand("validate", "inspect a channel file");
  std::string channel_path;
  val->add_option("file", channel_path, "channel file")->required();
  val->callback([&] {
    KrausChannel ch;
    try {
      ch = load_channel(channel_path);
    } catch (const std::exception& e) {
      // parse failures are usage errors by contract
      throw CLI::ValidationError("file", e.what());
    }
    CptpReport rep = validate_cptp(ch);
    std::cout << "tp=" << (rep.tp ? "true" : "false") << " cp=" << (rep.cp ? "true" : "false")
              << " rank=" << kraus_rank(to_choi(ch)) << " dim_in=" << ch.dim_in
              << " dim_out=" << ch.dim_out << " max_violation=" << fmt12(rep.max_violation)
              << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kExitOk;  // --help / --version
    app.exit(e);
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
