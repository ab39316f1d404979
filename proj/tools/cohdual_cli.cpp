// Command-line surface: roc, discriminate, duality, saturate, sweep.
//
// Exit codes: 0 success, 1 input error, 2 solver/verification failure.
// All floating-point output is printed with 9 significant digits. The --seed
// flag only affects see-saw restart randomization; every other code path is
// deterministic.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cohdual/discrimination.hpp"
#include "cohdual/duality.hpp"
#include "cohdual/ensemble_io.hpp"
#include "cohdual/measures.hpp"
#include "cohdual/quantum.hpp"

namespace {

using namespace cohdual;

std::string fm(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void print_matrix(const ComplexMatrix& m, const std::string& indent) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::string line = indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) line += "  ";
      line += "(" + fm(m(r, c).real()) + "," + fm(m(r, c).imag()) + ")";
    }
    std::cout << line << "\n";
  }
}

StateEnsemble load_with_warnings(const std::string& path) {
  LoadedEnsemble le = load_ensemble(path);
  for (const std::string& w : le.warnings) std::cerr << "warning: " << w << "\n";
  return std::move(le.ensemble);
}

int cmd_roc(const std::string& path, bool dual_only, bool primal_only) {
  StateEnsemble e = load_with_warnings(path);
  if (e.size() != 1)
    throw std::invalid_argument("states: roc expects exactly one state");
  const DensityMatrix& rho = e.state(0);
  std::cout << "command roc\n"
            << "dim " << rho.dim() << "\n";
  if (dual_only) {
    auto [dual, s] = robustness_dual(rho);
    std::cout << "c_r " << fm(dual - 1.0) << "\n"
              << "c_max " << fm(std::log2(dual)) << "\n"
              << "dual_s_min_eig " << fm(min_eigenvalue(s, 1e-6)) << "\n";
    return 0;
  }
  if (primal_only) {
    auto [primal, w] = robustness_primal(rho);
    std::cout << "c_r " << fm(primal) << "\n"
              << "c_max " << fm(std::log2(1.0 + primal)) << "\n"
              << "witness_value " << fm((w * rho.matrix()).trace().real()) << "\n";
    return 0;
  }
  CoherenceReport rep = coherence_report(rho);
  std::cout << "c_r " << fm(rep.c_r) << "\n"
            << "c_max " << fm(rep.c_max) << "\n"
            << "primal_dual_gap " << fm(rep.gap) << "\n"
            << "witness_value " << fm((rep.witness * rho.matrix()).trace().real()) << "\n"
            << "dual_s_min_eig " << fm(min_eigenvalue(rep.dual_s, 1e-6)) << "\n";
  return 0;
}

int cmd_discriminate(const std::string& path, const std::string& klass, int ancilla_dim) {
  StateEnsemble e = load_with_warnings(path);
  std::cout << "command discriminate\n"
            << "class " << klass << "\n"
            << "dim " << e.dim() << "\n"
            << "k " << e.size() << "\n";
  DiscriminationResult res = klass == "optimal" ? p_suc_optimal(e) : p_suc_incoherent(e);
  if (ancilla_dim > 0) {
    DensityMatrix tau = DensityMatrix::pure(maximally_coherent(ancilla_dim));
    DiscriminationResult assisted = p_suc_incoherent_with_ancilla(e, tau);
    std::cout << "ancilla_dim " << ancilla_dim << "\n"
              << "p_success_assisted " << fm(assisted.value) << "\n"
              << "p_success_unassisted " << fm(res.value) << "\n"
              << "difference " << fm(assisted.value - res.value) << "\n";
  } else {
    std::cout << "p_success " << fm(res.value) << "\n";
  }
  for (int j = 0; j < res.povm.size(); ++j) {
    std::cout << "effect " << j << "\n";
    print_matrix(res.povm.effect(j), "  ");
  }
  return 0;
}

int cmd_duality(const std::string& path, int rounds, int restarts,
                unsigned long long seed) {
  StateEnsemble e = load_with_warnings(path);
  SeeSawOptions opts;
  opts.max_rounds = rounds;
  opts.restarts = restarts;
  opts.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  DualityReport r = post_discrimination_coherence(e, opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "command duality\n"
            << "d " << r.d << "\n"
            << "k " << r.k << "\n"
            << "s_vn " << fm(r.s_vn) << "\n"
            << "s_min " << fm(r.s_min) << "\n"
            << "c_lower " << fm(r.c_lower) << "\n"
            << "bound " << fm(r.bound) << "\n"
            << "gap " << fm(r.gap) << "\n"
            << "rounds " << r.rounds << "\n"
            << "degraded " << (r.degraded ? 1 : 0) << "\n"
            << "bound_not_tight " << (r.bound_not_tight ? 1 : 0) << "\n"
            << "seconds " << fm(secs) << "\n";
  for (int j = 0; j < static_cast<int>(r.sigmas.size()); ++j)
    std::cout << "sigma_c_r " << j << " " << fm(robustness(r.sigmas[j])) << "\n";
  return r.c_lower <= r.bound + 1e-5 ? 0 : 2;
}

void round_numbers_9sig(Json& j) {
  if (j.is_number_float()) j = std::strtod(fm(j.get<double>()).c_str(), nullptr);
  else if (j.is_array() || j.is_object())
    for (Json& child : j) round_numbers_9sig(child);
}

int cmd_saturate(int d, int k, const std::string& out) {
  auto [channel, sigma, sigma_prime] = saturating_channel(d, k);
  Json file = channel_to_json(channel);
  round_numbers_9sig(file);
  file["sigma_c_r"] = (d - k) / static_cast<double>(k);
  (void)sigma;
  (void)sigma_prime;
  const std::string text = file.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write file: " + out);
    os << text;
  }
  return 0;
}

int cmd_sweep(int dmax, const std::string& out, unsigned long long seed) {
  std::string csv = "d,k,s_vn,c_lower,bound,gap,rounds,seconds\n";
  for (int d = 1; d <= dmax; ++d)
    for (int k = 1; k <= d; ++k) {
      StateEnsemble e = d == 1 ? StateEnsemble({1.0}, {DensityMatrix(identity(1))})
                               : mcs_ensemble(d, k);
      SeeSawOptions opts;
      opts.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      DualityReport r = post_discrimination_coherence(e, opts);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      // whole seconds only: keeps identical command + seed byte-identical
      csv += std::to_string(d) + "," + std::to_string(k) + "," + fm(r.s_vn) + "," +
             fm(r.c_lower) + "," + fm(r.bound) + "," + fm(r.gap) + "," +
             std::to_string(r.rounds) + "," + std::to_string(std::llround(secs)) + "\n";
    }
  std::ofstream os(out, std::ios::binary);  // LF endings
  if (!os) throw std::invalid_argument("cannot write file: " + out);
  os << csv;
  if (!os.flush()) throw std::invalid_argument("failed writing file: " + out);
  std::cout << "command sweep\nrows " << dmax * (dmax + 1) / 2 << "\nout " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherence-distinguishability duality toolbox"};
  app.require_subcommand(1);

  std::string file, out, klass = "optimal";
  int ancilla_dim = 0, rounds = 30, restarts = 3, d = 2, k = 1, dmax = 3;
  unsigned long long seed = 0;
  bool dual_only = false, primal_only = false;

  CLI::App* roc = app.add_subcommand("roc", "robustness of coherence of a single state");
  roc->add_option("file", file, "state file (JSON, one state)")->required();
  CLI::Option* od = roc->add_flag("--dual-only", dual_only, "solve only the dual SDP");
  roc->add_flag("--primal-only", primal_only, "solve only the primal SDP")->excludes(od);

  CLI::App* disc = app.add_subcommand("discriminate", "minimum-error discrimination");
  disc->add_option("file", file, "ensemble file (JSON)")->required();
  disc->add_option("--class", klass, "POVM class")
      ->check(CLI::IsMember({"optimal", "incoherent"}));
  disc->add_option("--ancilla-dim", ancilla_dim,
                   "maximally coherent ancilla dimension (incoherent class only)")
      ->check(CLI::PositiveNumber);

  CLI::App* dual = app.add_subcommand("duality", "post-discrimination coherence see-saw");
  dual->add_option("file", file, "ensemble file (JSON)")->required();
  dual->add_option("--rounds", rounds, "see-saw round limit")->check(CLI::PositiveNumber);
  dual->add_option("--restarts", restarts, "randomized restarts")
      ->check(CLI::NonNegativeNumber);
  dual->add_option("--seed", seed, "restart randomization seed");

  CLI::App* sat = app.add_subcommand("saturate", "emit the saturating channel's Choi as JSON");
  sat->add_option("--d", d, "input dimension")->required()->check(CLI::Range(2, 6));
  sat->add_option("--k", k, "ensemble cardinality")->required()->check(CLI::PositiveNumber);
  sat->add_option("--out", out, "output path (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "duality sweep over the mcs family");
  sweep->add_option("--dmax", dmax, "largest dimension")->required()->check(CLI::Range(2, 6));
  sweep->add_option("--out", out, "CSV output path")->required();
  sweep->add_option("--seed", seed, "restart randomization seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(roc)) return cmd_roc(file, dual_only, primal_only);
    if (app.got_subcommand(disc)) {
      if (ancilla_dim > 0 && klass != "incoherent")
        throw std::invalid_argument("--ancilla-dim requires --class incoherent");
      return cmd_discriminate(file, klass, ancilla_dim);
    }
    if (app.got_subcommand(dual)) return cmd_duality(file, rounds, restarts, seed);
    if (app.got_subcommand(sat)) return cmd_saturate(d, k, out);
    if (app.got_subcommand(sweep)) return cmd_sweep(dmax, out, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
