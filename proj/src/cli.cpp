#include "qpvlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpvlab/adversaries.hpp"
#include "qpvlab/bounds.hpp"
#include "qpvlab/entropy.hpp"
#include "qpvlab/errors.hpp"
#include "qpvlab/harness.hpp"
#include "qpvlab/protocols.hpp"

namespace qpvlab {

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("QPVLAB_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("QPVLAB_SEED is not an integer: ") + env);
  }
}

const std::vector<std::string> kResourceKinds{"none", "max-entangled", "pure-schmidt", "isotropic"};

struct ResourceArgs {
  std::string kind;
  std::optional<std::size_t> pairs;
  std::vector<double> schmidt{0.5, 0.5};
  double visibility = 1.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--resource", kind, "Shared state: none, max-entangled, pure-schmidt, isotropic")
        ->check(CLI::IsMember(kResourceKinds));
    cmd->add_option("--pairs", pairs, "Number of shared pairs")->check(CLI::NonNegativeNumber);
    cmd->add_option("--schmidt", schmidt, "Squared Schmidt coefficients per pair (pure-schmidt)")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--visibility", visibility, "Isotropic visibility v in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
  }

  ResourceSpec build(std::size_t default_pairs, const std::string& default_kind) const {
    const std::string k = kind.empty() ? default_kind : kind;
    const std::size_t p = pairs.value_or(default_pairs);
    switch (resource_kind_from_string(k)) {
      case ResourceSpec::Kind::None:
        if (pairs && *pairs != 0) throw std::invalid_argument("--resource none takes no pairs");
        return ResourceSpec::none();
      case ResourceSpec::Kind::MaxEntangledPairs: return ResourceSpec::max_entangled(p);
      case ResourceSpec::Kind::PureSchmidt: return ResourceSpec::pure_schmidt(p, schmidt);
      case ResourceSpec::Kind::Isotropic: return ResourceSpec::isotropic(p, visibility);
    }
    return ResourceSpec::none();
  }
};

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

void print_report(const BoundReport& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << to_json(r).dump(2) << '\n';
    return;
  }
  const std::vector<std::pair<std::string, std::string>> rows{
      {"n", std::to_string(r.n)},
      {"epsilon", fmt(r.epsilon)},
      {"emax", fmt(r.emax)},
      {"s", fmt(r.s)},
      {"lambda", fmt(r.lambda)},
      {"threshold_exact", fmt(r.threshold_exact)},
      {"threshold_stringent", fmt(r.threshold_stringent)},
      {"vacuous", r.vacuous ? "true" : "false"},
      {"secure_regime", r.secure_regime ? "true" : "false"},
      {"gamma", fmt(r.gamma_value)},
      {"certified_lambda", fmt(r.certified_lambda)},
      {"certified_epsilon", fmt(r.certified_epsilon)},
      {"tfkw_bound", fmt(r.tfkw_bound)},
      {"verdict", to_string(r.verdict)}};
  if (format == "csv") {
    for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].first;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].second;
    out << '\n';
    return;
  }
  for (const auto& [k, v] : rows) out << k << ": " << (v.empty() ? "-" : v) << '\n';
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qpvlab: BB84 position-verification and weak-string-erasure lab", "qpvlab"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  bool seed_ok = true;
  std::string seed_error;
  try {
    seed = default_seed();
  } catch (const std::exception& e) {
    seed_ok = false;
    seed_error = e.what();
  }

  // bound
  auto* bound = app.add_subcommand("bound", "Security thresholds and certified rates");
  std::int64_t b_n = 0;
  std::optional<double> b_eps, b_emax;
  std::string b_format = "json";
  bound->add_option("--n", b_n, "Number of qubits")->required()->check(CLI::PositiveNumber);
  auto* eps_opt = bound->add_option("--epsilon", b_eps, "Target cheating probability in (0,1)");
  auto* emax_opt = bound->add_option("--emax", b_emax, "E_max of the cheaters' shared state (bits)");
  bound->add_option("--format", b_format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  bound->callback([&] {
    if (!eps_opt->count() && !emax_opt->count())
      throw CLI::RequiredError("--epsilon or --emax");
  });

  // entropy
  auto* entropy = app.add_subcommand("entropy", "Certified E_max bounds and guessing probabilities");
  ResourceArgs e_res;
  e_res.add_to(entropy);
  std::string e_povm;
  entropy->add_option("--bb84-povm", e_povm,
                      "Guess a BB84 bit with this POVM (breidbart or computational)")
      ->check(CLI::IsMember({"breidbart", "computational"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the honest protocols");
  std::string s_protocol = "qpv";
  std::size_t s_n = 8;
  std::optional<std::uint64_t> s_seed;
  double s_disp = 0.0, s_tol = 0.0, s_delay = 0.0;
  std::string s_mode = "prepare";
  std::uint64_t s_trials = 1;
  bool s_events = false;
  simulate->add_option("--protocol", s_protocol, "wse or qpv")->check(CLI::IsMember({"wse", "qpv"}));
  simulate->add_option("--n", s_n, "Number of qubits")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", s_seed, "RNG seed (default QPVLAB_SEED or 1)");
  simulate->add_option("--displacement", s_disp, "Prover offset from the claimed position");
  simulate->add_option("--tolerance", s_tol, "Timing tolerance")->check(CLI::NonNegativeNumber);
  simulate->add_option("--delay", s_delay, "Processing delay per party")->check(CLI::NonNegativeNumber);
  simulate->add_option("--mode", s_mode, "WSE sender: prepare or entangled")
      ->check(CLI::IsMember({"prepare", "entangled"}));
  simulate->add_option("--trials", s_trials, "Repeat and report an estimate")->check(CLI::PositiveNumber);
  simulate->add_flag("--events", s_events, "Include the event log");

  // attack
  auto* attack = app.add_subcommand("attack", "Monte-Carlo estimate for a cheating strategy");
  std::string a_strategy = "breidbart";
  std::size_t a_ebits = 0, a_n = 1;
  std::uint64_t a_trials = 1000;
  std::optional<std::uint64_t> a_seed;
  unsigned a_threads = 0;
  double a_eps = 0x1p-20, a_offset = 0.5;
  bool a_transcript = false;
  ResourceArgs a_res;
  attack->add_option("--strategy", a_strategy, "Cheating strategy")
      ->check(CLI::IsMember(strategy_names()));
  attack->add_option("--ebits", a_ebits, "Teleported qubits (teleport)")->check(CLI::NonNegativeNumber);
  attack->add_option("--n", a_n, "Number of qubits")->check(CLI::NonNegativeNumber);
  attack->add_option("--trials", a_trials, "Trials")->check(CLI::PositiveNumber);
  attack->add_option("--seed", a_seed, "RNG seed (default QPVLAB_SEED or 1)");
  attack->add_option("--threads", a_threads, "Worker threads (0 = all cores)");
  attack->add_option("--epsilon", a_eps, "Epsilon for the threshold columns");
  attack->add_option("--offset", a_offset, "Cheaters' distance from the claimed position")
      ->check(CLI::PositiveNumber);
  attack->add_flag("--transcript", a_transcript, "Print one run's transcript instead");
  a_res.add_to(attack);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid of estimates and bounds as CSV");
  std::vector<std::size_t> w_n, w_k{0};
  std::vector<double> w_eps{0x1p-20};
  std::vector<std::string> w_strategy = strategy_names();
  std::uint64_t w_trials = 1000;
  std::optional<std::uint64_t> w_seed;
  unsigned w_threads = 0;
  std::string w_out, w_resource = "max-entangled";
  std::vector<double> w_schmidt{0.5, 0.5};
  double w_vis = 1.0;
  sweep_cmd->add_option("--n", w_n, "Qubit counts")->delimiter(',');
  sweep_cmd->add_option("--k", w_k, "Shared pair counts")->delimiter(',');
  sweep_cmd->add_option("--epsilon", w_eps, "Epsilons for the threshold columns")->delimiter(',');
  sweep_cmd->add_option("--strategy", w_strategy, "Strategies")
      ->delimiter(',')
      ->check(CLI::IsMember(strategy_names()));
  sweep_cmd->add_option("--trials", w_trials, "Trials per cell")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", w_seed, "RNG seed (default QPVLAB_SEED or 1)");
  sweep_cmd->add_option("--threads", w_threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--resource", w_resource, "Pair kind for k > 0")
      ->check(CLI::IsMember({"max-entangled", "pure-schmidt", "isotropic"}));
  sweep_cmd->add_option("--schmidt", w_schmidt, "Squared Schmidt coefficients")
      ->delimiter(',')
      ->expected(2);
  sweep_cmd->add_option("--visibility", w_vis, "Isotropic visibility")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--out", w_out, "CSV path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto pick_seed = [&](const std::optional<std::uint64_t>& s) {
    if (s) return *s;
    if (!seed_ok) throw std::invalid_argument(seed_error);
    return seed;
  };

  try {
    if (bound->parsed()) {
      const auto report = b_eps ? epsilon_threshold(b_n, *b_eps, b_emax) : emax_report(b_n, *b_emax);
      print_report(report, b_format, out);
    } else if (entropy->parsed()) {
      nlohmann::json j;
      if (!e_povm.empty()) {
        const auto mix = [](std::uint8_t x) {
          const auto m = (bb84_encode(x, 0, "B").projector() + bb84_encode(x, 1, "B").projector()) *
                         Complex(0.5);
          return DensityOperator(m, Factorization::single("B"));
        };
        const Ensemble ens({0.5, 0.5}, {mix(0), mix(1)});
        const auto povm = e_povm == "breidbart" ? Povm::breidbart() : Povm::computational(2);
        const auto g = pguess(ens, povm);
        j["ensemble"] = "bb84-bit";
        j["povm"] = e_povm;
        j["pguess"] = g.value;
        j["ykl_certified"] = g.ykl_certified;
        j["hmin"] = g.ykl_certified ? nlohmann::json(hmin_cq(ens, g)) : nlohmann::json(nullptr);
        j["certificate"] = to_json(g.certificate);
      }
      if (!e_res.kind.empty() || e_povm.empty()) {
        const auto spec = e_res.build(1, "max-entangled");
        j["resource"] = spec.describe();
        j["emax"] = to_json(resource_emax(spec));
      }
      out << j.dump(2) << '\n';
    } else if (simulate->parsed()) {
      Geometry g = Geometry::unit(s_tol);
      g.actual["P"] = g.claimed + s_disp;
      g.processing_delay = s_delay;
      ExperimentConfig config;
      config.protocol = s_protocol == "wse" ? ProtocolKind::Wse : ProtocolKind::Qpv;
      config.n = s_n;
      config.geometry = g;
      config.trials = s_trials;
      config.seed = pick_seed(s_seed);
      config.threads = 1;
      if (s_trials > 1) {
        out << to_json(monte_carlo(config)).dump(2) << '\n';
      } else if (config.protocol == ProtocolKind::Wse) {
        Rng rng = Rng::for_trial(config.seed, 0);
        WseOptions opt;
        opt.mode = s_mode == "entangled" ? AliceMode::Entangled : AliceMode::PrepareAndSend;
        const auto t = run_wse_honest(s_n, rng, opt);
        auto j = to_json(t);
        if (s_events) j["events"] = t.log.to_jsonl();
        out << j.dump(2) << '\n';
      } else {
        Rng rng = Rng::for_trial(config.seed, 0);
        out << to_json(run_qpv_honest(s_n, g, rng), s_events).dump(2) << '\n';
      }
    } else if (attack->parsed()) {
      ExperimentConfig config;
      config.n = a_n;
      config.strategy = a_strategy;
      config.ebits = a_strategy == "teleport" ? a_ebits : 0;
      config.resource = a_res.build(a_ebits, a_ebits > 0 ? "max-entangled" : "none");
      config.trials = a_trials;
      config.seed = pick_seed(a_seed);
      config.threads = a_threads;
      config.epsilon = a_eps;
      config.geometry = Geometry::cheaters(a_offset);
      if (a_transcript) {
        config.validate();
        Rng rng = Rng::for_trial(config.seed, 0);
        const auto strategy = make_strategy(config.strategy, config.ebits);
        out << to_json(run_qpv_adversarial(config.n, config.geometry, *strategy, config.resource, rng),
                       true)
                   .dump(2)
            << '\n';
      } else {
        out << to_json(monte_carlo(config)).dump(2) << '\n';
      }
    } else if (sweep_cmd->parsed()) {
      SweepGrid grid;
      grid.n = w_n;
      grid.k = w_k;
      grid.epsilon = w_eps;
      grid.strategy = w_strategy;
      grid.resource = resource_kind_from_string(w_resource);
      grid.schmidt = w_schmidt;
      grid.visibility = w_vis;
      grid.trials = w_trials;
      grid.seed = pick_seed(w_seed);
      grid.threads = w_threads;
      if (w_out.empty()) {
        sweep(grid, out);
      } else {
        std::ofstream file(w_out);
        if (!file) throw std::invalid_argument("cannot open '" + w_out + "' for writing");
        sweep(grid, file);
      }
    }
  } catch (const BoundViolation& e) {
    err << "bound violation: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qpvlab
