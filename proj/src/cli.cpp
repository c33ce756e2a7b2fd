#include "nsw/cli.hpp"

#include "nsw/equilibrium.hpp"
#include "nsw/errors.hpp"
#include "nsw/flow.hpp"
#include "nsw/gen.hpp"
#include "nsw/io.hpp"
#include "nsw/oracle.hpp"
#include "nsw/rounding.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace nsw::cli {

namespace {

struct Options {
  bool no_timestamp = false;
  std::string epsilon;
  std::string out_path;
  bool trace = false;
  bool exact = false;
  std::string input;
  std::string instance;
  // gen
  std::string kind = "random";
  std::string fixture = "prop1";
  std::size_t n = 3;
  std::size_t m = 5;
  std::uint32_t vmax = 8;
  std::uint32_t cmax = 8;
  std::size_t k = 1;
  std::uint64_t seed = 1;
  // bench
  std::string dir;
  std::size_t seeds = 50;
  std::size_t threads = 0;
};

void header(std::ostream& out, const Options& opt, const std::string& command) {
  if (opt.no_timestamp) return;
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  out << "# nswmarket " << command << ' ' << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
}

Rational epsilon_or(const Options& opt, const Rational& fallback) {
  if (opt.epsilon.empty()) return fallback;
  Rational eps;
  try {
    eps = parse_rational(opt.epsilon);
  } catch (const std::invalid_argument& e) {
    throw ParseError("--epsilon: " + std::string(e.what()));
  }
  if (eps <= 0) throw ParseError("--epsilon must be positive");
  return eps;
}

// Writes to --out when given, otherwise to `out`.
template <class Fn>
void emit(const Options& opt, std::ostream& out, Fn&& write) {
  if (opt.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(opt.out_path);
  if (!file) throw std::runtime_error("cannot write " + opt.out_path);
  write(file);
}

MarketInstance market_of(const InstanceFile& file) {
  if (const auto* mk = std::get_if<MarketInstance>(&file)) return *mk;
  return to_market(cap_valuations(std::get<NswInstance>(file)));
}

NswInstance nsw_of(const InstanceFile& file, const std::string& path) {
  if (const auto* inst = std::get_if<NswInstance>(&file)) return *inst;
  throw ParseError(path + ": expected an nsw instance");
}

void write_report(std::ostream& out, const char* label, const VerificationReport& report) {
  out << label << ' ' << (report.ok ? "pass" : "fail") << '\n';
  for (const auto& v : report.violations) out << "violation " << v << '\n';
}

int cmd_solve(const Options& opt, std::ostream& out) {
  MarketInstance mk = market_of(read_instance_file(opt.input));
  StateFile state;
  EquilibriumResult result;
  if (opt.exact) {
    state.market = LinearMarket::from(mk);
    result = solve_market(state.market);
  } else {
    Rational eps = epsilon_or(opt, 1);
    PerturbedMarket perturbed = perturb(mk, eps);
    state.market = perturbed.market();
    state.epsilon = eps;
    result = run_fptas(perturbed);
  }
  state.price = result.state.price;
  state.flow = result.state.flow;
  state.allocation = result.allocation;

  header(out, opt, "solve");
  emit(opt, out, [&](std::ostream& o) { write_state(o, state); });
  if (opt.trace) write_trace(out, result.trace);
  out << "iterations " << result.trace.iterations.size() << '\n';
  out << "zero_exits " << result.trace.zero_exits.size() << '\n';
  out << "relaxed_start " << (result.trace.relaxed_start ? "yes" : "no") << '\n';
  out << "zero_set_releases " << result.trace.zero_set_releases.size() << '\n';
  auto report = verify_equilibrium(state.market, state.price, state.allocation);
  write_report(out, "verify", report);
  return report.ok ? kOk : kCheckFailed;
}

void write_lemmas(std::ostream& out, const LemmaAudit& audit) {
  auto flag = [](bool ok) { return ok ? "pass" : "fail"; };
  out << "lemma_tree " << flag(audit.tree_ok) << '\n';
  out << "lemma_half " << flag(audit.half_ok) << '\n';
  out << "lemma_treeb " << flag(audit.treeb_ok) << " failures " << audit.treeb_failures
      << " unexplained " << audit.treeb_failures_unexplained << '\n';
  out << "degree " << flag(audit.degree_ok) << '\n';
  out << "positive_values " << flag(audit.positive_values) << '\n';
  out << "trees " << audit.trees_checked << '\n';
  for (const auto& note : audit.notes) out << "note " << note << '\n';
}

int cmd_pipeline(const Options& opt, std::ostream& out) {
  NswInstance inst = nsw_of(read_instance_file(opt.input), opt.input);
  PipelineResult result = pipeline(inst, epsilon_or(opt, Rational(1, 4)));
  header(out, opt, "pipeline");
  emit(opt, out, [&](std::ostream& o) { write_certificate(o, result.certificate, inst.agents()); });
  if (result.equilibrium) out << "iterations " << result.equilibrium->trace.iterations.size() << '\n';
  if (result.lemmas) write_lemmas(out, *result.lemmas);
  return result.certificate.ratio_pass ? kOk : kCheckFailed;
}

int cmd_round(const Options& opt, std::ostream& out) {
  if (opt.instance.empty()) throw ParseError("round needs --instance <nsw file>");
  StateFile state = read_state_file(opt.input);
  NswInstance inst = nsw_of(read_instance_file(opt.instance), opt.instance);
  if (state.market.buyers() != inst.agents() || state.market.goods() != inst.items())
    throw ParseError("state and instance sizes differ");
  Rational eps = state.epsilon ? *state.epsilon : epsilon_or(opt, 0);
  auto report = verify_equilibrium(state.market, state.price, state.allocation);
  header(out, opt, "round");
  if (!report.ok) {
    write_report(out, "verify", report);
    return kCheckFailed;
  }
  PipelineResult result = round_equilibrium(inst, state.market, state.price, state.allocation, eps);
  emit(opt, out, [&](std::ostream& o) { write_certificate(o, result.certificate, inst.agents()); });
  write_lemmas(out, *result.lemmas);
  return result.certificate.ratio_pass ? kOk : kCheckFailed;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  StateFile state = read_state_file(opt.input);
  header(out, opt, "verify");
  auto report = verify_equilibrium(state.market, state.price, state.allocation);
  write_report(out, "verify", report);
  bool ok = report.ok;
  if (!opt.instance.empty()) {
    LinearMarket original = LinearMarket::from(market_of(read_instance_file(opt.instance)));
    if (original.buyers() != state.market.buyers() || original.goods() != state.market.goods())
      throw ParseError("state and instance sizes differ");
    Rational eps = epsilon_or(opt, state.epsilon ? *state.epsilon : Rational(0));
    auto approx = verify_approx_equilibrium(original, state.price, state.allocation, eps);
    write_report(out, "approx", approx);
    ok = ok && approx.ok;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_oracle(const Options& opt, std::ostream& out) {
  InstanceFile file = read_instance_file(opt.input);
  header(out, opt, "oracle");
  if (const auto* inst = std::get_if<NswInstance>(&file)) {
    auto best = oracle::brute_nsw(*inst);
    out << "opt_product " << format_rational(best.optimum.product) << '\n';
    out << "n " << best.optimum.agents << '\n';
    for (std::size_t j = 0; j < best.owner.size(); ++j)
      if (best.owner[j]) out << "assign " << j + 1 << ' ' << *best.owner[j] + 1 << '\n';
  } else {
    const auto& mk = std::get<MarketInstance>(file);
    out << "money_clearing " << (oracle::brute_money_clearing(mk) ? "yes" : "no") << '\n';
  }
  return kOk;
}

int cmd_gen(const Options& opt, std::ostream& out) {
  if (opt.kind == "random") {
    if (opt.n == 0 || opt.m < opt.n) throw ParseError("gen needs 1 <= n <= m");
    if (opt.cmax == 0) throw ParseError("--cmax must be positive");
    NswInstance inst = gen_random(opt.n, opt.m, opt.vmax, opt.cmax, opt.seed);
    emit(opt, out, [&](std::ostream& o) {
      header(o, opt, "gen");
      write_instance(o, inst);
    });
  } else if (opt.kind == "fixture") {
    Fixture fx;
    try {
      fx = gen_fixture(opt.fixture);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    emit(opt, out, [&](std::ostream& o) {
      header(o, opt, "gen");
      o << "# fixture " << fx.name << " utility_scale " << fx.utility_scale << " money_scale "
        << fx.money_scale << '\n';
      write_instance(o, fx.market);
    });
  } else if (opt.kind == "e3lin2") {
    E3Lin2Instance lin;
    try {
      lin = gen_e3lin2(opt.n, opt.k, opt.seed);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    NswInstance inst = gen_hardness(lin);
    emit(opt, out, [&](std::ostream& o) {
      header(o, opt, "gen");
      for (const auto& eq : lin.equations)
        o << "# equation x" << eq.variable[0] + 1 << " + x" << eq.variable[1] + 1 << " + x"
          << eq.variable[2] + 1 << " = " << eq.rhs << '\n';
      write_instance(o, inst);
    });
  } else {
    throw ParseError("unknown --kind " + opt.kind);
  }
  return kOk;
}

struct BenchJob {
  std::string name;
  std::optional<NswInstance> inst;
  std::string error;
};

std::string bench_row(const BenchJob& job, const Rational& eps) {
  std::ostringstream row;
  row << job.name;
  if (!job.inst) {
    row << " error " << job.error;
    return row.str();
  }
  const NswInstance& inst = *job.inst;
  const std::size_t n = inst.agents();
  try {
    PipelineResult result = pipeline(inst, eps);
    const Certificate& cert = result.certificate;
    if (cert.opt_zero) {
      row << " opt_zero";
      return row.str();
    }
    const auto& eq = *result.equilibrium;
    TraceAudit audit = audit_trace(*result.market, eq, cert.epsilon_prime);
    row << " iterations " << audit.iterations << " budget " << std::llround(audit.iteration_budget)
        << " phases " << audit.phases << " max_decrease " << format_decimal(audit.max_price_decrease, 6);

    std::optional<Rational> opt_product;
    if (std::pow(static_cast<double>(n), static_cast<double>(inst.items())) <= 1e6)
      opt_product = oracle::brute_nsw(inst).optimum.product;
    if (opt_product && cert.nsw.product > 0) {
      double ratio = std::pow(to_double(*opt_product / cert.nsw.product), 1.0 / n);
      row << " opt_ratio " << std::fixed << std::setprecision(6) << ratio;
    } else {
      row << " opt_ratio -";
    }
    Rational lhs = cert.nsw.product * pow(Rational(2404, 1000), n) *
                   pow(1 + cert.epsilon_prime, static_cast<std::uint64_t>(n) * n);
    double margin = cert.upper_bound > 0 ? std::pow(to_double(lhs / cert.upper_bound), 1.0 / n) : 0.0;
    row << " margin " << std::fixed << std::setprecision(6) << margin;
    row << " ratio_check " << (cert.ratio_pass ? "pass" : "fail");
    row << " lemmas " << (result.lemmas->ok() ? "pass" : "fail");
  } catch (const std::exception& e) {
    row << " error " << e.what();
  }
  return row.str();
}

int cmd_bench(const Options& opt, std::ostream& out) {
  Rational eps = epsilon_or(opt, Rational(1, 4));
  std::vector<BenchJob> jobs;
  if (!opt.dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(opt.dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      BenchJob job{path.filename().string(), std::nullopt, {}};
      try {
        job.inst = nsw_of(read_instance_file(path.string()), path.string());
      } catch (const std::exception& e) {
        job.error = e.what();
      }
      jobs.push_back(std::move(job));
    }
  } else {
    if (opt.n == 0 || opt.m < opt.n) throw ParseError("bench needs 1 <= n <= m");
    for (std::size_t s = 0; s < opt.seeds; ++s) {
      std::uint64_t seed = opt.seed + s;
      jobs.push_back({"seed " + std::to_string(seed), gen_random(opt.n, opt.m, opt.vmax, opt.cmax, seed), {}});
    }
  }

  std::vector<std::string> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < jobs.size(); idx = next++) rows[idx] = bench_row(jobs[idx], eps);
  };
  std::size_t workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  header(out, opt, "bench");
  out << "# epsilon " << format_rational(eps) << " instances " << jobs.size() << '\n';
  bool all_pass = true;
  for (const auto& row : rows) {
    out << row << '\n';
    if (row.find("ratio_check pass") == std::string::npos && row.find("opt_zero") == std::string::npos)
      all_pass = false;
  }
  return all_pass ? kOk : kCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Market equilibria and Nash social welfare rounding", "nswmarket"};
  app.require_subcommand(1);
  app.add_flag("--no-timestamp", opt.no_timestamp, "Omit the timestamp header line");

  auto* solve = app.add_subcommand("solve", "Equilibrium of a market (or of an nsw instance's market)");
  solve->add_option("instance", opt.input, "Instance file")->required();
  solve->add_option("--epsilon", opt.epsilon, "Perturbation parameter p/q (default 1)");
  solve->add_flag("--exact", opt.exact, "Solve the unperturbed utilities");
  solve->add_flag("--trace", opt.trace, "Print the event trace");
  solve->add_option("--out", opt.out_path, "State file to write");

  auto* pipe = app.add_subcommand("pipeline", "Approximate maximum Nash social welfare allocation");
  pipe->add_option("instance", opt.input, "nsw instance file")->required();
  pipe->add_option("--epsilon", opt.epsilon, "Accuracy p/q (default 1/4)");
  pipe->add_option("--out", opt.out_path, "Certificate file to write");

  auto* rnd = app.add_subcommand("round", "Round an equilibrium state against an nsw instance");
  rnd->add_option("state", opt.input, "State file")->required();
  rnd->add_option("--instance", opt.instance, "nsw instance file")->required();
  rnd->add_option("--epsilon", opt.epsilon, "Perturbation used for the state (default: from file)");
  rnd->add_option("--out", opt.out_path, "Certificate file to write");

  auto* ver = app.add_subcommand("verify", "Check an equilibrium state");
  ver->add_option("state", opt.input, "State file")->required();
  ver->add_option("--instance", opt.instance, "Original instance for the approximate check");
  ver->add_option("--epsilon", opt.epsilon, "Approximation parameter (default: from file)");

  auto* orc = app.add_subcommand("oracle", "Brute-force optimum or money-clearing check");
  orc->add_option("instance", opt.input, "Instance file")->required();

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--kind", opt.kind, "random, fixture or e3lin2")
      ->check(CLI::IsMember({"random", "fixture", "e3lin2"}));
  gen->add_option("--fixture", opt.fixture, "prop1, prop2 or prop3");
  gen->add_option("--n", opt.n, "Agents (random) or variables (e3lin2)");
  gen->add_option("--m", opt.m, "Items");
  gen->add_option("--k", opt.k, "Occurrences per variable (e3lin2)");
  gen->add_option("--vmax", opt.vmax, "Largest value");
  gen->add_option("--cmax", opt.cmax, "Largest cap");
  gen->add_option("--seed", opt.seed, "Random seed");
  gen->add_option("--out", opt.out_path, "Instance file to write");

  auto* bench = app.add_subcommand("bench", "Pipeline statistics over many instances");
  bench->add_option("--dir", opt.dir, "Directory of nsw instance files");
  bench->add_option("--n", opt.n, "Agents");
  bench->add_option("--m", opt.m, "Items");
  bench->add_option("--vmax", opt.vmax, "Largest value");
  bench->add_option("--cmax", opt.cmax, "Largest cap");
  bench->add_option("--seed", opt.seed, "First seed");
  bench->add_option("--seeds", opt.seeds, "Number of seeds");
  bench->add_option("--epsilon", opt.epsilon, "Accuracy p/q (default 1/4)");
  bench->add_option("--threads", opt.threads, "Worker threads (default: hardware)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParseError;
  }

  try {
    if (*solve) return cmd_solve(opt, out);
    if (*pipe) return cmd_pipeline(opt, out);
    if (*rnd) return cmd_round(opt, out);
    if (*ver) return cmd_verify(opt, out);
    if (*orc) return cmd_oracle(opt, out);
    if (*gen) return cmd_gen(opt, out);
    if (*bench) return cmd_bench(opt, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const NotMoneyClearing& e) {
    err << "not money clearing: " << e.what() << '\n';
    return kNotMoneyClearing;
  } catch (const InvariantBreach& e) {
    err << "invariant breach: " << e.what() << '\n';
    return kInvariantBreach;
  } catch (const OracleTooLarge& e) {
    err << "oracle: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kOk;
}

}  // namespace nsw::cli
