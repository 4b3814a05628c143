#include "pemda/cli.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "pemda/config.hpp"
#include "pemda/errors.hpp"
#include "pemda/experiments.hpp"
#include "pemda/random.hpp"
#include "pemda/thresholds.hpp"
#include "pemda/verify.hpp"

namespace pemda {

namespace {

struct Options {
  std::string grid = "16";
  double L1 = 2 * std::numbers::pi;
  double L2 = 2 * std::numbers::pi;
  double dealias = 2.0 / 3.0;
  double dt = 2e-3;
  double t_end = 1.0;
  long long seed = 1;
  long long guess_seed = -1;
  int stride = 1;
  double mu = 1, nu = 1, kappa = 1, sigma = 1;
  double beta_u = 0, beta_b = 0;
  double h = std::numbers::pi / 4;
  std::string interpolant = "spectral";
  double norm_u = 1, norm_b = 1, mean_fraction = 0;
  std::string out, snapshot;
  std::string mu_seq;
  double eps = 1.0 / 64.0;
  double C = 1, k0 = -1, Ch1 = 1;
  std::string records;
  std::string config;
};

template <class T>
std::function<void(const std::string&)> setter(T& target) {
  return [&target](const std::string& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      target = v;
    } else {
      std::istringstream s(v);
      T x{};
      s >> x;
      if (!s || !(s >> std::ws).eof()) throw ValidationError(fmt::format("config value '{}' is not a number", v));
      target = x;
    }
  };
}

// Config keys and the option field each one sets.
std::map<std::string, std::function<void(const std::string&)>> config_keys(Options& o) {
  return {
      {"grid", setter(o.grid)},
      {"L1", setter(o.L1)},
      {"L2", setter(o.L2)},
      {"dealias", setter(o.dealias)},
      {"dt", setter(o.dt)},
      {"t_end", setter(o.t_end)},
      {"seed", setter(o.seed)},
      {"guess_seed", setter(o.guess_seed)},
      {"checkpoint_stride", setter(o.stride)},
      {"mu", setter(o.mu)},
      {"nu", setter(o.nu)},
      {"kappa", setter(o.kappa)},
      {"sigma", setter(o.sigma)},
      {"beta_u", setter(o.beta_u)},
      {"beta_b", setter(o.beta_b)},
      {"interpolant.h", setter(o.h)},
      {"interpolant.kind", setter(o.interpolant)},
      {"norm_u", setter(o.norm_u)},
      {"norm_b", setter(o.norm_b)},
      {"mean_fraction", setter(o.mean_fraction)},
      {"out", setter(o.out)},
      {"snapshot", setter(o.snapshot)},
      {"mu_seq", setter(o.mu_seq)},
      {"eps", setter(o.eps)},
      {"C", setter(o.C)},
      {"k0", setter(o.k0)},
      {"Ch1", setter(o.Ch1)},
      {"records", setter(o.records)},
  };
}

std::optional<std::string> find_config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

void add_config(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "key = value configuration file (flags override it)");
}

void add_grid(CLI::App* app, Options& o) {
  app->add_option("--grid", o.grid, "grid size N or NXxNYxNZ")->capture_default_str();
  app->add_option("--L1", o.L1, "period in x")->capture_default_str();
  app->add_option("--L2", o.L2, "period in y")->capture_default_str();
  app->add_option("--dealias", o.dealias, "dealiasing fraction")->capture_default_str();
}

void add_time(CLI::App* app, Options& o) {
  app->add_option("--dt", o.dt, "time step")->capture_default_str();
  app->add_option("--t-end", o.t_end, "final time")->capture_default_str();
  app->add_option("--checkpoint-stride", o.stride, "steps between stored checkpoints")->capture_default_str();
}

void add_physics(CLI::App* app, Options& o, bool diffusivities) {
  app->add_option("--mu", o.mu, "horizontal viscosity")->capture_default_str();
  app->add_option("--nu", o.nu, "vertical viscosity")->capture_default_str();
  if (diffusivities) {
    app->add_option("--kappa", o.kappa, "horizontal magnetic diffusivity")->capture_default_str();
    app->add_option("--sigma", o.sigma, "vertical magnetic diffusivity")->capture_default_str();
  }
}

void add_init(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "seed of the initial state")->capture_default_str();
  app->add_option("--norm-u", o.norm_u, "||u0||_2")->capture_default_str();
  app->add_option("--norm-b", o.norm_b, "||b0||_2")->capture_default_str();
  app->add_option("--mean-fraction", o.mean_fraction, "energy fraction in a uniform component")->capture_default_str();
}

void add_nudging(CLI::App* app, Options& o) {
  app->add_option("--beta-u", o.beta_u, "nudging gain for u")->capture_default_str();
  app->add_option("--beta-b", o.beta_b, "nudging gain for b")->capture_default_str();
  app->add_option("--h", o.h, "observation resolution")->capture_default_str();
  app->add_option("--interpolant", o.interpolant, "spectral or box")->capture_default_str();
}

Grid make_grid(const Options& o) {
  const auto n = parse_grid_spec(o.grid);
  return Grid(n[0], n[1], n[2], o.L1, o.L2, o.dealias);
}

PemParams make_params(const Options& o) {
  PemParams p;
  p.mu = o.mu;
  p.nu = o.nu;
  p.kappa = o.kappa;
  p.sigma = o.sigma;
  p.beta_u = o.beta_u;
  p.beta_b = o.beta_b;
  p.h = o.h;
  p.L1 = o.L1;
  p.L2 = o.L2;
  p.validate();
  return p;
}

IntegratorConfig make_cfg(const Options& o) {
  IntegratorConfig c;
  c.dt = o.dt;
  c.t_end = o.t_end;
  c.checkpoint_stride = o.stride;
  c.seed = static_cast<std::uint64_t>(o.seed);
  return c;
}

std::uint64_t as_seed(long long s) {
  if (s < 0) throw ValidationError("seeds must be non-negative");
  return static_cast<std::uint64_t>(s);
}

InitSpec make_init(const Options& o, long long seed) {
  InitSpec s;
  s.seed = as_seed(seed);
  s.norm_u = o.norm_u;
  s.norm_b = o.norm_b;
  s.mean_fraction = o.mean_fraction;
  return s;
}

struct Sink {
  std::optional<RecordWriter> writer;
  RunHooks hooks() {
    return {[this](const RunRecord& r) {
      if (writer) writer->append(r);
    }};
  }
};

double max_budget(const std::vector<RunRecord>& rs) {
  double m = 0;
  for (std::size_t i = 1; i < rs.size(); ++i) m = std::max(m, rs[i].budget_residual);
  return m;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Grid g = make_grid(o);
  const PemParams p = make_params(o);
  const IntegratorConfig cfg = make_cfg(o);
  const PemState init = random_state(g, make_init(o, o.seed));
  Sink sink;
  if (!o.out.empty()) sink.writer.emplace(o.out);
  const Trajectory tr = run_reference(init, p, cfg, sink.hooks());
  if (!o.snapshot.empty()) write_snapshot(o.snapshot, tr.states.back());
  const RunRecord& last = tr.records.back();
  fmt::print(out, "steps = {}\n", tr.records.size() - 1);
  fmt::print(out, "t = {:.6g}\n", last.t);
  fmt::print(out, "l2_u = {:.10g}\nl2_b = {:.10g}\n", last.norms.l2_u, last.norms.l2_b);
  fmt::print(out, "max budget residual = {:.3e}\n", max_budget(tr.records));
  fmt::print(out, "empirical k0 = {:.10g}\n", empirical_k0(tr.records));
  return 0;
}

int cmd_assimilate(const Options& o, std::ostream& out) {
  const Grid g = make_grid(o);
  const PemParams p = make_params(o);
  const IntegratorConfig cfg = make_cfg(o);
  const Interpolant interp(parse_interpolant_kind(o.interpolant), o.h, g);
  PemParams ref_params = p;
  ref_params.beta_u = ref_params.beta_b = 0;
  LockstepReference reference(random_state(g, make_init(o, o.seed)), ref_params, cfg);
  const long long guess_seed = o.guess_seed >= 0 ? o.guess_seed : o.seed + 1;
  const PemState guess = random_state(g, make_init(o, guess_seed));
  Sink sink;
  if (!o.out.empty()) sink.writer.emplace(o.out);
  const Trajectory tr = run_cda(reference, guess, p, interp, cfg, sink.hooks());
  if (!o.snapshot.empty()) write_snapshot(o.snapshot, tr.states.back());
  const CdaSummary s = summarize_cda(tr.records);
  fmt::print(out, "steps = {}\n", tr.records.size() - 1);
  fmt::print(out, "initial err_l2 = {:.6e}\nfinal err_l2 = {:.6e}\nmin err_l2 = {:.6e}\n", s.initial_error,
             s.final_error, s.min_error);
  fmt::print(out, "orders of decay = {:.3f}\n", s.orders);
  if (s.window.found) {
    fmt::print(out, "decay window = [{:.6g}, {:.6g}]\nrate = {:.6g}\nR^2 = {:.6f}\n", s.window.t_start,
               s.window.t_stop, s.fit.rate, s.fit.r2);
  } else {
    fmt::print(out, "decay window = none\n");
  }
  return 0;
}

std::vector<double> parse_mu_seq(const std::string& text, double mu) {
  std::vector<double> mus;
  if (text.empty()) {
    for (int n = 2; n <= 6; ++n) mus.push_back(mu + std::ldexp(1.0, -n));
    return mus;
  }
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::istringstream s(part);
    double v = 0;
    s >> v;
    if (!s || !(s >> std::ws).eof()) throw ValidationError(fmt::format("bad --mu-seq entry '{}'", part));
    mus.push_back(v);
  }
  return mus;
}

int cmd_sensitivity(Options o, std::ostream& out) {
  o.kappa = o.mu;
  o.sigma = o.nu;
  const Grid g = make_grid(o);
  const PemParams p = make_params(o);
  const IntegratorConfig cfg = make_cfg(o);
  const Interpolant interp(parse_interpolant_kind(o.interpolant), o.h, g);
  const std::vector<double> mus = parse_mu_seq(o.mu_seq, o.mu);
  const long long guess_seed = o.guess_seed >= 0 ? o.guess_seed : o.seed + 1;
  const ConvergenceReport r = run_sensitivity_study(random_state(g, make_init(o, o.seed)),
                                                    random_state(g, make_init(o, guess_seed)), p, interp, cfg, mus, o.eps);
  nlohmann::json j;
  j["mu"] = o.mu;
  j["mus"] = r.mus;
  j["errors"] = r.errors;
  j["ratios"] = r.ratios;
  j["central_eps"] = r.central_eps;
  j["central_error"] = r.central_error;
  j["sensitivity_size"] = r.sensitivity_size;
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw IoError(fmt::format("cannot open '{}' for writing", o.out));
    f << j.dump(2) << '\n';
  }
  fmt::print(out, "{:>12}  {:>14}  {:>8}\n", "mu_n", "e_n", "ratio");
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const std::string ratio = i < r.ratios.size() ? fmt::format("{:8.4f}", r.ratios[i]) : std::string(8, ' ');
    fmt::print(out, "{:12.8f}  {:14.6e}  {}\n", mus[i], r.errors[i], ratio);
  }
  if (r.central_eps > 0) fmt::print(out, "central difference (eps = {:g}): {:.6e}\n", r.central_eps, r.central_error);
  return 0;
}

int cmd_check_params(const Options& o, std::ostream& out, std::ostream& err) {
  const PemParams p = make_params(o);
  double k0 = o.k0;
  if (!o.records.empty()) {
    k0 = empirical_k0(read_records(o.records));
  } else if (k0 < 0) {
    k0 = 1.0;
  }
  const ParamThresholds t = compute_thresholds(p, o.C, k0, o.Ch1);
  if (!t.warning.empty()) fmt::print(err, "warning: {}\n", t.warning);
  fmt::print(out, "C = {:.10g}\nk0 = {:.10g}\nCh1 = {:.10g}\n", t.inputs_C, t.inputs_k0, t.inputs_Ch1);
  fmt::print(out, "R1 = {:.10g}\nR2 = {:.10g}\nR3 = {:.10g}\n", t.R1, t.R2, t.R3);
  fmt::print(out, "beta_min = {:.10g}\n", t.beta_min);
  fmt::print(out, "h_max = {:.8g}\n", t.h_max);
  fmt::print(out, "beta condition = {}\nh condition = {}\n", t.beta_ok ? "met" : "not met", t.h_ok ? "met" : "not met");
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const Grid g = make_grid(o);
  const auto results = run_verify_suite(g, as_seed(o.seed));
  bool ok = true;
  fmt::print(out, "{:<36} {:>12} {:>12}  {}\n", "check", "value", "tolerance", "result");
  for (const CheckResult& r : results) {
    fmt::print(out, "{:<36} {:>12.3e} {:>12.3e}  {}\n", r.name, r.value, r.tolerance, r.passed ? "PASS" : "FAIL");
    ok = ok && r.passed;
  }
  if (!ok) {
    fmt::print(err, "verification failed\n");
    return 1;
  }
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Primitive equations with magnetic field: simulation, nudging and sensitivity", "pemda");
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "reference run");
  add_config(simulate, o);
  add_grid(simulate, o);
  add_time(simulate, o);
  add_physics(simulate, o, true);
  add_init(simulate, o);
  simulate->add_option("--out", o.out, "record file (NDJSON)");
  simulate->add_option("--snapshot", o.snapshot, "final-state snapshot file");

  auto* assimilate = app.add_subcommand("assimilate", "nudged run against a lockstep reference");
  add_config(assimilate, o);
  add_grid(assimilate, o);
  add_time(assimilate, o);
  add_physics(assimilate, o, true);
  add_init(assimilate, o);
  add_nudging(assimilate, o);
  assimilate->add_option("--guess-seed", o.guess_seed, "seed of the initial guess (default seed + 1)");
  assimilate->add_option("--out", o.out, "record file (NDJSON)");
  assimilate->add_option("--snapshot", o.snapshot, "final-state snapshot file");

  auto* sensitivity = app.add_subcommand("sensitivity", "difference quotients against the sensitivity solution");
  add_config(sensitivity, o);
  add_grid(sensitivity, o);
  add_time(sensitivity, o);
  add_physics(sensitivity, o, false);
  add_init(sensitivity, o);
  add_nudging(sensitivity, o);
  sensitivity->add_option("--guess-seed", o.guess_seed, "seed of the initial guess (default seed + 1)");
  sensitivity->add_option("--mu-seq", o.mu_seq, "comma-separated mu_n (default mu + 2^-n, n = 2..6)");
  sensitivity->add_option("--eps", o.eps, "central-difference step (0 disables)")->capture_default_str();
  sensitivity->add_option("--out", o.out, "JSON report file");

  auto* check = app.add_subcommand("check-params", "sufficient gains and resolution for synchronization");
  add_config(check, o);
  add_physics(check, o, true);
  add_nudging(check, o);
  check->add_option("--C", o.C, "generic constant C")->capture_default_str();
  check->add_option("--k0", o.k0, "uniform bound k0 (default 1)");
  check->add_option("--Ch1", o.Ch1, "interpolant constant C_h^1")->capture_default_str();
  check->add_option("--records", o.records, "take k0 from the running maxima in a record file");

  auto* verify = app.add_subcommand("verify", "invariant suite");
  add_config(verify, o);
  add_grid(verify, o);
  verify->add_option("--seed", o.seed, "seed of the random test fields")->capture_default_str();

  try {
    if (const auto path = find_config_path(argc, argv)) {
      const Config c = Config::load(*path);
      auto keys = config_keys(o);
      for (const auto& [key, value] : c.entries()) {
        const auto it = keys.find(key);
        if (it == keys.end()) throw ValidationError(fmt::format("{}: unknown key '{}'", *path, key));
        it->second(value);
      }
    }
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*assimilate) return cmd_assimilate(o, out);
    if (*sensitivity) return cmd_sensitivity(o, out);
    if (*check) return cmd_check_params(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
  } catch (const BlowUpError& e) {
    fmt::print(err, "blow-up: {}\n", e.what());
    return 2;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace pemda
