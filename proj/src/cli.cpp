#include "ecsqkd/cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecsqkd/optimize.hpp"
#include "ecsqkd/rates.hpp"
#include "ecsqkd/table_io.hpp"
#include "ecsqkd/verify.hpp"

namespace ecsqkd::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a subcommand may read. Values come from --config first and are
// overridden by flags that were given explicitly.
struct RunConfig {
  std::optional<double> mu, distance, beta, eta_d, p_d, e_d;
  std::optional<double> l_min, l_max, l_step;
  std::optional<std::vector<std::string>> protocols;
  std::optional<std::vector<std::string>> pair;
  std::optional<std::vector<double>> bracket;
  std::optional<std::vector<std::string>> points;
  std::optional<std::string> format, output, fault;
  std::optional<int> jobs, n_max;
  bool optimize = false;
};

template <class T>
void take(std::optional<T>& dst, const nlohmann::json& j, const char* key) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  RunConfig c;
  try {
    take(c.mu, j, "mu");
    take(c.distance, j, "distance");
    take(c.beta, j, "beta");
    take(c.eta_d, j, "eta_d");
    take(c.p_d, j, "p_d");
    take(c.e_d, j, "e_d");
    take(c.l_min, j, "l_min");
    take(c.l_max, j, "l_max");
    take(c.l_step, j, "l_step");
    take(c.protocols, j, "protocols");
    take(c.pair, j, "pair");
    take(c.bracket, j, "bracket");
    take(c.points, j, "points");
    take(c.format, j, "format");
    take(c.output, j, "output");
    take(c.fault, j, "inject_fault");
    take(c.jobs, j, "jobs");
    take(c.n_max, j, "n_max");
    if (j.contains("optimize")) c.optimize = j.at("optimize").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  return c;
}

// Flag storage; copied into RunConfig only when the flag was present.
struct Flags {
  double mu = 0, distance = 0, beta = 0, eta_d = 0, p_d = 0, e_d = 0;
  double l_min = 0, l_max = 0, l_step = 0;
  std::vector<std::string> protocols, pair, points;
  std::vector<double> bracket;
  std::string format, output, fault, config;
  int jobs = 1, n_max = 30;
  bool optimize = false;
};

// Flag values are validated before any computation; violations are usage errors.
template <class Config>
void validate_flags(const Config& config) {
  try {
    config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

ProtocolParams resolve_params(const RunConfig& c) {
  ProtocolParams p;  // defaults match the reference operating point
  p.mu = c.mu.value_or(0.1);
  p.distance_km = c.distance.value_or(0.0);
  p.beta_db_per_km = c.beta.value_or(0.2);
  p.eta_d = c.eta_d.value_or(0.8);
  p.p_d = c.p_d.value_or(1e-7);
  p.e_d = c.e_d.value_or(0.0);
  return p;
}

ProtocolSet resolve_protocols(const RunConfig& c, ProtocolSet fallback) {
  if (!c.protocols) return fallback;
  ProtocolSet set;
  for (const auto& name : *c.protocols) {
    const auto p = parse_protocol(name);
    if (!p) throw UsageError("unknown protocol '" + name + "' (expected ecs, bell or plob)");
    set.insert(*p);
  }
  if (set.empty()) throw UsageError("protocol set is empty");
  return set;
}

bool resolve_json(const RunConfig& c) {
  const std::string format = c.format.value_or("csv");
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
  return format == "json";
}

void emit_table(const RunConfig& c, const std::vector<SweepRow>& rows, std::ostream& out) {
  const bool json = resolve_json(c);
  std::ostringstream buffer;
  if (json)
    write_json(buffer, rows);
  else
    write_csv(buffer, rows);
  if (!c.output || *c.output == "-") {
    out << buffer.str();
    return;
  }
  std::ofstream file(*c.output, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot open '" + *c.output + "' for writing");
  file << buffer.str();
  file.flush();
  if (!file) throw std::ios_base::failure("write to '" + *c.output + "' failed");
}

int cmd_rates(const RunConfig& c, std::ostream& out) {
  const auto protocols = resolve_protocols(c, ProtocolSet{true, false, false});
  if (protocols.ecs && !c.mu && !c.optimize) throw UsageError("rates: --mu is required unless --optimize is given");
  resolve_json(c);
  SweepConfig config;
  config.base = resolve_params(c);
  config.protocols = protocols;
  if (!c.optimize) config.fixed_mu = config.base.mu;
  validate_flags(config.base);
  config.l_min_km = config.l_max_km = config.base.distance_km;
  emit_table(c, {evaluate_row(config, config.base.distance_km)}, out);
  return kOk;
}

SweepConfig resolve_sweep(const RunConfig& c) {
  SweepConfig config;
  config.base = resolve_params(c);
  config.protocols = resolve_protocols(c, ProtocolSet::all());
  if (c.mu && !c.optimize) config.fixed_mu = *c.mu;
  config.l_min_km = c.l_min.value_or(0.0);
  config.l_max_km = c.l_max.value_or(600.0);
  config.l_step_km = c.l_step.value_or(5.0);
  config.jobs = c.jobs.value_or(1);
  if (config.jobs < 1) throw UsageError("--jobs must be >= 1");
  return config;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto config = resolve_sweep(c);
  resolve_json(c);
  validate_flags(config);
  const auto rows = sweep(config);
  for (const auto& row : rows)
    if (row.zero_rate) err << "note: no positive ECS rate at L=" << format_double(row.distance_km) << " km\n";
  emit_table(c, rows, out);
  return kOk;
}

VerifyPoint parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--point '" + text + "': not a number list");
    }
  }
  if (v.size() != 4) throw UsageError("--point expects mu,eta,p_d,e_d");
  return {v[0], v[1], v[2], v[3]};
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  std::vector<VerifyPoint> points;
  if (c.points && !c.points->empty()) {
    for (const auto& p : *c.points) points.push_back(parse_point(p));
  } else {
    points = default_verify_grid();
  }
  VerifyOptions options;
  options.oracle.n_max = c.n_max.value_or(30);
  options.eta_d = c.eta_d.value_or(0.8);
  options.jobs = c.jobs.value_or(1);
  if (options.oracle.n_max < 1) throw UsageError("--n-max must be >= 1");
  if (c.fault) {
    if (*c.fault == "q_zz")
      options.fault = FaultInjection::Qzz;
    else if (*c.fault == "s")
      options.fault = FaultInjection::S;
    else if (*c.fault == "e_zz")
      options.fault = FaultInjection::Ezz;
    else
      throw UsageError("--inject-fault must be q_zz, s or e_zz");
  }
  for (const auto& p : points) {
    ProtocolParams check;
    check.mu = p.mu;
    check.p_d = p.p_d;
    check.e_d = p.e_d;
    validate_flags(check);
    if (!(p.eta > 0 && p.eta <= 1)) throw UsageError("--point: eta must lie in (0, 1]");
  }

  const auto report = verify_closed_forms(points, options);
  out << std::setprecision(3);
  out << "points " << points.size() << "  n_max " << options.oracle.n_max << "  tolerance " << options.tolerance
      << '\n';
  out << "max |dQ_zz|  " << report.max_dq << '\n';
  out << "max |dS|     " << report.max_ds << '\n';
  out << "max |de_zz|  " << report.max_de << '\n';
  out << "max |de_zz| with eta_d=" << options.eta_d << " in the QBER numerator  " << report.max_de_literal << '\n';
  out << "misaligned QBER reading supported by oracle: " << report.qber_reading << '\n';
  for (const auto& check : report.checks) {
    if (check.passed(options.tolerance)) continue;
    const auto& p = check.point;
    out << "FAIL mu=" << format_double(p.mu) << " eta=" << format_double(p.eta) << " p_d=" << format_double(p.p_d)
        << " e_d=" << format_double(p.e_d);
    if (check.error)
      out << "  error: " << *check.error << '\n';
    else
      out << "  dq=" << check.dq << " ds=" << check.ds << " de=" << check.de << '\n';
  }
  out << (report.passed ? "PASS" : "FAIL") << '\n';
  if (report.truncation_failures > 0) return kComputation;
  return report.passed ? kOk : kVerificationFailed;
}

int cmd_crossover(const RunConfig& c, std::ostream& out) {
  auto config = resolve_sweep(c);
  if (!c.pair || c.pair->size() != 2) throw UsageError("crossover: --pair needs two protocols, e.g. ecs,plob");
  const auto first = parse_protocol((*c.pair)[0]);
  const auto second = parse_protocol((*c.pair)[1]);
  if (!first || !second) throw UsageError("crossover: unknown protocol in --pair");
  if (!c.bracket || c.bracket->size() != 2) throw UsageError("crossover: --bracket needs two distances");
  const double lo = (*c.bracket)[0];
  const double hi = (*c.bracket)[1];
  if (!(lo >= 0 && lo <= hi)) throw UsageError("crossover: bracket must satisfy 0 <= lo <= hi");
  config.protocols = {};
  config.protocols.insert(*first);
  config.protocols.insert(*second);
  validate_flags(config);

  const auto where = find_crossover(*first, *second, config, lo, hi);
  if (!where) {
    out << "no crossover in bracket [" << format_double(lo) << ", " << format_double(hi) << "] km\n";
    return kNoCrossover;
  }
  out << std::fixed << std::setprecision(1) << "crossover_km " << *where << '\n';
  return kOk;
}

void add_param_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--mu", f.mu, "coherent-state intensity");
  sub->add_option("--distance", f.distance, "Alice-Bob distance (km)");
  sub->add_option("--beta", f.beta, "fiber loss (dB/km), default 0.2");
  sub->add_option("--eta-d", f.eta_d, "detector efficiency, default 0.8");
  sub->add_option("--p-d", f.p_d, "dark-count probability, default 1e-7");
  sub->add_option("--e-d", f.e_d, "misalignment error, default 0");
  sub->add_option("--config", f.config, "JSON config file; flags override its values");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heralded DIQKD with entangled coherent states: key rates, sweeps and oracle checks", "ecsqkd"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* rates = app.add_subcommand("rates", "evaluate one (distance, mu) point");
  add_param_flags(rates, f);
  rates->add_flag("--optimize", f.optimize, "optimize mu instead of using --mu");
  rates->add_option("--protocol", f.protocols, "ecs, bell, plob (repeatable or comma separated)")->delimiter(',');
  rates->add_option("--format", f.format, "csv or json");
  rates->add_option("--output", f.output, "output file, '-' for stdout");

  auto* sweep_cmd = app.add_subcommand("sweep", "rate-versus-distance table");
  add_param_flags(sweep_cmd, f);
  sweep_cmd->add_flag("--optimize", f.optimize, "optimize mu even if --mu is given");
  sweep_cmd->add_option("--l-min", f.l_min, "first distance (km), default 0");
  sweep_cmd->add_option("--l-max", f.l_max, "last distance (km), default 600");
  sweep_cmd->add_option("--l-step", f.l_step, "distance step (km), default 5");
  sweep_cmd->add_option("--protocol", f.protocols, "ecs, bell, plob")->delimiter(',');
  sweep_cmd->add_option("--format", f.format, "csv or json");
  sweep_cmd->add_option("--output", f.output, "output file, '-' for stdout");
  sweep_cmd->add_option("--jobs", f.jobs, "worker threads");

  auto* verify = app.add_subcommand("verify", "compare closed forms with the Fock-space oracle");
  verify->add_option("--point", f.points, "mu,eta,p_d,e_d (repeatable); default: acceptance grid");
  verify->add_option("--n-max", f.n_max, "per-arm Fock cutoff, default 30");
  verify->add_option("--eta-d", f.eta_d, "eta_d for the literal QBER reading, default 0.8");
  verify->add_option("--inject-fault", f.fault, "test hook: corrupt q_zz, s or e_zz")->group("");
  verify->add_option("--jobs", f.jobs, "worker threads");
  verify->add_option("--config", f.config, "JSON config file");

  auto* crossover = app.add_subcommand("crossover", "distance where one protocol overtakes another");
  add_param_flags(crossover, f);
  crossover->add_option("--pair", f.pair, "two protocols, e.g. ecs,plob")->delimiter(',');
  crossover->add_option("--bracket", f.bracket, "search interval lo hi (km)")->expected(2);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig c;
    if (sub->count("--config")) c = load_config_file(f.config);
    auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
    if (given("--mu")) c.mu = f.mu;
    if (given("--distance")) c.distance = f.distance;
    if (given("--beta")) c.beta = f.beta;
    if (given("--eta-d")) c.eta_d = f.eta_d;
    if (given("--p-d")) c.p_d = f.p_d;
    if (given("--e-d")) c.e_d = f.e_d;
    if (given("--l-min")) c.l_min = f.l_min;
    if (given("--l-max")) c.l_max = f.l_max;
    if (given("--l-step")) c.l_step = f.l_step;
    if (given("--protocol")) c.protocols = f.protocols;
    if (given("--pair")) c.pair = f.pair;
    if (given("--bracket")) c.bracket = f.bracket;
    if (given("--point")) c.points = f.points;
    if (given("--format")) c.format = f.format;
    if (given("--output")) c.output = f.output;
    if (given("--inject-fault")) c.fault = f.fault;
    if (given("--jobs")) c.jobs = f.jobs;
    if (given("--n-max")) c.n_max = f.n_max;
    if (given("--optimize")) c.optimize = f.optimize;

    const std::string name = sub->get_name();
    if (name == "rates") return cmd_rates(c, out);
    if (name == "sweep") return cmd_sweep(c, out, err);
    if (name == "verify") return cmd_verify(c, out);
    return cmd_crossover(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputation;
  }
}

}  // namespace ecsqkd::cli
