#include "cli.hpp"

#include <omp.h>

#include <Eigen/Core>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kwising/critical_point.hpp"
#include "kwising/errors.hpp"
#include "kwising/oracle.hpp"
#include "kwising/quantum.hpp"
#include "kwising/thermodynamics.hpp"
#include "kwising/verify.hpp"

namespace kwising::cli {

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a finite real");
  }
  return v;
}

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) return parts;
    pos = next + 1;
  }
}

QuadratureSpec quad_spec(const RunConfig& cfg) {
  QuadratureSpec q;
  q.tol = cfg.quad_tol;
  return q;
}

// Rows are independent; each slot holds either its cells or the failure.
struct RowResult {
  std::vector<Cell> cells;
  std::optional<std::string> error;
  int exit_code = kNumericalFailure;
};

Table sweep(std::vector<std::string> columns, std::size_t n,
            const std::function<std::vector<Cell>(std::size_t)>& row) {
  std::vector<RowResult> results(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    RowResult& r = results[static_cast<std::size_t>(i)];
    try {
      r.cells = row(static_cast<std::size_t>(i));
    } catch (const NumericalError& e) {
      r.error = e.what();
    } catch (const std::invalid_argument& e) {
      r.error = e.what();
      r.exit_code = kConfigError;
    } catch (const std::length_error& e) {
      r.error = e.what();
      r.exit_code = kConfigError;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }
  Table t;
  t.columns = std::move(columns);
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i].error) {
      t.error = RowError{i, *results[i].error, results[i].exit_code};
      break;
    }
    t.rows.push_back(std::move(results[i].cells));
  }
  return t;
}

Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{};
}

// Value at distance d of a two-sided log fit A log d + B, averaged over sides.
double log_asymptote(const LogFit& below, const LogFit& above, double d) {
  const double ld = std::log(d);
  return 0.5 * ((below.slope * ld + below.intercept) + (above.slope * ld + above.intercept));
}

const std::vector<double> kAsymptoteDistances = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
// Innermost fit distance; f' quadrature is reliable there.
constexpr double kFirstDerivativeOffset = 1.25e-4;

// f'' inside the exclusion zone: the fitted asymptote at the zone radius.
// f' is continuous there and taken as the mean of the two one-sided values.
FreeEnergyDerivatives exclusion_derivatives(double beta, const Couplings& J,
                                            const QuadratureSpec& quad) {
  const double centre = critical_beta(J).value_or(beta);
  const LogSingularityFit fit = log_singularity_fit(J, centre, kAsymptoteDistances, quad);
  const FreeEnergyDerivatives lo = free_energy_derivatives(centre - kFirstDerivativeOffset, J, quad);
  const FreeEnergyDerivatives hi = free_energy_derivatives(centre + kFirstDerivativeOffset, J, quad);
  FreeEnergyDerivatives d;
  d.f1 = 0.5 * (lo.f1 + hi.f1);
  d.f2 = log_asymptote(fit.below, fit.above, kCriticalExclusion);
  d.error = std::max({lo.error, hi.error, std::abs(hi.f1 - lo.f1)});
  return d;
}

double exclusion_gse_second_derivative(double h, const QuadratureSpec& quad) {
  const double centre = std::copysign(0.5, h);
  std::vector<double> below;
  std::vector<double> above;
  for (double d : kAsymptoteDistances) {
    below.push_back(gse_second_derivative(centre - d, quad).value);
    above.push_back(gse_second_derivative(centre + d, quad).value);
  }
  return log_asymptote(fit_log(kAsymptoteDistances, below), fit_log(kAsymptoteDistances, above),
                       kQuantumExclusion);
}

std::optional<double> transfer_matrix_column(int M, const Couplings& J) {
  if (M > kMaxTransferM) return std::nullopt;
  return cylinder_free_energy_tm(M, J);
}

Table free_energy_table(const RunConfig& cfg) {
  const std::vector<double> betas = cfg.beta.values();
  const QuadratureSpec quad = quad_spec(cfg);
  std::vector<std::string> cols = {"beta", "f", "f1", "f2", "quadrature_error", "asymptotic"};
  if (cfg.M) {
    cols.emplace_back("f_cylinder");
    cols.emplace_back("f_transfer_matrix");
  }
  return sweep(std::move(cols), betas.size(), [&](std::size_t i) {
    const double beta = betas[i];
    const Couplings bJ = cfg.couplings.scaled(beta);
    const QuadratureResult f = plane_free_energy(bJ, quad);
    bool asymptotic = false;
    FreeEnergyDerivatives d;
    try {
      d = free_energy_derivatives(beta, cfg.couplings, quad);
    } catch (const CriticalExclusion&) {
      d = exclusion_derivatives(beta, cfg.couplings, quad);
      asymptotic = true;
    }
    std::vector<Cell> row = {beta, f.value, d.f1, d.f2, std::max(f.error, d.error), asymptotic};
    if (cfg.M) {
      const QuadratureResult fc = cylinder_free_energy(*cfg.M, bJ, quad);
      row.emplace_back(fc.value);
      row.push_back(optional_cell(transfer_matrix_column(*cfg.M, bJ)));
    }
    return row;
  });
}

Table cylinder_table(const RunConfig& cfg) {
  const std::vector<double> betas = cfg.beta.values();
  const QuadratureSpec quad = quad_spec(cfg);
  const int M = *cfg.M;
  return sweep({"beta", "M", "f_cylinder", "f_transfer_matrix", "quadrature_error"}, betas.size(),
               [&](std::size_t i) {
                 const Couplings bJ = cfg.couplings.scaled(betas[i]);
                 const QuadratureResult fc = cylinder_free_energy(M, bJ, quad);
                 return std::vector<Cell>{betas[i], std::int64_t{M}, fc.value,
                                          optional_cell(transfer_matrix_column(M, bJ)), fc.error};
               });
}

Table critical_table(const RunConfig& cfg) {
  const std::vector<double> J3s = cfg.J3->values();
  return sweep({"J3", "beta_c", "g2", "c"}, J3s.size(), [&](std::size_t i) {
    const CriticalResult r = beta_c_from_J3(J3s[i]);
    std::vector<Cell> row = {J3s[i], optional_cell(r.beta_c), Cell{}, Cell{}};
    if (r.hypotheses) {
      row[2] = r.hypotheses->g2;
      row[3] = r.hypotheses->c;
    }
    return row;
  });
}

Table quantum_table(const RunConfig& cfg) {
  const std::vector<double> betas = cfg.beta.values();
  const std::vector<double> hs = cfg.h->values();
  const QuadratureSpec quad = quad_spec(cfg);
  std::vector<std::string> cols = {"beta", "h", "f_qu", "e0", "e0pp", "asymptotic"};
  if (cfg.trotter_n) cols.emplace_back("f_trotter");
  return sweep(std::move(cols), betas.size() * hs.size(), [&](std::size_t i) {
    const QuantumParams p = QuantumParams::make(betas[i / hs.size()], hs[i % hs.size()]);
    const double f = quantum_free_energy(p, quad).value;
    const double e0 = ground_state_energy(p.h, quad).value;
    bool asymptotic = false;
    double e0pp = 0.0;
    try {
      e0pp = gse_second_derivative(p.h, quad).value;
    } catch (const CriticalExclusion&) {
      e0pp = exclusion_gse_second_derivative(p.h, quad);
      asymptotic = true;
    }
    std::vector<Cell> row = {p.beta, p.h, f, e0, e0pp, asymptotic};
    if (cfg.trotter_n) {
      const int n = *cfg.trotter_n;
      if (p.h > 0.0 && n > p.beta * p.h / 2.0) {
        row.emplace_back(trotter_free_energy(p, n, quad).value);
      } else {
        row.emplace_back();
      }
    }
    return row;
  });
}

Table verify_table(const RunConfig& cfg) {
  const VerifyReport report = run_verify(cfg.seed, quad_spec(cfg));
  Table t;
  t.columns = {"check", "passed", "measured", "tolerance", "detail"};
  for (const VerifyCheck& c : report.checks) {
    t.rows.push_back({c.name, c.passed, c.measured, c.tolerance, c.detail});
  }
  t.verification_failed = !report.all_passed();
  return t;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string range_text(const Range& r) {
  return format_real(r.start) + ":" + format_real(r.stop) + ":" + std::to_string(r.steps);
}

nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json c;
  c["command"] = command_name(cfg.command);
  c["J"] = {cfg.couplings.J1, cfg.couplings.J2, cfg.couplings.J3};
  c["beta"] = range_text(cfg.beta);
  c["cylinder_M"] = cfg.M ? nlohmann::json(*cfg.M) : nlohmann::json();
  c["J3"] = cfg.J3 ? nlohmann::json(range_text(*cfg.J3)) : nlohmann::json();
  c["h"] = cfg.h ? nlohmann::json(range_text(*cfg.h)) : nlohmann::json();
  c["trotter_n"] = cfg.trotter_n ? nlohmann::json(*cfg.trotter_n) : nlohmann::json();
  c["tol"] = cfg.quad_tol;
  c["seed"] = cfg.seed;
  return c;
}

std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_real(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "1" : "0"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::json json_value(const Cell& c) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(double x) const {
      return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(format_real(x));
    }
    nlohmann::json operator()(std::int64_t x) const { return x; }
    nlohmann::json operator()(bool x) const { return x; }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::vector<double> Range::values() const {
  std::vector<double> v(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v[0] = start;
    return v;
  }
  // Weighted form keeps both endpoints and interior integers exact.
  const int n = steps - 1;
  for (int i = 0; i <= n; ++i) {
    v[static_cast<std::size_t>(i)] = (start * (n - i) + stop * i) / static_cast<double>(n);
  }
  return v;
}

Range parse_range(std::string_view text, std::string_view flag) {
  const std::vector<std::string_view> parts = split(text, ':');
  Range r;
  if (parts.size() == 1) {
    r.start = r.stop = parse_real(parts[0], flag);
    return r;
  }
  if (parts.size() != 3) {
    throw ConfigError(std::string(flag) + ": expected start:stop:steps, got '" + std::string(text) +
                      "'");
  }
  r.start = parse_real(parts[0], flag);
  r.stop = parse_real(parts[1], flag);
  r.steps = parse_int(parts[2], flag);
  if (r.steps < 1) throw ConfigError(std::string(flag) + ": steps must be at least 1");
  if (!(r.start < r.stop)) throw ConfigError(std::string(flag) + ": start must be below stop");
  return r;
}

Couplings parse_couplings(std::string_view text) {
  const std::vector<std::string_view> parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError("--J: expected three comma-separated reals, got '" + std::string(text) + "'");
  }
  return Couplings{parse_real(parts[0], "--J"), parse_real(parts[1], "--J"),
                   parse_real(parts[2], "--J")};
}

std::string_view command_name(Command c) noexcept {
  switch (c) {
    case Command::FreeEnergy: return "free-energy";
    case Command::Cylinder: return "cylinder";
    case Command::Critical: return "critical";
    case Command::Quantum: return "quantum";
    case Command::Verify: return "verify";
  }
  return "";
}

void RunConfig::validate() const {
  if (!(quad_tol > 0.0 && quad_tol <= 1e-2)) throw ConfigError("--tol must lie in (0, 1e-2]");
  if (M && *M < 2) throw ConfigError("--cylinder-M must be at least 2");
  if (trotter_n && *trotter_n < 1) throw ConfigError("--trotter-n must be at least 1");
  switch (command) {
    case Command::FreeEnergy:
    case Command::Cylinder:
      if (beta.start < 0.0) throw ConfigError("--beta must be nonnegative");
      if (command == Command::Cylinder && !M) throw ConfigError("cylinder requires --cylinder-M");
      break;
    case Command::Critical:
      if (!J3) throw ConfigError("critical requires --J3");
      break;
    case Command::Quantum:
      if (!h) throw ConfigError("quantum requires --h");
      if (!(beta.start > 0.0)) throw ConfigError("--beta must be positive");
      break;
    case Command::Verify:
      break;
  }
}

Table run_command(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.command) {
    case Command::FreeEnergy: return free_energy_table(cfg);
    case Command::Cylinder: return cylinder_table(cfg);
    case Command::Critical: return critical_table(cfg);
    case Command::Quantum: return quantum_table(cfg);
    case Command::Verify: return verify_table(cfg);
  }
  throw ConfigError("unknown command");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg) {
  if (!cfg.reproducible) {
    os << "# kwising " << kVersion << ' ' << command_name(cfg.command) << " generated "
       << timestamp() << '\n';
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_field(row[c]);
    os << '\n';
  }
  if (t.error) os << "# error at row " << t.error->row << ": " << t.error->message << '\n';
}

void write_json(std::ostream& os, const Table& t, const RunConfig& cfg) {
  nlohmann::json meta;
  meta["program"] = "kwising";
  meta["version"] = kVersion;
  meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                  "." + std::to_string(EIGEN_MINOR_VERSION);
  meta["openmp"] = _OPENMP;
  meta["config"] = config_echo(cfg);
  if (!cfg.reproducible) meta["generated"] = timestamp();

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) r[t.columns[c]] = json_value(row[c]);
    rows.push_back(std::move(r));
  }
  nlohmann::json doc;
  doc["meta"] = std::move(meta);
  doc["rows"] = std::move(rows);
  if (t.error) doc["error"] = {{"row", t.error->row}, {"message", t.error->message}};
  if (cfg.command == Command::Verify) doc["passed"] = !t.verification_failed;
  os << doc.dump(2) << '\n';
}

int exit_code(const Table& t) noexcept {
  if (t.error) return t.error->exit_code;
  return t.verification_failed ? kVerifyFailed : kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact thermodynamics of triangular-lattice Ising models and the transverse-field chain",
               "kwising"};
  // -h is not a help alias: --h is the transverse field.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string J_text = "1,1,1";
  std::string beta_text;
  std::string J3_text;
  std::string h_text;
  std::string format_text = "csv";

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.quad_tol, "quadrature tolerance in (0, 1e-2]");
    sub->add_option("--format", format_text, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", cfg.output_path, "write to this file instead of stdout");
    sub->add_flag("--reproducible", cfg.reproducible, "omit the timestamp");
  };

  CLI::App* fe = app.add_subcommand("free-energy", "f, f', f'' of the plane along a beta sweep");
  fe->add_option("--J", J_text, "couplings J1,J2,J3");
  fe->add_option("--beta", beta_text, "start:stop:steps")->required();
  fe->add_option("--cylinder-M", cfg.M, "add cylinder and transfer-matrix columns");
  common(fe);

  CLI::App* cyl = app.add_subcommand("cylinder", "cylinder free energy against the transfer matrix");
  cyl->add_option("--J", J_text, "couplings J1,J2,J3");
  cyl->add_option("--beta", beta_text, "start:stop:steps")->required();
  cyl->add_option("--cylinder-M", cfg.M, "circumference")->required();
  common(cyl);

  CLI::App* crit = app.add_subcommand("critical", "critical line for J1 = J2 = 1");
  crit->add_option("--J3", J3_text, "start:stop:steps")->required();
  common(crit);

  CLI::App* qu = app.add_subcommand("quantum", "transverse-field chain");
  qu->add_option("--beta", beta_text, "start:stop:steps")->required();
  qu->add_option("--h", h_text, "start:stop:steps")->required();
  qu->add_option("--trotter-n", cfg.trotter_n, "add the Trotter column with n slices");
  common(qu);

  CLI::App* ver = app.add_subcommand("verify", "run the identity suite");
  ver->add_option("--seed", cfg.seed, "generator seed for random draws");
  common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (fe->parsed()) cfg.command = Command::FreeEnergy;
    if (cyl->parsed()) cfg.command = Command::Cylinder;
    if (crit->parsed()) cfg.command = Command::Critical;
    if (qu->parsed()) cfg.command = Command::Quantum;
    if (ver->parsed()) cfg.command = Command::Verify;
    cfg.couplings = parse_couplings(J_text);
    if (!beta_text.empty()) cfg.beta = parse_range(beta_text, "--beta");
    if (!J3_text.empty()) cfg.J3 = parse_range(J3_text, "--J3");
    if (!h_text.empty()) cfg.h = parse_range(h_text, "--h");
    cfg.format = format_text == "json" ? Format::Json : Format::Csv;
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "kwising: " << e.what() << '\n';
    return kConfigError;
  }

  Table table = run_command(cfg);

  std::ofstream file;
  std::ostream* os = &out;
  if (cfg.output_path) {
    file.open(*cfg.output_path);
    if (!file) {
      err << "kwising: cannot open " << *cfg.output_path << '\n';
      return kConfigError;
    }
    os = &file;
  }
  if (cfg.format == Format::Json) {
    write_json(*os, table, cfg);
  } else {
    write_csv(*os, table, cfg);
  }
  os->flush();
  if (table.error) err << "kwising: row " << table.error->row << ": " << table.error->message << '\n';
  return exit_code(table);
}

}  // namespace kwising::cli
