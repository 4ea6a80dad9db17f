#include "gspn_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "gspn/error.hpp"
#include "gspn/fabric.hpp"
#include "gspn/metrics.hpp"
#include "gspn/net_io.hpp"
#include "gspn/optimizer.hpp"
#include "gspn/simulator.hpp"

#ifndef GSPN_VERSION
#define GSPN_VERSION "unknown"
#endif

namespace gspn::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kCsvSchema = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting helpers

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { add(header); }

  void add(const std::vector<std::string>& row) {
    if (row.size() != columns_) throw std::logic_error("csv row width mismatch");
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(csv_field(c));
    text_ += fmt::format("{}\n", fmt::join(cells, ","));
  }

  void save(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError(fmt::format("cannot write {}", path.string()));
    f << text_;
  }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string utc_timestamp() {
  auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot read {}", path.string()));
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Settings: defaults < GSPN_SEED < params file < flags

struct Flags {
  std::string params_file;
  std::optional<double> lambda, mu_http, mu_endorse, mu_order, mu_commit, mu_net;
  std::optional<double> horizon, warmup, fit_a, fit_b;
  std::optional<std::uint32_t> batch_n, replications, windows;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct Settings {
  FabricParams params = default_params();
  SimConfig sim;
  std::uint32_t replications = 5;
  std::optional<double> fit_a, fit_b;

  bool has_fit() const { return fit_a.has_value(); }
};

std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw UsageError(fmt::format("{} must be a non-negative integer, got '{}'", what, text));
  return value;
}

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& target) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return;
  try {
    target = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(fmt::format("parameter '{}' has the wrong type", key));
  }
}

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, std::optional<T>& target) {
  T value{};
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return;
  read_key(doc, key, value);
  target = value;
}

// A manifest written by this tool is also a valid params file.
nlohmann::json params_document(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!doc.is_object()) throw ParseError(fmt::format("{}: expected a JSON object", path.string()));
  if (doc.contains("command") && doc.contains("params") && doc["params"].is_object()) return doc["params"];
  return doc;
}

Settings resolve(const Flags& flags) {
  Settings s;
  if (const char* env = std::getenv("GSPN_SEED"); env && *env) s.sim.seed = parse_seed(env, "GSPN_SEED");

  if (!flags.params_file.empty()) {
    auto doc = params_document(flags.params_file);
    s.params = parse_fabric_params(doc.dump());
    read_key(doc, "horizon", s.sim.horizon);
    read_key(doc, "warmup", s.sim.warmup);
    read_key(doc, "seed", s.sim.seed);
    read_key(doc, "windows", s.sim.windows);
    read_key(doc, "replications", s.replications);
    read_key(doc, "fit_a", s.fit_a);
    read_key(doc, "fit_b", s.fit_b);
  }

  auto apply = [](const auto& flag, auto& field) {
    if (flag) field = *flag;
  };
  apply(flags.lambda, s.params.lambda);
  apply(flags.mu_http, s.params.mu_http);
  apply(flags.mu_endorse, s.params.mu_endorse);
  apply(flags.mu_order, s.params.mu_order);
  apply(flags.mu_commit, s.params.mu_commit);
  apply(flags.mu_net, s.params.mu_net);
  apply(flags.batch_n, s.params.batch_n);
  apply(flags.horizon, s.sim.horizon);
  apply(flags.warmup, s.sim.warmup);
  apply(flags.seed, s.sim.seed);
  apply(flags.windows, s.sim.windows);
  apply(flags.replications, s.replications);
  if (flags.fit_a) s.fit_a = flags.fit_a;
  if (flags.fit_b) s.fit_b = flags.fit_b;

  try {
    s.sim.validate();
  } catch (const SimulationError& e) {
    throw UsageError(e.what());
  }
  if (s.replications == 0) throw UsageError("replications must be at least 1");
  if (s.fit_a.has_value() != s.fit_b.has_value()) throw UsageError("--fit-a and --fit-b go together");
  return s;
}

// Params for one run; a commit-latency fit overrides mu_commit for the
// run's batch size.
FabricParams effective_params(const Settings& s, FabricParams params) {
  if (s.has_fit()) {
    double latency = *s.fit_a + *s.fit_b * params.batch_n;
    if (!(latency > 0.0)) throw UsageError(fmt::format("commit latency fit gives {} ms at N={}", latency, params.batch_n));
    params.mu_commit = 1000.0 / latency;
  }
  params.validate();
  return params;
}

ordered_json settings_json(const Settings& s) {
  auto doc = ordered_json::parse(serialize_fabric_params(s.params));
  doc["horizon"] = s.sim.horizon;
  doc["warmup"] = s.sim.warmup;
  doc["seed"] = s.sim.seed;
  doc["windows"] = s.sim.windows;
  doc["replications"] = s.replications;
  doc["fit_a"] = s.fit_a ? ordered_json(*s.fit_a) : ordered_json(nullptr);
  doc["fit_b"] = s.fit_b ? ordered_json(*s.fit_b) : ordered_json(nullptr);
  return doc;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& args,
                    ordered_json params, std::optional<std::uint64_t> seed, const std::vector<std::string>& outputs) {
  ordered_json m;
  m["command"] = command;
  m["arguments"] = args;
  m["version"] = GSPN_VERSION;
  m["timestamp"] = utc_timestamp();
  m["csv_schema"] = kCsvSchema;
  m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  m["rng"] = "mt19937_64";
  m["params"] = std::move(params);
  m["outputs"] = outputs;
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot write {}", (dir / "manifest.json").string()));
  f << m.dump(2) << '\n';
}

fs::path prepare_out(const Flags& flags) {
  fs::path dir = flags.out_dir.value_or("gspn-out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  return dir;
}

// ---------------------------------------------------------------------------
// Simulation reports

struct PointResult {
  FabricParams params;
  std::vector<SimulationTrace> traces;
  std::vector<SystemReport> reports;
  ReplicatedReport summary;
};

PointResult run_point(const FabricParams& params, const Settings& s) {
  PointResult r;
  r.params = params;
  auto model = build_fabric_net(params);
  r.traces = replicate(model.net, s.sim, s.replications);
  for (const auto& t : r.traces) r.reports.push_back(system_report(t, model.labeling));
  r.summary = summarize(r.reports);
  return r;
}

// Pooled over replications: counters and sums add up, rates use the total
// observed time.
Csv place_csv(const std::vector<SimulationTrace>& traces) {
  Csv csv({"place", "arrivals", "departures", "sojourn_sum_s", "mean_latency_ms", "throughput_per_s",
           "mean_queue_len"});
  const auto& first = traces.front();
  double observed = 0.0;
  for (const auto& t : traces) observed += t.observation_window();
  for (std::size_t i = 0; i < first.place_names.size(); ++i) {
    std::uint64_t arrivals = 0, departures = 0;
    double sojourn = 0.0;
    for (const auto& t : traces) {
      arrivals += t.places[i].arrivals;
      departures += t.places[i].departures;
      sojourn += t.places[i].sojourn_sum;
    }
    std::optional<double> latency;
    if (departures > 0) latency = 1000.0 * sojourn / static_cast<double>(departures);
    csv.add({first.place_names[i], std::to_string(arrivals), std::to_string(departures), num(sojourn), num(latency),
             num(static_cast<double>(departures) / observed), num(sojourn / observed)});
  }
  return csv;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return estimate(v).mean;
}

Csv phase_csv(const PointResult& r) {
  Csv csv({"phase", "L_wait_ms", "L_serve_ms", "delta_ms", "queue_len"});
  for (auto phase : kAllPhases) {
    std::vector<double> wait, serve;
    for (const auto& rep : r.reports) {
      const auto& p = rep.phase(phase);
      if (p.delay) {
        if (p.delay->latency_ms) serve.push_back(*p.delay->latency_ms);
      } else if (p.limiting_unit) {
        const auto& u = p.units[*p.limiting_unit];
        if (u.wait.latency_ms) wait.push_back(*u.wait.latency_ms);
        if (u.serve.latency_ms) serve.push_back(*u.serve.latency_ms);
      }
    }
    const auto& delta = r.summary.delta_ms[static_cast<std::size_t>(phase)];
    std::optional<double> delta_mean;
    if (delta) delta_mean = delta->mean;
    csv.add({std::string(to_string(phase)), num(mean_of(wait)), num(mean_of(serve)), num(delta_mean),
             num(r.summary.queue_length[static_cast<std::size_t>(phase)].mean)});
  }
  return csv;
}

std::optional<double> total_delta(const ReplicatedReport& s) {
  if (!s.delta_total_ms) return std::nullopt;
  return s.delta_total_ms->mean;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const Flags& flags, const std::optional<std::string>& net_file,
                 const std::vector<std::string>& args, std::ostream& out) {
  auto s = resolve(flags);
  auto dir = prepare_out(flags);

  if (net_file) {
    PetriNet net = load_net(*net_file);
    auto traces = replicate(net, s.sim, s.replications);
    place_csv(traces).save(dir / "places.csv");
    std::vector<std::string> outputs = {"places.csv"};
    std::optional<PhaseLabeling> labeling;
    try {
      labeling = label_fabric_net(net);
    } catch (const NetError&) {
      out << "net has no fabric phase structure; wrote per-place statistics only\n";
    }
    auto doc = settings_json(s);
    doc["net"] = *net_file;
    if (labeling) {
      PointResult r;
      r.traces = std::move(traces);
      for (const auto& t : r.traces) r.reports.push_back(system_report(t, *labeling));
      r.summary = summarize(r.reports);
      phase_csv(r).save(dir / "phases.csv");
      outputs.push_back("phases.csv");
      out << fmt::format("throughput {:.2f} rps, bottleneck {}\n", r.summary.throughput.mean,
                         bottleneck_label(r.summary.bottleneck));
    }
    outputs.push_back("manifest.json");
    write_manifest(dir, "simulate", args, std::move(doc), s.sim.seed, outputs);
    return kExitOk;
  }

  auto params = effective_params(s, s.params);
  auto r = run_point(params, s);
  place_csv(r.traces).save(dir / "places.csv");
  phase_csv(r).save(dir / "phases.csv");
  Csv summary({"lambda", "N", "delta_total_ms", "throughput_rps", "bottleneck"});
  summary.add({num(params.lambda), std::to_string(params.batch_n), num(total_delta(r.summary)),
               num(r.summary.throughput.mean), bottleneck_label(r.summary.bottleneck)});
  summary.save(dir / "summary.csv");
  write_manifest(dir, "simulate", args, settings_json(s), s.sim.seed,
                 {"places.csv", "phases.csv", "summary.csv", "manifest.json"});

  out << fmt::format("lambda={} N={} replications={} horizon={}s seed={}\n", params.lambda, params.batch_n,
                     s.replications, s.sim.horizon, s.sim.seed);
  for (auto phase : kAllPhases) {
    const auto& d = r.summary.delta_ms[static_cast<std::size_t>(phase)];
    out << fmt::format("  {:<12} {}\n", to_string(phase), d ? fmt::format("{:.3f} ms", d->mean) : "no data");
  }
  auto total = total_delta(r.summary);
  out << fmt::format("  total        {}\n", total ? fmt::format("{:.3f} ms", *total) : "no data");
  out << fmt::format("  throughput   {:.3f} rps (sd {:.3f})\n", r.summary.throughput.mean, r.summary.throughput.stddev);
  out << fmt::format("  bottleneck   {}\n", bottleneck_label(r.summary.bottleneck));
  out << fmt::format("wrote {}\n", dir.string());
  return kExitOk;
}

std::vector<double> parse_grid(const std::optional<std::string>& values, const std::optional<std::string>& range) {
  if (values.has_value() == range.has_value()) throw UsageError("sweep needs exactly one of --values or --range");
  auto to_double = [](const std::string& text) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v))
      throw UsageError(fmt::format("not a number: '{}'", text));
    return v;
  };
  auto split = [](const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
  };

  std::vector<double> grid;
  if (values) {
    for (const auto& part : split(*values, ',')) {
      if (!part.empty()) grid.push_back(to_double(part));
    }
  } else {
    auto parts = split(*range, ':');
    if (parts.size() != 3) throw UsageError("--range expects start:stop:step");
    double start = to_double(parts[0]), stop = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0)) throw UsageError("range step must be positive");
    const double slack = 1e-9 * std::max(std::abs(stop), step);
    for (std::size_t k = 0;; ++k) {
      double v = start + static_cast<double>(k) * step;
      if (v > stop + slack) break;
      grid.push_back(v);
    }
  }
  if (grid.empty()) throw UsageError("sweep range is empty");
  return grid;
}

int cmd_sweep(const Flags& flags, const std::string& axis, const std::optional<std::string>& values,
              const std::optional<std::string>& range, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  auto grid = parse_grid(values, range);
  if (axis != "lambda" && axis != "batch_n") throw UsageError("--axis must be lambda or batch_n");
  if (axis == "batch_n") {
    for (double v : grid) {
      if (!(v >= 1.0) || v != std::floor(v)) throw UsageError(fmt::format("batch_n must be a positive integer, got {}", v));
    }
  }
  auto s = resolve(flags);
  auto dir = prepare_out(flags);

  std::vector<std::string> header = {"axis", "value", "lambda", "N", "mu_commit", "replications", "status"};
  for (auto phase : kAllPhases) {
    header.push_back(fmt::format("delta_{}_ms_mean", lower(to_string(phase))));
    header.push_back(fmt::format("delta_{}_ms_sd", lower(to_string(phase))));
  }
  for (const char* col : {"delta_total_ms_mean", "delta_total_ms_sd", "theta_rps_mean", "theta_rps_sd"}) header.push_back(col);
  for (auto phase : kAllPhases) {
    header.push_back(fmt::format("queue_{}_mean", lower(to_string(phase))));
    header.push_back(fmt::format("queue_{}_sd", lower(to_string(phase))));
  }
  header.push_back("bottleneck");
  header.push_back("error");
  Csv csv(header);

  auto est = [](const std::optional<Estimate>& e) {
    return e ? std::pair{num(e->mean), num(e->stddev)} : std::pair{std::string{}, std::string{}};
  };

  std::size_t failures = 0;
  for (double v : grid) {
    FabricParams base = s.params;
    if (axis == "lambda") base.lambda = v;
    else base.batch_n = static_cast<std::uint32_t>(v);
    std::vector<std::string> row = {axis, num(v), num(base.lambda), std::to_string(base.batch_n)};
    try {
      auto params = effective_params(s, base);
      auto r = run_point(params, s);
      row.insert(row.end(), {num(params.mu_commit), std::to_string(s.replications), "ok"});
      for (const auto& d : r.summary.delta_ms) {
        auto [m, sd] = est(d);
        row.insert(row.end(), {m, sd});
      }
      auto [tm, tsd] = est(r.summary.delta_total_ms);
      row.insert(row.end(), {tm, tsd, num(r.summary.throughput.mean), num(r.summary.throughput.stddev)});
      for (const auto& q : r.summary.queue_length) row.insert(row.end(), {num(q.mean), num(q.stddev)});
      row.insert(row.end(), {bottleneck_label(r.summary.bottleneck), ""});
      out << fmt::format("{}={} theta={:.2f} rps bottleneck={}\n", axis, v, r.summary.throughput.mean,
                         bottleneck_label(r.summary.bottleneck));
    } catch (const std::exception& e) {
      // Usage problems that only show up for one grid point (a fit that
      // turns non-positive, say) count as failed points too.
      ++failures;
      row.resize(4);
      row.insert(row.end(), {"", std::to_string(s.replications), "error"});
      row.resize(header.size() - 1);
      row.push_back(e.what());
      err << fmt::format("{}={} failed: {}\n", axis, v, e.what());
    }
    csv.add(row);
  }
  csv.save(dir / "sweep.csv");
  auto doc = settings_json(s);
  doc["axis"] = axis;
  doc["grid"] = grid;
  write_manifest(dir, "sweep", args, std::move(doc), s.sim.seed, {"sweep.csv", "manifest.json"});
  out << fmt::format("wrote {} ({} points, {} failed)\n", (dir / "sweep.csv").string(), grid.size(), failures);
  return failures == 0 ? kExitOk : kExitSimulation;
}

// Two numeric columns per line; a non-numeric first line is a header and
// '#' starts a comment line.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t min_columns) {
  std::ifstream f(path);
  if (!f) throw UsageError(fmt::format("cannot read {}", path.string()));
  std::vector<std::vector<double>> rows;
  std::string line;
  for (std::size_t lineno = 1; std::getline(f, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    bool numeric = true;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      double v = 0.0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || end != cell.data() + cell.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ParseError(fmt::format("{}:{}: expected numbers", path.string(), lineno));
    }
    if (row.size() < min_columns)
      throw ParseError(fmt::format("{}:{}: expected {} columns", path.string(), lineno, min_columns));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_fit(const Flags& flags, const std::string& input, const std::vector<std::string>& args, std::ostream& out) {
  std::vector<LatencySample> samples;
  for (const auto& row : read_numeric_csv(input, 2)) samples.push_back({row[0], row[1]});
  auto fit = fit_commit_latency(samples);
  auto dir = prepare_out(flags);
  Csv csv({"a_ms", "b_ms_per_tx", "n_min", "n_max", "residual_rms_ms", "samples"});
  csv.add({num(fit.a), num(fit.b), num(fit.n_min), num(fit.n_max), num(fit.residual_rms), std::to_string(samples.size())});
  csv.save(dir / "fit.csv");
  ordered_json doc;
  doc["input"] = input;
  write_manifest(dir, "fit", args, std::move(doc), std::nullopt, {"fit.csv", "manifest.json"});
  out << fmt::format("commit latency h(N) = {:.4f} + {:.4f} N ms over N in [{}, {}], rms residual {:.4f} ms\n", fit.a,
                     fit.b, fit.n_min, fit.n_max, fit.residual_rms);
  out << fmt::format("wrote {}\n", (dir / "fit.csv").string());
  return kExitOk;
}

LatencyFit fit_from_csv(const fs::path& path) {
  auto rows = read_numeric_csv(path, 2);
  if (rows.size() != 1) throw ParseError(fmt::format("{}: expected one fit row", path.string()));
  LatencyFit fit;
  fit.a = rows[0][0];
  fit.b = rows[0][1];
  return fit;
}

int cmd_optimize(const Flags& flags, double mu_e, const std::optional<std::string>& fit_file,
                 const std::vector<std::string>& args, std::ostream& out) {
  LatencyFit fit;
  if (fit_file) {
    if (flags.fit_a || flags.fit_b) throw UsageError("use either --fit or --fit-a/--fit-b");
    fit = fit_from_csv(*fit_file);
  } else if (flags.fit_a && flags.fit_b) {
    fit.a = *flags.fit_a;
    fit.b = *flags.fit_b;
  } else {
    throw UsageError("optimize needs --fit <fit.csv> or both --fit-a and --fit-b");
  }
  auto r = min_batch_params(mu_e, fit);
  auto dir = prepare_out(flags);
  Csv csv({"mu_e", "a", "b", "theta_max_rps", "n_min", "t_min_s", "t_min_rounded_s", "t_sufficient_s"});
  csv.add({num(mu_e), num(fit.a), num(fit.b), num(r.theta_max), std::to_string(r.n_min), num(r.t_min),
           num(r.t_min_rounded), num(r.t_sufficient)});
  csv.save(dir / "optimize.csv");
  ordered_json doc;
  doc["mu_e"] = mu_e;
  doc["a"] = fit.a;
  doc["b"] = fit.b;
  write_manifest(dir, "optimize", args, std::move(doc), std::nullopt, {"optimize.csv", "manifest.json"});
  out << fmt::format("maximum throughput {} rps, limited by {}\n", num(r.theta_max), r.limiting_phase);
  out << fmt::format("batch size  n >= {}\n", r.n_min);
  out << fmt::format("timeout     t >= {:.6f} s (closed form, {} s rounded up to ms)\n", r.t_min, num(r.t_min_rounded));
  out << fmt::format("            t >= {:.6f} s guarantees the cut-off batch reaches n\n", r.t_sufficient);
  out << fmt::format("wrote {}\n", (dir / "optimize.csv").string());
  return kExitOk;
}

int cmd_dump_net(const Flags& flags, const std::vector<std::string>& args, std::ostream& out) {
  auto s = resolve(flags);
  auto params = effective_params(s, s.params);
  auto model = build_fabric_net(params);
  if (!flags.out_dir) {
    out << serialize_net(model.net) << '\n';
    return kExitOk;
  }
  auto dir = prepare_out(flags);
  save_net(model.net, dir / "net.json");
  write_manifest(dir, "dump-net", args, settings_json(s), std::nullopt, {"net.json", "manifest.json"});
  out << fmt::format("wrote {}\n", (dir / "net.json").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_out(CLI::App& cmd, Flags& f) {
  cmd.add_option("--out", f.out_dir, "Output directory (default gspn-out)");
}

void add_model_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--params", f.params_file, "JSON parameter file or a manifest.json from an earlier run");
  cmd.add_option("--lambda", f.lambda, "Request arrival rate (1/s)");
  cmd.add_option("--batch-n", f.batch_n, "Transactions per block");
  cmd.add_option("--mu-http", f.mu_http, "HTTP service rate (1/s)");
  cmd.add_option("--mu-endorse", f.mu_endorse, "Endorsement service rate (1/s)");
  cmd.add_option("--mu-order", f.mu_order, "Ordering service rate (blocks/s)");
  cmd.add_option("--mu-commit", f.mu_commit, "Commit service rate per committer (blocks/s)");
  cmd.add_option("--mu-net", f.mu_net, "Network response rate (1/s)");
  cmd.add_option("--fit-a", f.fit_a, "Commit latency intercept a (ms); sets mu_commit = 1000/(a + b N)");
  cmd.add_option("--fit-b", f.fit_b, "Commit latency slope b (ms per transaction)");
  add_out(cmd, f);
}

void add_sim_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--horizon", f.horizon, "Simulated seconds per replication (default 1000)");
  cmd.add_option("--warmup", f.warmup, "Seconds discarded from statistics (default 0)");
  cmd.add_option("--seed", f.seed, "Base seed; replication i uses seed + i (default $GSPN_SEED or 1)");
  cmd.add_option("--replications", f.replications, "Independent replications (default 5)");
  cmd.add_option("--windows", f.windows, "Observation windows for bottleneck detection (default 4)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GSPN simulator and ordering-service optimizer for a Fabric-style pipeline", "gspn"};
  app.set_version_flag("--version", GSPN_VERSION);
  app.require_subcommand(1);

  Flags flags;
  std::optional<std::string> net_file, values, range, fit_file;
  std::string axis = "lambda";
  std::string fit_input;
  double mu_e = 143.0;

  auto* simulate = app.add_subcommand("simulate", "Simulate the model and write per-place, phase and summary CSVs");
  add_model_flags(*simulate, flags);
  add_sim_flags(*simulate, flags);
  simulate->add_option("--net", net_file, "Simulate a net file instead of the built-in model");

  auto* sweep = app.add_subcommand("sweep", "Simulate a grid of arrival rates or batch sizes");
  add_model_flags(*sweep, flags);
  add_sim_flags(*sweep, flags);
  sweep->add_option("--axis", axis, "lambda or batch_n")->capture_default_str();
  sweep->add_option("--values", values, "Comma-separated grid values");
  sweep->add_option("--range", range, "Inclusive grid start:stop:step");

  auto* fit = app.add_subcommand("fit", "Fit commit latency a + b N from a CSV of (N, latency_ms)");
  fit->add_option("input", fit_input, "CSV file")->required();
  add_out(*fit, flags);

  auto* optimize = app.add_subcommand("optimize", "Smallest ordering batch size and timeout for full throughput");
  optimize->add_option("--mu-e", mu_e, "Endorsement service rate (1/s)")->capture_default_str();
  optimize->add_option("--fit", fit_file, "fit.csv written by the fit command");
  optimize->add_option("--fit-a", flags.fit_a, "Commit latency intercept a (ms)");
  optimize->add_option("--fit-b", flags.fit_b, "Commit latency slope b (ms per transaction)");
  add_out(*optimize, flags);

  auto* dump = app.add_subcommand("dump-net", "Print the model net as JSON (or write net.json with --out)");
  add_model_flags(*dump, flags);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version arrive here too, with code 0.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(flags, net_file, args, out);
    if (*sweep) return cmd_sweep(flags, axis, values, range, args, out, err);
    if (*fit) return cmd_fit(flags, fit_input, args, out);
    if (*optimize) return cmd_optimize(flags, mu_e, fit_file, args, out);
    if (*dump) return cmd_dump_net(flags, args, out);
  } catch (const OptimizerError& e) {
    err << "error: " << e.what() << '\n';
    return kExitOptimizer;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    // UsageError, ParseError, NetError and I/O failures.
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace gspn::cli
