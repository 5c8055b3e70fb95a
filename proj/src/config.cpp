#include "specclust/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace specclust {

ConfigError::ConfigError(std::string source, std::size_t line, std::string field, const std::string& what)
    : std::runtime_error([&] {
        std::string msg = source.empty() ? "config" : source;
        if (line > 0) msg += ":" + std::to_string(line);
        if (!field.empty()) msg += ": " + field;
        return msg + ": " + what;
      }()),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::RatioSurface, "ratio-surface"},   {ExperimentKind::SweepGammaAlpha, "sweep-gamma-alpha"},
    {ExperimentKind::SweepN, "sweep-n"},               {ExperimentKind::ZeroComm, "zero-comm"},
    {ExperimentKind::LinkPred, "linkpred"},            {ExperimentKind::AnalyticAccuracy, "analytic-accuracy"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> range(double start, double step, double stop) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(std::round((start + i * step) * 1e12) / 1e12);
  return out;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = kv_.entries.find(key);
    if (it == kv_.entries.end()) throw ConfigError("", 0, key, what);
    throw ConfigError(it->second.source, it->second.line, key, what);
  }

  const std::string* raw(const std::string& key) const {
    auto it = kv_.entries.find(key);
    return it == kv_.entries.end() ? nullptr : &it->second.value;
  }

  double number(const std::string& key, const std::string& text) const {
    double v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || !std::isfinite(v)) fail(key, "'" + text + "' is not a number");
    return v;
  }

  std::uint64_t integer(const std::string& key, const std::string& text) const {
    std::uint64_t v = 0;
    const auto* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), last, v);
    if (ec != std::errc() || p != last) fail(key, "'" + text + "' is not a non-negative integer");
    return v;
  }

  void get(const std::string& key, double& out) const {
    if (const auto* s = raw(key)) out = number(key, *s);
  }
  void get(const std::string& key, std::size_t& out) const {
    if (const auto* s = raw(key)) out = static_cast<std::size_t>(integer(key, *s));
  }
  void get(const std::string& key, std::string& out) const {
    if (const auto* s = raw(key)) out = *s;
  }

  // "a,b,c" or "start:step:stop"
  std::vector<double> numbers(const std::string& key, const std::string& text) const {
    if (text.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(number(key, trim(item)));
      if (parts.size() != 3) fail(key, "range must be start:step:stop");
      if (!(parts[1] > 0)) fail(key, "range step must be positive");
      if (parts[2] < parts[0]) fail(key, "range stop is below start");
      return range(parts[0], parts[1], parts[2]);
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(number(key, item));
    }
    return out;
  }

  void get(const std::string& key, std::vector<double>& out) const {
    if (const auto* s = raw(key)) out = numbers(key, *s);
  }
  void get(const std::string& key, std::vector<std::size_t>& out) const {
    if (const auto* s = raw(key)) {
      out.clear();
      for (double v : numbers(key, *s)) {
        if (v < 0 || v != std::floor(v)) fail(key, "expected non-negative integers");
        out.push_back(static_cast<std::size_t>(v));
      }
    }
  }
  void get(const std::string& key, std::vector<int>& out) const {
    if (const auto* s = raw(key)) {
      out.clear();
      for (double v : numbers(key, *s)) {
        if (v != std::floor(v)) fail(key, "expected integers");
        out.push_back(static_cast<int>(v));
      }
    }
  }

 private:
  const KeyValues& kv_;
};

void check(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) r.fail(key, what);
}

void check_probability(const Reader& r, const std::string& key, double v) {
  check(v >= 0 && v <= 1, r, key, "must lie in [0, 1]");
}

void validate_with(const ExperimentConfig& c, const Reader& r) {
  check(c.replicates >= 1, r, "replicates", "must be at least 1");
  check(c.n >= 2, r, "n", "must be at least 2");
  check(c.pi > 0 && c.pi < 1, r, "pi", "must lie in (0, 1)");
  check_probability(r, "alpha", c.alpha);
  check_probability(r, "beta", c.beta);
  check_probability(r, "gamma", c.gamma);
  for (double a : c.alpha_grid) check_probability(r, "alpha_grid", a);
  for (double b : c.beta_grid) check_probability(r, "beta_grid", b);
  for (double x : c.ratio_grid) check(x >= 0, r, "ratio_grid", "ratios must be non-negative");
  for (auto n : c.n_grid) check(n >= 2, r, "n_grid", "sizes must be at least 2");
  check(c.transfer == "procrustes" || c.transfer == "refit", r, "transfer", "must be 'procrustes' or 'refit'");
  check(c.lcc_fraction > 0 && c.lcc_fraction <= 1, r, "lcc_fraction", "must lie in (0, 1]");
  check(c.persistence >= 0 && c.persistence <= 1, r, "persistence", "must lie in [0, 1]");
  check(c.snapshot_count >= 3, r, "snapshot_count", "needs at least 3 snapshots");
  check(c.sample_nodes >= 1, r, "sample_nodes", "must be at least 1");
  check(c.runs >= 1, r, "runs", "must be at least 1");
  for (int k : c.k_grid) check(k >= 1, r, "k_grid", "k must be positive");
  check(c.min_separation >= 0, r, "min_separation", "must be non-negative");

  switch (c.kind) {
    case ExperimentKind::RatioSurface:
      check(!c.alpha_grid.empty(), r, "alpha_grid", "must be nonempty");
      check(!c.ratio_grid.empty(), r, "ratio_grid", "must be nonempty");
      break;
    case ExperimentKind::SweepGammaAlpha:
      check(!c.alpha_grid.empty(), r, "alpha_grid", "must be nonempty");
      check(!c.ratio_grid.empty(), r, "ratio_grid", "must be nonempty");
      for (double a : c.alpha_grid) {
        for (double x : c.ratio_grid) check(a * x <= 1, r, "ratio_grid", "gamma = ratio * alpha exceeds 1");
      }
      break;
    case ExperimentKind::SweepN:
      check(!c.n_grid.empty(), r, "n_grid", "must be nonempty");
      break;
    case ExperimentKind::AnalyticAccuracy:
      check(!c.alpha_grid.empty(), r, "alpha_grid", "must be nonempty");
      check(!c.beta_grid.empty(), r, "beta_grid", "must be nonempty");
      check(!c.ratio_grid.empty(), r, "ratio_grid", "must be nonempty");
      break;
    case ExperimentKind::ZeroComm:
      check(c.gamma == 0, r, "gamma", "zero-comm needs gamma = 0");
      check(c.alpha > 0 && c.beta > 0, r, "alpha", "zero-comm needs alpha, beta > 0");
      break;
    case ExperimentKind::LinkPred:
      break;
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& text) {
  for (const auto& [k, name] : kKindNames) {
    if (text == name) return k;
  }
  return std::nullopt;
}

void KeyValues::set(const std::string& key, std::string value, std::string source, std::size_t line) {
  entries[key] = Entry{std::move(value), std::move(source), line};
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, lineno, "", "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, lineno, "", "missing key before '='");
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(source, lineno, key, "unknown key");
    }
    if (value.empty()) throw ConfigError(source, lineno, key, "missing value");
    kv.set(key, value, source, lineno);
  }
  return kv;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "seed",       "replicates",     "out",         "n",            "pi",
      "alpha",      "beta",       "gamma",          "alpha_grid",  "beta_grid",    "ratio_grid",
      "n_grid",     "transfer",   "lcc_fraction",   "snapshots",   "snapshot_count", "persistence",
      "sample_nodes", "runs",     "k_grid",         "katz_theta",  "min_separation"};
  return keys;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::RatioSurface:
      c.n = 100000;
      c.alpha_grid = range(0.02, 0.02, 1.0);
      c.ratio_grid = range(0.0, 0.02, 2.0);
      c.replicates = 1;
      break;
    case ExperimentKind::SweepGammaAlpha:
      c.alpha_grid = range(0.010, 0.002, 0.018);
      c.ratio_grid = {0.025, 0.125, 0.4, 1.2};
      break;
    case ExperimentKind::SweepN:
      c.pi = 0.40;
      c.alpha = c.beta = 0.01;
      c.gamma = 0.002;
      c.n_grid = {1000, 1250, 1500, 1750, 2000};
      break;
    case ExperimentKind::ZeroComm:
      c.n = 2000;
      c.alpha = c.beta = 0.02;
      c.gamma = 0;
      break;
    case ExperimentKind::AnalyticAccuracy:
      c.alpha_grid = range(0.40, 0.05, 0.60);
      c.beta_grid = range(0.5, 0.1, 0.9);
      c.ratio_grid = range(0.1, 0.2, 1.9);
      c.replicates = 1;
      break;
    case ExperimentKind::LinkPred:
      c.n = 600;
      c.alpha = c.beta = 0.03;
      c.gamma = 0.003;
      c.replicates = 10;
      break;
  }
  return c;
}

ExperimentConfig build_config(const KeyValues& kv, std::optional<ExperimentKind> forced_kind) {
  Reader r(kv);
  ExperimentKind kind = ExperimentKind::RatioSurface;
  if (const auto* s = r.raw("experiment")) {
    auto parsed = parse_experiment_kind(*s);
    if (!parsed) r.fail("experiment", "unknown experiment '" + *s + "'");
    kind = *parsed;
    if (forced_kind && *forced_kind != kind) {
      const bool sweep_pair = (*forced_kind == ExperimentKind::SweepGammaAlpha && kind == ExperimentKind::SweepN);
      if (!sweep_pair) r.fail("experiment", "'" + *s + "' does not match subcommand " + to_string(*forced_kind));
    }
  } else if (forced_kind) {
    kind = *forced_kind;
  } else {
    throw ConfigError("", 0, "experiment", "missing");
  }

  ExperimentConfig c = default_config(kind);
  if (const auto* s = r.raw("seed")) c.seed = r.integer("seed", *s);
  r.get("replicates", c.replicates);
  r.get("out", c.out);
  r.get("n", c.n);
  r.get("pi", c.pi);
  r.get("alpha", c.alpha);
  r.get("beta", c.beta);
  r.get("gamma", c.gamma);
  r.get("alpha_grid", c.alpha_grid);
  r.get("beta_grid", c.beta_grid);
  r.get("ratio_grid", c.ratio_grid);
  r.get("n_grid", c.n_grid);
  r.get("transfer", c.transfer);
  r.get("lcc_fraction", c.lcc_fraction);
  r.get("snapshots", c.snapshots);
  r.get("snapshot_count", c.snapshot_count);
  r.get("persistence", c.persistence);
  r.get("sample_nodes", c.sample_nodes);
  r.get("runs", c.runs);
  r.get("k_grid", c.k_grid);
  r.get("katz_theta", c.katz_theta);
  r.get("min_separation", c.min_separation);
  validate_with(c, r);
  return c;
}

ModelConfig build_model_config(const KeyValues& kv) {
  Reader r(kv);
  static const std::vector<std::string> allowed = {"n", "pi", "alpha", "beta", "gamma", "seed", "out"};
  for (const auto& [key, entry] : kv.entries) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) r.fail(key, "not a model parameter");
  }
  ModelConfig m;
  r.get("n", m.n);
  r.get("pi", m.pi);
  r.get("alpha", m.alpha);
  r.get("beta", m.beta);
  r.get("gamma", m.gamma);
  if (const auto* s = r.raw("seed")) m.seed = r.integer("seed", *s);
  check(m.n >= 2, r, "n", "must be at least 2");
  check(m.pi > 0 && m.pi < 1, r, "pi", "must lie in (0, 1)");
  check_probability(r, "alpha", m.alpha);
  check_probability(r, "beta", m.beta);
  check_probability(r, "gamma", m.gamma);
  const auto n1 = std::llround(static_cast<double>(m.n) * m.pi);
  check(n1 >= 1 && static_cast<std::size_t>(n1) <= m.n - 1, r, "pi", "leaves an empty class at this n");
  return m;
}

void validate(const ExperimentConfig& cfg) {
  KeyValues none;
  validate_with(cfg, Reader(none));
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  out.precision(12);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

}  // namespace

std::string describe(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(12);
  out << "experiment=" << to_string(c.kind) << "\nseed=" << c.seed << "\nreplicates=" << c.replicates
      << "\nn=" << c.n << "\npi=" << c.pi << "\nalpha=" << c.alpha << "\nbeta=" << c.beta << "\ngamma=" << c.gamma;
  if (!c.alpha_grid.empty()) out << "\nalpha_grid=" << join(c.alpha_grid);
  if (!c.beta_grid.empty()) out << "\nbeta_grid=" << join(c.beta_grid);
  if (!c.ratio_grid.empty()) out << "\nratio_grid=" << join(c.ratio_grid);
  if (!c.n_grid.empty()) out << "\nn_grid=" << join(c.n_grid);
  out << "\ntransfer=" << c.transfer << "\nlcc_fraction=" << c.lcc_fraction;
  if (c.kind == ExperimentKind::LinkPred) {
    if (!c.snapshots.empty()) out << "\nsnapshots=" << c.snapshots;
    out << "\nsnapshot_count=" << c.snapshot_count << "\npersistence=" << c.persistence
        << "\nsample_nodes=" << c.sample_nodes << "\nruns=" << c.runs << "\nkatz_theta=" << c.katz_theta;
    if (!c.k_grid.empty()) out << "\nk_grid=" << join(c.k_grid);
  }
  if (c.min_separation > 0) out << "\nmin_separation=" << c.min_separation;
  out << '\n';
  return out.str();
}

}  // namespace specclust
