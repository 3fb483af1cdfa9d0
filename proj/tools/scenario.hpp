#pragma once

// Scenario loading and the subcommand runners behind wolffcli. A run is a
// pure function of (scenario, seed): it returns the report, the CSV table and
// the timings, and the caller decides where to write them.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"
#include "wolff/wolff.hpp"

namespace wolffcli {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

// ---------------------------------------------------------------- scenario

struct Scenario {
  std::string name;
  std::string source;
  std::filesystem::path base_dir;
  json doc;
  std::optional<std::uint64_t> seed;
  int dimension = 0;
  std::optional<wolff::LatticeWindow> window;
  std::optional<wolff::AtomicMeasure> sigma;
  std::optional<wolff::AtomicMeasure> mu;
  std::optional<wolff::DyadicKernelMap> kernel;
  std::optional<wolff::Exponents> exponents;
  std::vector<wolff::Point> points;

  Node root() const { return Node(doc, "$"); }

  const wolff::RadialKernel* radial() const { return kernel ? kernel->radial_kernel() : nullptr; }

  std::uint64_t require_seed(const std::string& why) const {
    if (!seed) throw ConfigError("$.seed: required because " + why + " uses randomness");
    return *seed;
  }

  template <class T>
  const T& need(const std::optional<T>& field, const char* key, const std::string& command) const {
    if (!field) throw ConfigError(std::string("$.") + key + ": required by '" + command + "'");
    return *field;
  }
};

inline wolff::Point read_point(const Node& n, int dimension) {
  const auto v = n.numbers();
  if (static_cast<int>(v.size()) != dimension) {
    n.fail("expected " + std::to_string(dimension) + " coordinates, got " + std::to_string(v.size()));
  }
  return v;
}

inline std::vector<double> read_vector(const Node& n, int dimension) { return read_point(n, dimension); }

inline std::vector<wolff::Point> read_points_csv(const std::string& path, int dimension) {
  std::istringstream in(read_text(path));
  std::vector<wolff::Point> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string cell;
    wolff::Point p;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.empty() && line_no == 1) continue;  // header row
      throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric point coordinate");
    }
    if (static_cast<int>(p.size()) != dimension) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dimension) + " coordinates");
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::string resolve(const Scenario& s, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (s.base_dir / p).string();
}

inline wolff::LatticeWindow read_window(const Node& n, int dimension) {
  const int coarse = n.integer_or("coarse_level", 0);
  const int fine = n.at("fine_level").integer();
  const auto lo = read_vector(n.at("lo"), dimension);
  const auto hi = read_vector(n.at("hi"), dimension);
  std::vector<double> shift(dimension, 0.0);
  if (n.has("shift")) shift = read_vector(n.at("shift"), dimension);
  try {
    return wolff::LatticeWindow::from_box(coarse, fine, lo, hi, shift);
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
}

inline wolff::AtomicMeasure read_measure(const Node& n, int dimension, const Scenario& s,
                                         std::uint64_t stream) {
  const std::string type = n.at("type").str();
  try {
    if (type == "empty") return wolff::AtomicMeasure(dimension);
    if (type == "atoms") {
      const Node pts = n.at("points");
      const Node wts = n.at("weights");
      if (pts.size() != wts.size()) n.fail("points and weights differ in length");
      wolff::AtomicMeasure m(dimension);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double w = wts[i].number();
        if (!(w >= 0.0) || !std::isfinite(w)) wts[i].fail("weights must be finite and >= 0");
        m.add(read_point(pts[i], dimension), w);
      }
      return m;
    }
    if (type == "lebesgue_grid") {
      return wolff::lebesgue_grid(read_vector(n.at("lo"), dimension), read_vector(n.at("hi"), dimension),
                                  n.at("level").integer());
    }
    if (type == "bernoulli_cascade") {
      return wolff::bernoulli_cascade(dimension, n.at("gamma").number(), n.at("depth").integer());
    }
    if (type == "random_atoms") {
      const int count = n.at("count").integer();
      if (count < 0) n.at("count").fail("expected a nonnegative count");
      std::vector<double> lo, hi;
      if (n.has("lo") || !s.window) {
        lo = read_vector(n.at("lo"), dimension);
        hi = read_vector(n.at("hi"), dimension);
      } else {
        lo = s.window->root_box_lo();
        hi = s.window->root_box_hi();
      }
      const auto range = n.has("log2_weight") ? n.at("log2_weight").numbers() : std::vector<double>{-8.0, 8.0};
      if (range.size() != 2 || !(range[0] <= range[1])) n.at("log2_weight").fail("expected [lo, hi]");
      wolff::Rng rng = wolff::Rng::stream(s.require_seed(n.path()), stream);
      wolff::AtomicMeasure m(dimension);
      std::vector<double> x(dimension);
      for (int a = 0; a < count; ++a) {
        for (int i = 0; i < dimension; ++i) {
          x[i] = rng.uniform(lo[i], hi[i]);
          if (x[i] >= hi[i]) x[i] = lo[i];
        }
        m.add(x, rng.log_uniform2(range[0], range[1]));
      }
      return m;
    }
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  n.at("type").fail("unknown measure type '" + type +
                    "' (expected atoms, lebesgue_grid, bernoulli_cascade, random_atoms or empty)");
}

inline std::optional<double> optional_cutoff(const Node& n) {
  if (!n.has("cutoff")) return std::nullopt;
  return n.at("cutoff").positive();
}

inline wolff::DyadicKernelMap read_kernel(const Node& n, int dimension, const Scenario& s) {
  const std::string type = n.at("type").str();
  const double scale = n.has("scale") ? n.at("scale").positive() : 1.0;
  try {
    if (type == "riesz") {
      return wolff::DyadicKernelMap::radial(
          wolff::RadialKernel::riesz(n.at("alpha").number(), dimension, optional_cutoff(n)), scale);
    }
    if (type == "log_kernel") {
      return wolff::DyadicKernelMap::radial(
          wolff::RadialKernel::log_kernel(n.at("beta").number(), n.at("C").number(), dimension), scale);
    }
    if (type == "constant") {
      return wolff::DyadicKernelMap::radial(
          wolff::RadialKernel::constant(n.at("value").number(), dimension, optional_cutoff(n)), scale);
    }
    if (type == "table") return wolff::DyadicKernelMap::from_csv(resolve(s, n.at("path").str()), dimension);
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  n.at("type").fail("unknown kernel type '" + type + "' (expected riesz, log_kernel, constant or table)");
}

inline wolff::Exponents read_exponents(const Node& n) {
  std::optional<double> q;
  if (n.has("q")) q = n.at("q").number();
  if (n.has("p") == n.has("p_prime")) n.fail("give exactly one of p and p_prime");
  try {
    return n.has("p") ? wolff::Exponents::from_p(n.at("p").number(), q)
                      : wolff::Exponents::from_p_prime(n.at("p_prime").number(), q);
  } catch (const wolff::InvalidArgument& e) {
    (n.has("q") ? n.at("q") : n).fail(e.what());
  }
}

// Parses and validates a scenario document. `seed_override` replaces the
// document's seed; `points_csv` replaces its query points.
inline Scenario load_scenario(const std::string& text, const std::string& source,
                              std::optional<std::uint64_t> seed_override = std::nullopt,
                              const std::string& points_csv = "") {
  Scenario s;
  s.source = source;
  s.base_dir = std::filesystem::path(source).parent_path();
  s.doc = parse_document(text, source);
  const Node r = s.root();
  if (!s.doc.is_object()) r.fail("a scenario must be a JSON object");
  s.name = r.str_or("name", std::filesystem::path(source).stem().string());
  if (r.has("seed")) s.seed = r.at("seed").unsigned_integer();
  if (seed_override) s.seed = seed_override;

  const bool spatial = r.has("window") || r.has("sigma") || r.has("mu") || r.has("kernel");
  if (spatial || r.has("dimension")) {
    s.dimension = r.at("dimension").integer();
    if (s.dimension < 1 || s.dimension > 3) r.at("dimension").fail("dimension must be 1, 2 or 3");
  }
  if (r.has("window")) s.window = read_window(r.at("window"), s.dimension);
  if (r.has("sigma")) s.sigma = read_measure(r.at("sigma"), s.dimension, s, 1);
  if (r.has("mu")) s.mu = read_measure(r.at("mu"), s.dimension, s, 2);
  if (r.has("kernel")) s.kernel = read_kernel(r.at("kernel"), s.dimension, s);
  if (r.has("exponents")) s.exponents = read_exponents(r.at("exponents"));
  if (!points_csv.empty()) {
    s.points = read_points_csv(points_csv, s.dimension);
  } else if (r.has("points_csv")) {
    s.points = read_points_csv(resolve(s, r.at("points_csv").str()), s.dimension);
  } else if (r.has("points")) {
    const Node pts = r.at("points");
    for (std::size_t i = 0; i < pts.size(); ++i) s.points.push_back(read_point(pts[i], s.dimension));
  }
  if (r.has("checks")) {
    const Node checks = r.at("checks");
    if (checks.size() == 0) checks.fail("the check list is empty");
    for (std::size_t i = 0; i < checks.size(); ++i) checks[i].at("type").str();
  }
  return s;
}

inline Scenario load_scenario_file(const std::string& path,
                                   std::optional<std::uint64_t> seed_override = std::nullopt,
                                   const std::string& points_csv = "") {
  return load_scenario(read_text(path), path, seed_override, points_csv);
}

// ---------------------------------------------------------------- reports

struct RunOutput {
  json report;
  std::string csv;
  std::string csv_name;
  json timings;
  bool pass = true;
};

inline std::string csv_cell(double x) { return format_number(x); }

inline json check_to_json(const wolff::CheckReport& c) {
  json values = json::object();
  for (const auto& [k, v] : c.values) values[k] = v;
  return json{{"name", c.name},     {"instance", c.instance},     {"seed", c.seed},
              {"value", c.value},   {"lower_band", c.lower_band}, {"upper_band", c.upper_band},
              {"applicable", c.applicable}, {"pass", c.pass},    {"note", c.note},
              {"values", values}};
}

inline std::string checks_csv(const std::vector<wolff::CheckReport>& checks) {
  std::string out = "check,seed,value,lower_band,upper_band,pass\n";
  for (const auto& c : checks) {
    out += c.name + "," + std::to_string(c.seed) + "," + csv_cell(c.value) + "," + csv_cell(c.lower_band) +
           "," + csv_cell(c.upper_band) + "," + (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

inline json instance_json(const Scenario& s) {
  json inst = json::object();
  if (s.dimension) inst["dimension"] = s.dimension;
  const Node r = s.root();
  if (s.window) {
    inst["window"] = r.at("window").value();
    inst["window"]["cubes"] = s.window->cube_count();
  }
  if (s.kernel) {
    inst["kernel"] = r.at("kernel").value();
    if (const auto* k = s.radial()) inst["kernel"]["describe"] = k->describe();
  }
  auto measure = [&](const char* key, const std::optional<wolff::AtomicMeasure>& m) {
    if (!m) return;
    inst[key] = r.at(key).value();
    inst[key]["atoms"] = m->size();
    double total = 0.0;
    for (std::size_t a = 0; a < m->size(); ++a) total += m->weight(a);
    inst[key]["total_mass"] = total;
  };
  measure("sigma", s.sigma);
  measure("mu", s.mu);
  if (s.exponents) {
    inst["exponents"] = {{"p", s.exponents->p}, {"p_prime", s.exponents->p_prime}};
    if (s.exponents->q) inst["exponents"]["q"] = *s.exponents->q;
  }
  inst["quadrature"] = {{"log_kernel_primitive_rel_tol", wolff::RadialKernel::kPrimitiveTolerance},
                        {"gauss_kronrod_points", 31}};
  return inst;
}

inline std::string instance_tag(const Scenario& s) {
  std::string tag = "scenario=" + s.name;
  if (s.window) tag += " n=" + std::to_string(s.dimension) + " depth=" + std::to_string(s.window->depth());
  if (const auto* k = s.radial()) tag += " kernel=" + k->describe();
  return tag;
}

inline json report_header(const Scenario& s, const std::string& command) {
  json rep = json::object();
  rep["scenario"] = s.name;
  rep["command"] = command;
  rep["seed"] = s.seed ? json(*s.seed) : json(nullptr);
  rep["instance"] = instance_json(s);
  return rep;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- checks

struct CheckContext {
  const Scenario& s;
  Node params;
  std::string type;
  std::uint64_t seed = 0;

  wolff::Band band(wolff::Band fallback = {}) const {
    if (!params.has("band")) return fallback;
    const auto b = params.at("band").numbers();
    if (b.size() != 2 || !(b[0] <= b[1])) params.at("band").fail("expected [lower, upper]");
    return {b[0], b[1]};
  }

  wolff::CheckReport make(const std::string& name) const {
    wolff::CheckReport c;
    c.name = name;
    c.instance = instance_tag(s);
    c.seed = seed;
    return c;
  }

  const wolff::LatticeWindow& window() const { return s.need(s.window, "window", type); }
  const wolff::AtomicMeasure& sigma() const { return s.need(s.sigma, "sigma", type); }
  const wolff::AtomicMeasure& mu() const { return s.need(s.mu, "mu", type); }
  const wolff::DyadicKernelMap& kernel() const { return s.need(s.kernel, "kernel", type); }
  const wolff::Exponents& exponents() const { return s.need(s.exponents, "exponents", type); }
  const wolff::RadialKernel& radial() const {
    kernel();
    if (!s.radial()) throw ConfigError("$.kernel: check '" + type + "' needs a radial kernel");
    return *s.radial();
  }
  const std::vector<wolff::Point>& points() const {
    if (s.points.empty()) throw ConfigError("$.points: check '" + type + "' needs query points");
    return s.points;
  }
  wolff::DyadicPotentials potentials(double p_prime) const {
    return wolff::DyadicPotentials(kernel(), sigma(), mu(), window(), p_prime);
  }
  wolff::DyadicPotentials potentials() const { return potentials(exponents().p_prime); }
  std::vector<double> s_values(std::vector<double> fallback) const {
    return params.has("s") ? params.at("s").numbers() : fallback;
  }
};

inline void set_band(wolff::CheckReport& c, const wolff::Band& b) {
  c.lower_band = b.lower;
  c.upper_band = b.upper;
  c.pass = b.contains(c.value);
}

inline std::vector<wolff::CheckReport> check_fubini(const CheckContext& cx) {
  auto c = cx.make("fubini");
  const auto r = wolff::check_fubini(cx.potentials());
  c.values = {{"energy", r.lhs}, {"fubini_rhs", r.rhs}};
  c.value = r.error;
  c.applicable = r.applicable;
  c.lower_band = 0.0;
  c.upper_band = cx.params.number_or("tolerance", 1e-9);
  c.pass = r.applicable ? r.error <= c.upper_band : true;
  if (!r.applicable) c.note = "infinite energy: identity not applicable";
  return {c};
}

inline std::vector<wolff::CheckReport> check_summation_by_parts(const CheckContext& cx) {
  const auto d = cx.potentials();
  std::vector<wolff::CheckReport> out;
  for (double s : cx.s_values({1.5, 2.0, 3.0})) {
    auto c = cx.make("summation_by_parts[s=" + format_number(s) + "]");
    const auto r = wolff::check_summation_by_parts(d, s);
    c.values = {{"points", double(r.points)}, {"violations", double(r.violations)}};
    c.value = r.worst_ratio;
    c.lower_band = 0.0;
    c.upper_band = 1.0;
    c.pass = r.violations == 0;
    out.push_back(c);
  }
  return out;
}

inline std::vector<double> random_lambda(wolff::Rng& rng, std::size_t size) {
  std::vector<double> lambda(size);
  for (auto& v : lambda) v = rng.uniform() < 0.3 ? 0.0 : rng.log_uniform2(-8.0, 8.0);
  return lambda;
}

inline std::vector<wolff::CheckReport> check_a_chain(const CheckContext& cx) {
  const std::string source = cx.params.str_or("lambda", "wolff");
  std::vector<double> lambda;
  if (source == "wolff") {
    lambda = wolff::wolff_lambda(cx.potentials());
  } else if (source == "random") {
    wolff::Rng rng = wolff::Rng::stream(cx.s.require_seed("check 'a_chain' with random lambda"), 0);
    lambda = random_lambda(rng, cx.window().cube_count());
  } else {
    cx.params.at("lambda").fail("expected 'wolff' or 'random'");
  }
  std::vector<wolff::CheckReport> out;
  for (double s : cx.s_values({1.5, 2.0, 3.0})) {
    auto c = cx.make("a_chain[s=" + format_number(s) + "]");
    const auto r = wolff::check_a_chain(lambda, cx.sigma(), s, cx.window());
    c.values = {{"A1", r.a.a1},         {"A2", r.a.a2},           {"A3", r.a.a3},
                {"A1/A2", r.a1_over_a2}, {"holder", r.holder},     {"A3/A1", r.a3_over_a1},
                {"A1/A3", r.a1_over_a3}};
    c.value = r.a1_over_a2;
    c.lower_band = 0.0;
    c.upper_band = s <= 2.0 ? s : wolff::kNaN;
    c.pass = r.pass;
    c.note = "pass requires A1 <= s A2 for s <= 2 and A2 <= A1^(1/s) A3^(1/s')";
    out.push_back(c);
  }
  return out;
}

inline std::vector<wolff::CheckReport> check_theorem_a(const CheckContext& cx) {
  auto c = cx.make("theorem_a");
  const auto d = cx.potentials();
  const auto ratio = wolff::check_theorem_a(d);
  c.values = {{"energy", d.energy()}, {"wolff_integral", d.wolff_integral()}};
  if (!ratio) {
    c.applicable = false;
    c.pass = true;
    c.note = "energy or Wolff integral is zero or infinite";
    return {c};
  }
  c.value = *ratio;
  set_band(c, cx.band());
  return {c};
}

inline std::vector<wolff::CheckReport> check_trace_q1(const CheckContext& cx) {
  auto c = cx.make("trace_q1");
  const auto probes = static_cast<std::size_t>(cx.params.integer_or("probes", 200));
  const auto r = wolff::trace_constant_q1(cx.potentials(), probes, cx.s.require_seed("check 'trace_q1'"));
  c.values = {{"dual_constant", r.dual_constant}, {"achieved", r.achieved}, {"best_probe", r.best_probe},
              {"probes", double(r.probes)}};
  c.value = r.dual_constant > 0.0 ? r.achieved / r.dual_constant : wolff::kNaN;
  c.lower_band = 1.0 - 1e-8;
  c.upper_band = 1.0 + 1e-8;
  c.applicable = r.energy_finite;
  c.pass = r.pass;
  if (!r.energy_finite) c.note = "infinite energy: trace inequality fails for every constant";
  return {c};
}

inline std::vector<wolff::CheckReport> check_trace_upper(const CheckContext& cx) {
  auto c = cx.make("trace_upper_triangle");
  const auto& e = cx.exponents();
  if (!e.q || !(*e.q > 1.0)) throw ConfigError("$.exponents.q: check 'trace_upper' needs 1 < q < p");
  const auto trials = static_cast<std::size_t>(cx.params.integer_or("trials", 200));
  const auto band = cx.band();
  const auto r = wolff::trace_test_upper_triangle(cx.potentials(), e, trials,
                                                  cx.s.require_seed("check 'trace_upper'"), band);
  c.values = {{"trace_exponent", r.trace_exponent}, {"wolff_norm", r.wolff_norm},
              {"empirical_sup", r.empirical_sup},   {"dlbo", r.dlbo}};
  c.value = r.normalized;
  c.lower_band = band.lower;
  c.upper_band = band.upper;
  c.pass = r.pass;
  c.note = "empirical_sup is a lower estimate of the trace constant";
  return {c};
}

inline std::vector<wolff::CheckReport> check_dlbo(const CheckContext& cx) {
  auto c = cx.make("dlbo");
  c.value = wolff::dlbo_constant(cx.kernel(), cx.sigma(), cx.window());
  c.lower_band = 1.0 - 1e-12;
  c.upper_band = cx.params.number_or("max", 1e3);
  c.pass = std::isfinite(c.value) && c.value >= c.lower_band && c.value <= c.upper_band;
  return {c};
}

inline std::vector<wolff::CheckReport> check_reverse_doubling(const CheckContext& cx) {
  auto c = cx.make("reverse_doubling");
  const double gamma = cx.params.at("gamma").positive();
  const double floor = cx.params.number_or("floor", 1e-3);
  const auto r = wolff::reverse_doubling_check(cx.sigma(), cx.window(), gamma, floor);
  c.values = {{"gamma", gamma}};
  c.value = r.best_constant;
  c.lower_band = floor;
  c.upper_band = wolff::kInf;
  c.pass = r.holds;
  return {c};
}

inline std::vector<wolff::CheckReport> check_dilation(const CheckContext& cx) {
  const auto& e = cx.exponents();
  const double r = e.q && *e.q > 1.0 ? *e.trace_exponent() : 1.0;
  std::vector<wolff::CheckReport> out;
  const auto cs = cx.params.has("c") ? cx.params.at("c").numbers() : std::vector<double>{0.25};
  const auto band = cx.band();
  for (double cval : cs) {
    auto c = cx.make("kernel_dilation[c=" + format_number(cval) + "]");
    const auto d = wolff::check_kernel_dilation(cx.radial(), cx.sigma(), cx.mu(), e.p_prime, cx.window(), cval, r);
    c.values = {{"sum_ratio", d.sum_ratio}, {"norm_ratio", d.norm_ratio}, {"r", d.r}};
    c.value = d.sum_ratio;
    set_band(c, band);
    c.pass = c.pass && band.contains(d.norm_ratio);
    out.push_back(c);
  }
  return out;
}

inline std::vector<wolff::CheckReport> check_bar_lemmas(const CheckContext& cx) {
  const auto radii = cx.params.has("radii") ? cx.params.at("radii").numbers()
                                            : std::vector<double>{1.0 / 64, 1.0 / 16, 0.25, 1.0};
  const auto b = wolff::check_bar_lemmas(cx.radial(), cx.sigma(), cx.window(), cx.points(), radii);
  const auto band = cx.band();
  std::vector<wolff::CheckReport> out;
  auto add = [&](const std::string& name, const wolff::TwoSided& t) {
    auto c = cx.make("bar_lemmas." + name);
    c.values = {{"min", t.min}, {"max", t.max}, {"samples", double(t.samples)}};
    c.value = t.max;
    c.lower_band = band.lower;
    c.upper_band = band.upper;
    c.applicable = t.samples > 0;
    c.pass = t.samples == 0 || (band.contains(t.min) && band.contains(t.max));
    out.push_back(c);
  };
  add("reformulation", b.reformulation);
  add("relationship", b.relationship);
  add("doubling", b.doubling);
  return out;
}

inline std::vector<wolff::CheckReport> check_dyadic_vs_continuous(const CheckContext& cx) {
  auto c = cx.make("dyadic_vs_continuous");
  const auto t = wolff::check_dyadic_vs_continuous(cx.radial(), cx.sigma(), cx.mu(), cx.exponents().p_prime,
                                                   cx.window(), cx.points());
  c.values = {{"min", t.min}, {"max", t.max}, {"samples", double(t.samples)}};
  c.value = t.max;
  const auto band = cx.band();
  c.lower_band = 0.0;
  c.upper_band = band.upper;
  c.applicable = t.samples > 0;
  c.pass = t.samples == 0 || (std::isfinite(t.max) && t.max <= band.upper);
  return {c};
}

inline std::vector<wolff::CheckReport> check_shifted_average(const CheckContext& cx) {
  const int j = cx.params.integer_or("j", 0);
  const auto shifts = static_cast<std::size_t>(cx.params.integer_or("shifts", 10000));
  const double bound = cx.params.number_or("bound", 1e3);
  const auto r = wolff::shifted_average_check(cx.radial(), cx.mu(), j, shifts, cx.points(),
                                              cx.s.require_seed("check 'shifted_average'"), bound);
  auto c = cx.make("shifted_average[j=" + std::to_string(j) + "]");
  c.values = {{"j0", double(r.j0)}, {"shifts", double(r.shifts)}};
  for (std::size_t i = 0; i < r.lhs.size(); ++i) {
    const std::string k = "x" + std::to_string(i);
    c.values.emplace_back(k + ".lhs", r.lhs[i]);
    c.values.emplace_back(k + ".estimate", r.estimate[i]);
    c.values.emplace_back(k + ".std_error", r.std_error[i]);
  }
  c.value = r.max_ratio;
  c.lower_band = 0.0;
  c.upper_band = bound;
  c.pass = r.pass;
  if (r.vacuous) c.note = "vacuous: the left side vanishes at every sample";
  return {c};
}

inline std::vector<wolff::CheckReport> check_truncation(const CheckContext& cx) {
  const std::string quantity = cx.params.str_or("quantity", "energy");
  const auto depths = cx.params.at("depths").integers();
  const double tol = cx.params.number_or("tolerance", 0.05);
  const auto& w = cx.window();
  const auto lo = w.root_box_lo();
  const auto hi = w.root_box_hi();
  auto eval = [&](int depth) {
    const auto wd = wolff::LatticeWindow::from_box(w.coarse_level(), w.coarse_level() + depth, lo, hi, w.shift());
    const wolff::DyadicPotentials d(cx.kernel(), cx.sigma(), cx.mu(), wd, cx.exponents().p_prime);
    if (quantity == "energy") return d.energy();
    if (quantity == "wolff_integral") return d.wolff_integral();
    cx.params.at("quantity").fail("expected energy or wolff_integral");
  };
  wolff::SweepResult r;
  try {
    r = wolff::truncation_sweep(depths, eval, tol);
  } catch (const wolff::InvalidArgument& e) {
    cx.params.at("depths").fail(e.what());
  }
  auto c = cx.make("truncation." + quantity);
  for (const auto& row : r.rows) c.values.emplace_back("depth" + std::to_string(row.depth), row.value);
  c.value = r.rows.size() > 1 ? r.rows.back().rel_change : 0.0;
  c.lower_band = 0.0;
  c.upper_band = tol;
  c.pass = r.converged;
  return {c};
}

// The seeded random-instance suite: identities and explicit constants.
inline std::vector<wolff::CheckReport> check_random_suite(const CheckContext& cx) {
  const std::uint64_t seed = cx.s.require_seed("check 'random_suite'");
  const auto trials = static_cast<std::size_t>(cx.params.integer_or("trials", 100));
  const auto pps = cx.params.has("p_prime") ? cx.params.at("p_prime").numbers() : std::vector<double>{1.5, 2.0, 3.0};
  const auto ss = cx.s_values({1.5, 2.0, 3.0});
  const auto probes = static_cast<std::size_t>(cx.params.integer_or("probes", 200));
  const auto band = cx.band();
  struct Row {
    double fubini = 0.0;
    std::size_t sbp_violations = 0;
    double a1_s_a2 = 0.0;
    double holder = 0.0;
    double thm_min = wolff::kInf;
    double thm_max = 0.0;
    double q1_rel = 0.0;
    double q1_probe = 0.0;
  };
  std::vector<Row> rows(trials);
  wolff::parallel_for(trials, [&](std::size_t t) {
    const auto inst = wolff::random_instance(seed, t);
    Row& row = rows[t];
    for (double pp : pps) {
      const wolff::DyadicPotentials d(inst.kernel, inst.sigma, inst.mu, inst.window, pp);
      row.fubini = std::max(row.fubini, wolff::check_fubini(d).error);
      if (const auto ratio = wolff::check_theorem_a(d)) {
        row.thm_min = std::min(row.thm_min, *ratio);
        row.thm_max = std::max(row.thm_max, *ratio);
      }
      const auto q1 = wolff::trace_constant_q1(d, probes, seed ^ (t * 1315423911u));
      if (q1.dual_constant > 0.0) {
        row.q1_rel = std::max(row.q1_rel, wolff::rel_diff(q1.achieved, q1.dual_constant));
        row.q1_probe = std::max(row.q1_probe, q1.best_probe / q1.dual_constant);
      }
      for (double s : ss) row.sbp_violations += wolff::check_summation_by_parts(d, s).violations;
    }
    wolff::Rng rng = wolff::Rng::stream(seed ^ 0xa5a5a5a5u, t);
    const auto lambda = random_lambda(rng, inst.window.cube_count());
    for (double s : ss) {
      try {
        const auto r = wolff::check_a_chain(lambda, inst.sigma, s, inst.window);
        if (s <= 2.0) row.a1_s_a2 = std::max(row.a1_s_a2, r.a1_over_a2 / s);
        row.holder = std::max(row.holder, r.holder);
      } catch (const wolff::DegenerateInputError&) {
      }
    }
  });
  Row worst;
  for (const auto& r : rows) {
    worst.fubini = std::max(worst.fubini, r.fubini);
    worst.sbp_violations += r.sbp_violations;
    worst.a1_s_a2 = std::max(worst.a1_s_a2, r.a1_s_a2);
    worst.holder = std::max(worst.holder, r.holder);
    worst.thm_min = std::min(worst.thm_min, r.thm_min);
    worst.thm_max = std::max(worst.thm_max, r.thm_max);
    worst.q1_rel = std::max(worst.q1_rel, r.q1_rel);
    worst.q1_probe = std::max(worst.q1_probe, r.q1_probe);
  }
  const std::string tag = "random_suite trials=" + std::to_string(trials);
  std::vector<wolff::CheckReport> out;
  auto add = [&](const std::string& name, double value, double lo, double hi, bool pass) {
    auto c = cx.make("random_suite." + name);
    c.instance = tag;
    c.value = value;
    c.lower_band = lo;
    c.upper_band = hi;
    c.pass = pass;
    out.push_back(c);
  };
  add("fubini_max_rel_error", worst.fubini, 0.0, 1e-9, worst.fubini <= 1e-9);
  add("summation_by_parts_violations", double(worst.sbp_violations), 0.0, 0.0, worst.sbp_violations == 0);
  add("a1_over_s_a2_max", worst.a1_s_a2, 0.0, 1.0, worst.a1_s_a2 <= 1.0 + 1e-12);
  add("holder_max", worst.holder, 0.0, 1.0 + 1e-12, worst.holder <= 1.0 + 1e-12);
  add("theorem_a_min", worst.thm_min, band.lower, band.upper, band.contains(worst.thm_min));
  add("theorem_a_max", worst.thm_max, band.lower, band.upper, band.contains(worst.thm_max));
  add("trace_q1_rel_error", worst.q1_rel, 0.0, 1e-8, worst.q1_rel <= 1e-8);
  add("trace_q1_probe_ratio", worst.q1_probe, 0.0, 1.0 + 1e-10, worst.q1_probe <= 1.0 + 1e-10);
  return out;
}

using CheckFn = std::vector<wolff::CheckReport> (*)(const CheckContext&);

inline CheckFn find_check(const std::string& type) {
  static const std::vector<std::pair<std::string, CheckFn>> table{
      {"fubini", check_fubini},
      {"summation_by_parts", check_summation_by_parts},
      {"a_chain", check_a_chain},
      {"theorem_a", check_theorem_a},
      {"trace_q1", check_trace_q1},
      {"trace_upper", check_trace_upper},
      {"dlbo", check_dlbo},
      {"reverse_doubling", check_reverse_doubling},
      {"dilation", check_dilation},
      {"bar_lemmas", check_bar_lemmas},
      {"dyadic_vs_continuous", check_dyadic_vs_continuous},
      {"shifted_average", check_shifted_average},
      {"truncation", check_truncation},
      {"random_suite", check_random_suite},
  };
  for (const auto& [name, fn] : table) {
    if (name == type) return fn;
  }
  return nullptr;
}

// Runs a list of check nodes; `expect: "fail"` turns a check into an
// expected-failure check that passes iff the underlying check fails.
inline RunOutput run_checks(const Scenario& s, const std::string& command, const Node& list) {
  RunOutput out;
  out.report = report_header(s, command);
  out.timings = {{"command", command}, {"checks", json::array()}};
  Stopwatch total;
  std::vector<wolff::CheckReport> all;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node node = list[i];
    const std::string type = node.at("type").str();
    const CheckFn fn = find_check(type);
    if (!fn) node.at("type").fail("unknown check type '" + type + "'");
    const std::string expect = node.str_or("expect", "pass");
    if (expect != "pass" && expect != "fail") node.at("expect").fail("expected 'pass' or 'fail'");
    CheckContext cx{s, node, type, s.seed.value_or(0)};
    Stopwatch sw;
    auto reports = fn(cx);
    for (auto& c : reports) {
      if (expect == "fail") {
        c.note = std::string(c.pass ? "expected failure did not occur" : "expected failure observed") +
                 (c.note.empty() ? "" : "; " + c.note);
        c.pass = !c.pass;
      }
      all.push_back(std::move(c));
    }
    out.timings["checks"].push_back({{"type", type}, {"seconds", sw.seconds()}});
  }
  json checks = json::array();
  for (const auto& c : all) {
    checks.push_back(check_to_json(c));
    out.pass = out.pass && c.pass;
  }
  out.report["checks"] = checks;
  out.report["pass"] = out.pass;
  out.csv = checks_csv(all);
  out.csv_name = "checks.csv";
  out.timings["total_seconds"] = total.seconds();
  return out;
}

// ---------------------------------------------------------------- commands

inline std::string point_cells(const wolff::Point& x) {
  std::string s;
  for (double v : x) s += csv_cell(v) + ",";
  return s;
}

inline std::string point_header(int dimension) {
  std::string s;
  for (int i = 0; i < dimension; ++i) s += "x" + std::to_string(i + 1) + ",";
  return s;
}

inline const std::vector<wolff::Point>& require_points(const Scenario& s, const std::string& command) {
  if (s.points.empty()) {
    throw ConfigError("$.points: '" + command + "' needs query points (points, points_csv or --points)");
  }
  return s.points;
}

inline RunOutput run_potential(const Scenario& s) {
  const std::string cmd = "potential";
  Stopwatch sw;
  const auto& pts = require_points(s, cmd);
  const auto& e = s.need(s.exponents, "exponents", cmd);
  const wolff::DyadicPotentials d(s.need(s.kernel, "kernel", cmd), s.need(s.sigma, "sigma", cmd),
                                  s.need(s.mu, "mu", cmd), s.need(s.window, "window", cmd), e.p_prime);
  const auto* k = s.radial();
  RunOutput out;
  out.report = report_header(s, cmd);
  out.csv = point_header(s.dimension) + "t_dyadic,wolff_dyadic,wolff_bar_dyadic" +
            (k ? ",t_continuous,wolff_continuous" : "") + "\n";
  json rows = json::array();
  for (const auto& x : pts) {
    json row = {{"point", x}};
    if (!s.window->leaf_id(x)) {
      throw wolff::OutOfWindowError("query point " + point_cells(x) + " lies outside the window");
    }
    row["t_dyadic"] = d.t(x);
    row["wolff_dyadic"] = d.wolff(x);
    row["wolff_bar_dyadic"] = d.wolff_bar(x);
    if (k) {
      row["t_continuous"] = wolff::t_continuous_trunc(*k, *s.mu, wolff::kInf, x);
      row["wolff_continuous"] = wolff::wolff_continuous(*k, *s.sigma, *s.mu, e.p_prime, x);
    }
    std::string line = point_cells(x);
    bool first = true;
    for (auto it = row.begin(); it != row.end(); ++it) {
      if (it.key() == "point") continue;
      line += (first ? "" : ",") + csv_cell(it.value().get<double>());
      first = false;
    }
    out.csv += line + "\n";
    rows.push_back(row);
  }
  out.report["results"] = rows;
  out.report["pass"] = true;
  out.csv_name = "potential.csv";
  out.timings = {{"command", cmd}, {"total_seconds", sw.seconds()}};
  return out;
}

inline RunOutput run_energy(const Scenario& s) {
  const std::string cmd = "energy";
  Stopwatch sw;
  const auto& e = s.need(s.exponents, "exponents", cmd);
  const auto& mu = s.need(s.mu, "mu", cmd);
  const wolff::DyadicPotentials d(s.need(s.kernel, "kernel", cmd), s.need(s.sigma, "sigma", cmd), mu,
                                  s.need(s.window, "window", cmd), e.p_prime);
  RunOutput out;
  out.report = report_header(s, cmd);
  const auto wv = d.wolff_at_mu();
  const auto wb = d.wolff_bar_at_mu();
  double wbar_integral = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) wbar_integral += wolff::mul0(mu.weight(a), wb[a]);
  json res = {{"energy_dyadic", d.energy()},
              {"fubini_rhs", d.fubini_rhs()},
              {"wolff_integral", d.wolff_integral()},
              {"wolff_bar_integral", wbar_integral},
              {"maximal_energy", d.maximal_energy()}};
  if (const auto* k = s.radial()) res["energy_continuous"] = wolff::energy_continuous(*k, mu, *s.sigma, e.p_prime);
  out.report["results"] = res;
  out.report["pass"] = true;
  out.csv = point_header(s.dimension) + "weight,wolff_dyadic,wolff_bar_dyadic\n";
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const auto p = mu.position(a);
    out.csv += point_cells(wolff::Point(p.begin(), p.end())) + csv_cell(mu.weight(a)) + "," + csv_cell(wv[a]) +
               "," + csv_cell(wb[a]) + "\n";
  }
  out.csv_name = "energy.csv";
  out.timings = {{"command", cmd}, {"total_seconds", sw.seconds()}};
  return out;
}

inline RunOutput run_maximal(const Scenario& s) {
  const std::string cmd = "maximal";
  Stopwatch sw;
  const auto& pts = require_points(s, cmd);
  const wolff::DyadicPotentials d(s.need(s.kernel, "kernel", cmd), s.need(s.sigma, "sigma", cmd),
                                  s.need(s.mu, "mu", cmd), s.need(s.window, "window", cmd),
                                  s.exponents ? s.exponents->p_prime : 2.0);
  const auto* k = s.radial();
  RunOutput out;
  out.report = report_header(s, cmd);
  out.csv = point_header(s.dimension) + "maximal_dyadic,hl_maximal_dyadic" + (k ? ",m_k_maximal" : "") + "\n";
  json rows = json::array();
  for (const auto& x : pts) {
    if (!s.window->leaf_id(x)) {
      throw wolff::OutOfWindowError("query point " + point_cells(x) + " lies outside the window");
    }
    json row = {{"point", x},
                {"maximal_dyadic", d.maximal(x)},
                {"hl_maximal_dyadic", wolff::hl_maximal_dyadic(*s.sigma, *s.mu, *s.window, x)}};
    std::string line = point_cells(x) + csv_cell(row["maximal_dyadic"].get<double>()) + "," +
                       csv_cell(row["hl_maximal_dyadic"].get<double>());
    if (k) {
      const double m = wolff::m_k_maximal(*k, *s.sigma, *s.mu, x);
      row["m_k_maximal"] = m;
      line += "," + csv_cell(m);
    }
    out.csv += line + "\n";
    rows.push_back(row);
  }
  out.report["results"] = rows;
  out.report["pass"] = true;
  out.csv_name = "maximal.csv";
  out.timings = {{"command", cmd}, {"total_seconds", sw.seconds()}};
  return out;
}

inline RunOutput run_verify(const Scenario& s) {
  const Node r = s.root();
  if (!r.has("checks")) throw ConfigError("$.checks: 'verify' needs a non-empty check list");
  return run_checks(s, "verify", r.at("checks"));
}

inline RunOutput run_trace(const Scenario& s) {
  const Node r = s.root();
  json list = json::array();
  const json params = r.has("trace") ? r.at("trace").value() : json::object();
  json q1 = params;
  q1["type"] = "trace_q1";
  list.push_back(q1);
  if (s.exponents && s.exponents->q && *s.exponents->q > 1.0) {
    json up = params;
    up["type"] = "trace_upper";
    list.push_back(up);
  }
  return run_checks(s, "trace", Node(list, "$.trace"));
}

// Series increments, the field-level depth sweep and the W <= Wbar dominance.
inline RunOutput run_counterexample(const Scenario& s) {
  const std::string cmd = "counterexample";
  Stopwatch sw;
  const Node n = s.root().at("counterexample");
  const double beta = n.number_or("beta", 1.5);
  const double c = n.has("C") ? n.at("C").positive() : std::exp(beta);
  const long long from = n.integer_or("series_from", 1000);
  const long long to = n.integer_or("series_to", 1000000);
  if (!(0 < from && from < to)) n.fail("need 0 < series_from < series_to");
  const double wbar_min = n.number_or("wbar_increment_min", 9.0);
  const double energy_max = n.number_or("energy_increment_max", 0.2);
  const auto depths = n.has("depths") ? n.at("depths").integers() : std::vector<int>{6, 10, 14};
  const double change_max = n.number_or("energy_change_max", 0.05);

  wolff::SeriesPair lo, hi;
  wolff::CounterexampleSweep sweep;
  try {
    lo = wolff::counterexample_series(beta, c, 1, from);
    hi = wolff::counterexample_series(beta, c, 1, to);
    sweep = wolff::counterexample_sweep(beta, c, depths, change_max);
  } catch (const wolff::InvalidArgument& e) {
    n.fail(e.what());
  }

  std::vector<wolff::CheckReport> all;
  const std::string tag = "counterexample beta=" + format_number(beta) + " C=" + format_number(c);
  auto make = [&](const std::string& name) {
    wolff::CheckReport r;
    r.name = name;
    r.instance = tag;
    r.seed = s.seed.value_or(0);
    return r;
  };
  auto wb = make("series.wbar_increment");
  wb.values = {{"S_wbar_from", lo.s_wbar}, {"S_wbar_to", hi.s_wbar}};
  wb.value = hi.s_wbar - lo.s_wbar;
  wb.lower_band = wbar_min;
  wb.upper_band = wolff::kInf;
  wb.pass = wb.value >= wbar_min;
  wb.note = "expected divergence of the Wbar series";
  all.push_back(wb);

  auto se = make("series.energy_increment");
  se.values = {{"S_E_from", lo.s_e}, {"S_E_to", hi.s_e}};
  se.value = hi.s_e - lo.s_e;
  se.lower_band = 0.0;
  se.upper_band = energy_max;
  se.pass = se.value <= energy_max;
  se.note = "expected convergence of the energy series";
  all.push_back(se);

  auto ec = make("sweep.energy_last_change");
  for (const auto& row : sweep.rows) {
    ec.values.emplace_back("E_depth" + std::to_string(row.depth), row.energy);
  }
  ec.value = sweep.energy_last_change;
  ec.lower_band = 0.0;
  ec.upper_band = change_max;
  ec.pass = sweep.energy_stable;
  all.push_back(ec);

  auto wi = make("sweep.wbar_interior_increasing");
  for (const auto& row : sweep.rows) {
    wi.values.emplace_back("min_wbar_depth" + std::to_string(row.depth), row.min_interior_wbar);
  }
  wi.value = sweep.rows.back().min_interior_wbar - sweep.rows.front().min_interior_wbar;
  wi.lower_band = 0.0;
  wi.upper_band = wolff::kInf;
  wi.pass = sweep.wbar_increasing && sweep.wbar_dominates_series;
  wi.note = "strictly increasing, with increments at least those of the Wbar series";
  all.push_back(wi);

  auto dom = make("sweep.wolff_below_wbar");
  std::size_t violations = 0;
  for (const auto& row : sweep.rows) violations += row.dominance_violations;
  dom.value = double(violations);
  dom.lower_band = 0.0;
  dom.upper_band = 0.0;
  dom.pass = sweep.dominance_holds;
  all.push_back(dom);

  RunOutput out;
  out.report = report_header(s, cmd);
  out.report["parameters"] = {{"beta", beta},
                              {"C", c},
                              {"series_from", from},
                              {"series_to", to},
                              {"depths", depths},
                              {"energy_change_max", change_max}};
  json checks = json::array();
  for (const auto& r : all) {
    checks.push_back(check_to_json(r));
    out.pass = out.pass && r.pass;
  }
  out.report["checks"] = checks;
  out.report["pass"] = out.pass;
  out.csv = checks_csv(all);
  out.csv_name = "checks.csv";
  out.timings = {{"command", cmd}, {"total_seconds", sw.seconds()}};
  return out;
}

inline RunOutput run_command(const std::string& command, const Scenario& s) {
  if (command == "potential") return run_potential(s);
  if (command == "energy") return run_energy(s);
  if (command == "maximal") return run_maximal(s);
  if (command == "verify") return run_verify(s);
  if (command == "trace") return run_trace(s);
  if (command == "counterexample") return run_counterexample(s);
  throw ConfigError("unknown command '" + command + "'");
}

// Writes report.json, the CSV table and timings.json into `dir`.
inline void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  write_text((dir / "report.json").string(), serialize(out.report));
  write_text((dir / out.csv_name).string(), out.csv);
  write_text((dir / "timings.json").string(), serialize(out.timings));
}

}  // namespace wolffcli
