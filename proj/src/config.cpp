#include "boxheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "boxheat/error.hpp"

namespace boxheat {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInfNorm;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: expected a number, got '{}'", field, text));
  }
  return v;
}

long long to_integer(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ValidationError(fmt::format("{}: expected an integer, got '{}'", field, text));
  }
  return v;
}

int to_int(std::string_view field, std::string_view text) {
  const long long v = to_integer(field, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ValidationError(fmt::format("{}: integer out of range: {}", field, text));
  }
  return static_cast<int>(v);
}

std::vector<double> to_list(std::string_view field, std::string_view text) {
  std::vector<double> out;
  for (const std::string& p : split(text, ',')) out.push_back(to_double(field, p));
  return out;
}

std::string number(double v) { return std::isinf(v) ? std::string("inf") : fmt::format("{}", v); }

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + number(v[i]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define BOXHEAT_DOUBLE(sec, k, member)                                                                  \
  Field {                                                                                               \
    sec, k, [](ExperimentConfig& c, std::string_view f, std::string_view v) { c.member = to_double(f, v); }, \
        [](const ExperimentConfig& c) { return number(c.member); }                                      \
  }
#define BOXHEAT_INT(sec, k, member)                                                                  \
  Field {                                                                                            \
    sec, k, [](ExperimentConfig& c, std::string_view f, std::string_view v) { c.member = to_int(f, v); }, \
        [](const ExperimentConfig& c) { return fmt::format("{}", c.member); }                        \
  }
#define BOXHEAT_STRING(sec, k, member)                                                                \
  Field {                                                                                             \
    sec, k, [](ExperimentConfig& c, std::string_view, std::string_view v) { c.member = trim(v); }, \
        [](const ExperimentConfig& c) { return c.member; }                                            \
  }
#define BOXHEAT_LIST(sec, k, member)                                                                   \
  Field {                                                                                              \
    sec, k, [](ExperimentConfig& c, std::string_view f, std::string_view v) { c.member = to_list(f, v); }, \
        [](const ExperimentConfig& c) { return list(c.member); }                                       \
  }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      BOXHEAT_STRING("weight", "name", weight_name),
      BOXHEAT_STRING("weight", "coeffs", weight_coeffs),
      BOXHEAT_DOUBLE("weight", "delta_extent", delta_extent),
      BOXHEAT_INT("weight", "delta_resolution", delta_resolution),
      BOXHEAT_INT("weight", "delta_refine", delta_refine),

      BOXHEAT_DOUBLE("grid", "extent", extent),
      BOXHEAT_INT("grid", "points", points),

      Field{"stepper", "scheme",
            [](ExperimentConfig& c, std::string_view, std::string_view v) { c.stepper.scheme = parse_scheme(trim(v)); },
            [](const ExperimentConfig& c) { return std::string(to_string(c.stepper.scheme)); }},
      BOXHEAT_DOUBLE("stepper", "dt", stepper.dt),
      BOXHEAT_DOUBLE("stepper", "tolerance", stepper.tolerance),
      BOXHEAT_INT("stepper", "max_iterations", stepper.max_iterations),

      Field{"nonlinearity", "kind",
            [](ExperimentConfig& c, std::string_view f, std::string_view v) {
              const std::string s = trim(v);
              if (s == "power") {
                c.nonlinearity.kind = Nonlinearity::Kind::power;
              } else if (s == "none") {
                c.nonlinearity.kind = Nonlinearity::Kind::none;
              } else {
                throw ValidationError(fmt::format("{}: expected power | none, got '{}'", f, s));
              }
            },
            [](const ExperimentConfig& c) {
              return std::string(c.nonlinearity.kind == Nonlinearity::Kind::power ? "power" : "none");
            }},
      Field{"nonlinearity", "m",
            [](ExperimentConfig& c, std::string_view f, std::string_view v) {
              c.nonlinearity.m = to_double(f, v);
              c.nonlinearity.lipschitz = c.nonlinearity.m;
            },
            [](const ExperimentConfig& c) { return number(c.nonlinearity.m); }},

      BOXHEAT_DOUBLE("initial", "amplitude", amplitude),
      BOXHEAT_DOUBLE("initial", "width", width),
      BOXHEAT_DOUBLE("initial", "center_x", center_x),
      BOXHEAT_DOUBLE("initial", "center_y", center_y),
      BOXHEAT_DOUBLE("initial", "perturbation", perturbation),

      BOXHEAT_DOUBLE("stability", "q", q),
      BOXHEAT_DOUBLE("stability", "n", n),
      BOXHEAT_STRING("stability", "model", model),
      BOXHEAT_DOUBLE("stability", "window_start", window_start),
      BOXHEAT_DOUBLE("stability", "window_end", window_end),
      Field{"stability", "solver",
            [](ExperimentConfig& c, std::string_view f, std::string_view v) {
              const std::string s = trim(v);
              if (s == "imex") {
                c.solver = PairSolver::imex;
              } else if (s == "picard") {
                c.solver = PairSolver::picard;
              } else {
                throw ValidationError(fmt::format("{}: expected imex | picard, got '{}'", f, s));
              }
            },
            [](const ExperimentConfig& c) { return std::string(c.solver == PairSolver::imex ? "imex" : "picard"); }},

      BOXHEAT_STRING("schedule", "kind", schedule.kind),
      BOXHEAT_DOUBLE("schedule", "spacing", schedule.spacing),
      BOXHEAT_DOUBLE("schedule", "t_final", schedule.t_final),
      BOXHEAT_DOUBLE("schedule", "t_min", schedule.t_min),
      BOXHEAT_INT("schedule", "count", schedule.count),
      BOXHEAT_LIST("schedule", "times", schedule.times),

      BOXHEAT_DOUBLE("kernel", "source_x", source_x),
      BOXHEAT_DOUBLE("kernel", "source_y", source_y),
      BOXHEAT_LIST("kernel", "times", kernel_times),
      BOXHEAT_DOUBLE("kernel", "slack", slack),

      BOXHEAT_DOUBLE("picard", "tol", picard.tol),
      BOXHEAT_INT("picard", "max_iter", picard.max_iter),
      BOXHEAT_DOUBLE("picard", "q", picard.q),
      BOXHEAT_DOUBLE("picard", "ds", picard_ds),
      BOXHEAT_DOUBLE("picard", "t_final", picard_t_final),

      BOXHEAT_DOUBLE("lplq", "p", lp_p),
      BOXHEAT_DOUBLE("lplq", "q", lp_q),
      BOXHEAT_LIST("lplq", "probe_widths", probe_widths),
      BOXHEAT_INT("lplq", "random_probes", random_probes),
      BOXHEAT_DOUBLE("lplq", "window_start", lp_window_start),
      BOXHEAT_DOUBLE("lplq", "window_end", lp_window_end),
      BOXHEAT_STRING("lplq", "model", lp_model),

      Field{"beta", "pairs",
            [](ExperimentConfig& c, std::string_view f, std::string_view v) {
              c.beta_pairs.clear();
              for (const std::string& p : split(v, ',')) {
                const std::vector<std::string> kl = split(p, ':');
                if (kl.size() != 2) throw ValidationError(fmt::format("{}: expected k:l pairs, got '{}'", f, p));
                c.beta_pairs.emplace_back(to_double(f, kl[0]), to_double(f, kl[1]));
              }
            },
            [](const ExperimentConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.beta_pairs.size(); ++i) {
                s += (i ? ", " : "") + number(c.beta_pairs[i].first) + ":" + number(c.beta_pairs[i].second);
              }
              return s;
            }},
      BOXHEAT_LIST("beta", "times", beta_times),

      BOXHEAT_INT("audit", "trials", trials),

      BOXHEAT_STRING("run", "out", out),
      Field{"run", "seed",
            [](ExperimentConfig& c, std::string_view f, std::string_view v) {
              const long long s = to_integer(f, v);
              if (s < 0) throw ValidationError(fmt::format("{}: seed must be >= 0", f));
              c.seed = static_cast<std::uint64_t>(s);
            },
            [](const ExperimentConfig& c) { return fmt::format("{}", c.seed); }},
      BOXHEAT_INT("run", "jobs", jobs),
  };
  return fields;
}

#undef BOXHEAT_DOUBLE
#undef BOXHEAT_INT
#undef BOXHEAT_STRING
#undef BOXHEAT_LIST

const Field& lookup(std::string_view section, std::string_view key) {
  for (const Field& f : schema()) {
    if (section == f.section && key == f.key) return f;
  }
  throw ValidationError(fmt::format("{}.{}: unknown configuration key", section, key));
}

void apply(ExperimentConfig& c, std::string_view section, std::string_view key, std::string_view value) {
  lookup(section, key).set(c, fmt::format("{}.{}", section, key), value);
}

void apply_ini(ExperimentConfig& c, std::string_view ini, std::string_view origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(ini)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ValidationError(fmt::format("{}: key '{}' outside any section", origin, section));
    }
    for (const auto& [key, value] : body) apply(c, section, key, value.data());
  }
}

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ValidationError(fmt::format("{}: {}", field, what));
}

}  // namespace

std::vector<double> ScheduleConfig::build() const {
  std::vector<double> out;
  if (kind == "uniform") {
    require(spacing > 0.0, "schedule.spacing", "must be > 0");
    require(t_final >= spacing, "schedule.t_final", "must be >= spacing");
    out = uniform_schedule(spacing, t_final);
  } else if (kind == "geometric") {
    require(t_min > 0.0, "schedule.t_min", "must be > 0");
    require(count >= 1, "schedule.count", "must be >= 1");
    out = geometric_schedule(t_min, count);
  } else if (kind == "list") {
    require(!times.empty(), "schedule.times", "must be non-empty for kind = list");
    out = times;
    for (std::size_t i = 0; i < out.size(); ++i) {
      require(out[i] > 0.0 && (i == 0 || out[i] > out[i - 1]), "schedule.times", "must be positive and increasing");
    }
  } else {
    throw ValidationError(fmt::format("schedule.kind: expected uniform | geometric | list, got '{}'", kind));
  }
  return out;
}

void ExperimentConfig::validate() const {
  try {
    (void)weight();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("weight: {}", e.what()));
  }
  require(delta_extent > 0.0, "weight.delta_extent", "must be > 0");
  require(delta_resolution >= 2, "weight.delta_resolution", "must be >= 2");
  require(delta_refine >= 0, "weight.delta_refine", "must be >= 0");
  require(extent > 0.0, "grid.extent", "must be > 0");
  require(points >= 3, "grid.points", "must be >= 3");
  try {
    stepper.validate();
    nonlinearity.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}", e.what()));
  }
  require(width > 0.0, "initial.width", "must be > 0");
  require(perturbation > -1.0, "initial.perturbation", "must be > -1");
  require(q >= 1.0, "stability.q", "must be >= 1");
  require(n >= 1.0, "stability.n", "must be >= 1");
  require(model == "auto" || model == "power_law" || model == "exponential", "stability.model",
          "expected auto | power_law | exponential");
  require(window_start >= 0.0, "stability.window_start", "must be >= 0");
  require(window_end >= 0.0, "stability.window_end", "must be >= 0");
  (void)schedule.build();
  require(!kernel_times.empty(), "kernel.times", "must be non-empty");
  for (double t : kernel_times) require(t > 0.0, "kernel.times", "must be positive");
  require(slack >= 0.0, "kernel.slack", "must be >= 0");
  require(picard.tol > 0.0, "picard.tol", "must be > 0");
  require(picard.max_iter >= 1, "picard.max_iter", "must be >= 1");
  require(picard.q >= 1.0, "picard.q", "must be >= 1");
  require(picard_ds > 0.0, "picard.ds", "must be > 0");
  require(picard_t_final >= picard_ds, "picard.t_final", "must be >= picard.ds");
  require(lp_q >= 1.0 && lp_p >= lp_q, "lplq.p", "need 1 <= q <= p <= inf");
  require(!probe_widths.empty() || random_probes > 0, "lplq.probe_widths", "need at least one probe");
  for (double w : probe_widths) require(w > 0.0, "lplq.probe_widths", "must be positive");
  require(random_probes >= 0, "lplq.random_probes", "must be >= 0");
  require(lp_window_start < lp_window_end, "lplq.window_start", "must be < lplq.window_end");
  require(lp_model == "auto" || lp_model == "power_law" || lp_model == "exponential", "lplq.model",
          "expected auto | power_law | exponential");
  for (const auto& [k, l] : beta_pairs) {
    require(k > 0.0 && k < 1.0 && l > 0.0 && l < 1.0, "beta.pairs", "need 0 < k, l < 1");
  }
  for (double t : beta_times) require(t > 0.0, "beta.times", "must be positive");
  require(trials >= 1, "audit.trials", "must be >= 1");
  require(!out.empty(), "run.out", "must be non-empty");
  require(jobs >= 1, "run.jobs", "must be >= 1");
}

Weight ExperimentConfig::weight() const {
  if (!weight_coeffs.empty()) return Weight("custom", PolynomialWeight(parse_coefficients(weight_coeffs)));
  return catalog_weight(weight_name);
}

GridSpec ExperimentConfig::grid() const { return GridSpec(extent, points); }

ComplexField ExperimentConfig::initial(const GridSpec& g) const {
  ComplexField u = gaussian_bump(g, cplx{center_x, center_y}, width);
  u *= amplitude;
  return u;
}

std::string ExperimentConfig::to_ini() const {
  std::string out;
  std::string_view section;
  for (const Field& f : schema()) {
    if (section != f.section) {
      section = f.section;
      out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", section);
    }
    out += fmt::format("{} = {}\n", f.key, f.get(*this));
  }
  return out;
}

std::map<Bidegree, cplx> parse_coefficients(std::string_view text) {
  std::map<Bidegree, cplx> coeffs;
  for (const std::string& term : split(text, ';')) {
    const std::vector<std::string> parts = split(term, ',');
    if (parts.size() != 3 && parts.size() != 4) {
      throw ValidationError(fmt::format("weight.coeffs: expected 'j,k,re[,im]', got '{}'", term));
    }
    const int j = to_int("weight.coeffs", parts[0]);
    const int k = to_int("weight.coeffs", parts[1]);
    const double re = to_double("weight.coeffs", parts[2]);
    const double im = parts.size() == 4 ? to_double("weight.coeffs", parts[3]) : 0.0;
    if (j < 0 || k < 0) throw ValidationError(fmt::format("weight.coeffs: negative exponent in '{}'", term));
    if (!coeffs.emplace(Bidegree{j, k}, cplx{re, im}).second) {
      throw ValidationError(fmt::format("weight.coeffs: duplicate bidegree ({}, {})", j, k));
    }
  }
  if (coeffs.empty()) throw ValidationError("weight.coeffs: no terms");
  return coeffs;
}

namespace {

struct Preset {
  const char* name;
  const char* text;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"zero", "[weight]\nname = zero\n"},
      {"modsq", "[weight]\nname = modsq\n"},
      {"modquartic", "[weight]\nname = modquartic\n"},
      {"harmonic_re_z2", "[weight]\nname = harmonic_re_z2\n"},
      {"flat_example", "[weight]\nname = flat_example\n"},
      {"audit-zero",
       "[weight]\nname = zero\n"
       "[grid]\nextent = 4\npoints = 33\n"},
      {"free-kernel",
       "[weight]\nname = zero\n"
       "[grid]\nextent = 8\npoints = 257\n"
       "[stepper]\ndt = 0.001\n"
       "[kernel]\ntimes = 0.1, 0.5, 1\nslack = 0.05\n"},
      {"modsq-kernel",
       "[weight]\nname = modsq\n"
       "[grid]\nextent = 8\npoints = 257\n"
       "[stepper]\ndt = 0.001\n"
       "[kernel]\ntimes = 0.25, 0.5, 1\nslack = 0.05\n"},
      {"picard-flat",
       "[weight]\nname = flat_example\n"
       "[grid]\nextent = 4\npoints = 65\n"
       "[stepper]\ndt = 0.001\nscheme = backward_euler\n"
       "[nonlinearity]\nkind = power\nm = 3\n"
       "[initial]\namplitude = 0.05\nwidth = 1\n"
       "[picard]\nq = 3\nds = 0.01\nt_final = 1\ntol = 1e-10\nmax_iter = 50\n"},
      {"theorem1-flat",
       "[weight]\nname = flat_example\n"
       "[grid]\nextent = 4\npoints = 65\n"
       "[stepper]\ndt = 0.001\n"
       "[nonlinearity]\nkind = power\nm = 3\n"
       "[initial]\namplitude = 0.05\nwidth = 1\nperturbation = 0.01\n"
       "[stability]\nq = 3\nmodel = auto\nsolver = imex\nwindow_start = 0.1\n"
       "[schedule]\nkind = uniform\nspacing = 0.05\nt_final = 4\n"},
      {"theorem2-modsq",
       "[weight]\nname = modsq\n"
       "[grid]\nextent = 4\npoints = 16\n"
       "[stepper]\ndt = 0.001\n"
       "[nonlinearity]\nkind = power\nm = 3\n"
       "[initial]\namplitude = 0.05\nwidth = 1\nperturbation = 0.01\n"
       "[stability]\nn = 3\nmodel = auto\nsolver = imex\nwindow_start = 1\n"
       "[schedule]\nkind = uniform\nspacing = 0.05\nt_final = 4\n"},
      {"lplq-free",
       "[weight]\nname = zero\n"
       "[grid]\nextent = 8\npoints = 129\n"
       "[stepper]\ndt = 0.002\n"
       "[lplq]\np = inf\nq = 1\nprobe_widths = 0.1, 0.25, 0.5\nwindow_start = 0.2\nwindow_end = 2\n"
       "[schedule]\nkind = uniform\nspacing = 0.1\nt_final = 2\n"},
      {"lplq-modsq",
       "[weight]\nname = modsq\n"
       "[grid]\nextent = 4\npoints = 16\n"
       "[stepper]\ndt = 0.001\n"
       "[lplq]\np = 2\nq = 2\nprobe_widths = 1\nrandom_probes = 2\nwindow_start = 2\nwindow_end = 5\n"
       "[schedule]\nkind = uniform\nspacing = 0.1\nt_final = 5\n"},
      {"beta", "[beta]\npairs = 0.5:0.5, 0.3:0.4, 0.9:0.05\ntimes = 0.1, 2\n"},
  };
  return table;
}

}  // namespace

std::string_view preset_text(std::string_view name) {
  for (const Preset& p : presets()) {
    if (name == p.name) return p.text;
  }
  throw ValidationError(fmt::format("unknown preset '{}' (known: {})", name, fmt::join(preset_names(), ", ")));
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : presets()) names.emplace_back(p.name);
  return names;
}

ExperimentConfig parse_config(std::string_view ini) {
  ExperimentConfig c;
  apply_ini(c, ini, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const ConfigSources& sources) {
  ExperimentConfig c;
  if (sources.preset) {
    apply_ini(c, preset_text(*sources.preset), fmt::format("preset '{}'", *sources.preset));
    c.preset = *sources.preset;
  }
  if (sources.file) {
    std::ifstream in(*sources.file);
    if (!in) throw ValidationError(fmt::format("cannot read config file '{}'", *sources.file));
    std::stringstream buffer;
    buffer << in.rdbuf();
    apply_ini(c, buffer.str(), *sources.file);
  }
  for (const std::string& o : sources.overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ValidationError(fmt::format("override '{}': expected section.key=value", o));
    }
    apply(c, trim(std::string_view(o).substr(0, dot)), trim(std::string_view(o).substr(dot + 1, eq - dot - 1)),
          std::string_view(o).substr(eq + 1));
  }
  c.validate();
  return c;
}

}  // namespace boxheat
