#include "mcfob/cli/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mcfob/error.hpp"
#include "mcfob/field_io.hpp"

namespace mcfob::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Location-aware error construction for one parse.
class Diagnostics {
 public:
  explicit Diagnostics(std::string_view source) : source_(source) {}

  void set_line(const std::string& key, int line) { lines_[key] = line; }
  bool has(const std::string& key) const { return lines_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    std::string where(source_);
    if (auto it = lines_.find(key); it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": " + key + ": " + message);
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
};

double to_real(const Diagnostics& diag, const std::string& key, std::string_view value) {
  try {
    const double v = parse_double(value);
    if (!std::isfinite(v)) diag.fail(key, "expected a finite real, got '" + std::string(value) + "'");
    return v;
  } catch (const std::invalid_argument&) {
    diag.fail(key, "expected a real number, got '" + std::string(value) + "'");
  }
}

std::int64_t to_int(const Diagnostics& diag, const std::string& key, std::string_view value) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    diag.fail(key, "expected an integer, got '" + std::string(value) + "'");
  }
  return v;
}

bool to_bool(const Diagnostics& diag, const std::string& key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  diag.fail(key, "expected true or false, got '" + std::string(value) + "'");
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> items;
  if (trim(value).empty()) return items;
  while (true) {
    const auto comma = value.find(',');
    items.push_back(trim(value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return items;
}

std::vector<double> to_reals(const Diagnostics& diag, const std::string& key, std::string_view value) {
  std::vector<double> out;
  for (auto item : split_list(value)) out.push_back(to_real(diag, key, item));
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

using Setter = std::function<void(Scenario&, std::string_view, const Diagnostics&, const std::string&)>;

void add_field_keys(std::map<std::string, Setter>& table, const std::string& prefix,
                    FieldSpec Scenario::*member) {
  table[prefix + ".kind"] = [member](Scenario& s, std::string_view v, const Diagnostics& d,
                                     const std::string& key) {
    FieldSpec& f = s.*member;
    if (v == "none") {
      f.source = FieldSpec::Source::none;
    } else if (v == "file") {
      f.source = FieldSpec::Source::file;
    } else {
      try {
        f.shape.kind = parse_shape_kind(v);
      } catch (const ConfigError& e) {
        d.fail(key, e.what());
      }
      f.source = FieldSpec::Source::builtin;
    }
  };
  auto real_key = [&](const char* name, double ShapeSpec::*field) {
    table[prefix + "." + name] = [member, field](Scenario& s, std::string_view v,
                                                 const Diagnostics& d, const std::string& key) {
      (s.*member).shape.*field = to_real(d, key, v);
    };
  };
  real_key("value", &ShapeSpec::value);
  real_key("amplitude", &ShapeSpec::amplitude);
  real_key("radius", &ShapeSpec::radius);
  real_key("sign", &ShapeSpec::sign);
  real_key("offset", &ShapeSpec::offset);
  table[prefix + ".center"] = [member](Scenario& s, std::string_view v, const Diagnostics& d,
                                       const std::string& key) {
    const auto c = to_reals(d, key, v);
    if (c.empty() || c.size() > 2) d.fail(key, "expected 1 or 2 comma-separated coordinates");
    (s.*member).shape.center = {c[0], c.size() > 1 ? c[1] : 0.0};
  };
  table[prefix + ".path"] = [member](Scenario& s, std::string_view v, const Diagnostics&,
                                     const std::string&) { (s.*member).path = std::string(v); };
}

struct ParseState {
  std::vector<double> density_x0;
  std::optional<double> density_z0;
  std::optional<double> density_t0;
  std::optional<std::vector<double>> barrier_vertex;
  std::optional<std::vector<double>> barrier_alpha;
  std::optional<double> barrier_b;
  std::optional<double> barrier_m;
  bool epsilon_set = false;
};

std::map<std::string, Setter> key_table(ParseState& ps) {
  std::map<std::string, Setter> t;
  t["name"] = [](Scenario& s, std::string_view v, const Diagnostics&, const std::string&) {
    s.name = std::string(v);
  };
  t["grid.d"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    s.dim = static_cast<int>(to_int(d, k, v));
    if (s.dim != 1 && s.dim != 2) d.fail(k, "dimension must be 1 or 2");
  };
  t["grid.L"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    s.length = to_real(d, k, v);
    if (!(s.length > 0.0)) d.fail(k, "period length must be positive");
  };
  t["grid.n"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    const auto n = to_int(d, k, v);
    if (n < 4 || n > 1 << 16) d.fail(k, "sample count must lie in [4, 65536]");
    s.samples = static_cast<int>(n);
  };
  add_field_keys(t, "init", &Scenario::init);
  add_field_keys(t, "lower", &Scenario::lower);
  add_field_keys(t, "upper", &Scenario::upper);
  t["flow.scheme"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    try {
      s.scheme = parse_scheme(v);
    } catch (const ConfigError& e) {
      d.fail(k, e.what());
    }
  };
  t["flow.epsilon"] = [&ps](Scenario& s, std::string_view v, const Diagnostics& d,
                            const std::string& k) {
    s.epsilon = to_real(d, k, v);
    if (!(s.epsilon > 0.0)) d.fail(k, "must be positive");
    ps.epsilon_set = true;
  };
  t["flow.cfl_safety"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                            const std::string& k) {
    s.cfl_safety = to_real(d, k, v);
    if (!(s.cfl_safety > 0.0)) d.fail(k, "must be positive");
  };
  t["flow.allow_unstable"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                                const std::string& k) { s.allow_unstable = to_bool(d, k, v); };
  t["stop.t_end"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    s.t_end = to_real(d, k, v);
    if (!(*s.t_end >= 0.0)) d.fail(k, "must be >= 0");
  };
  t["stop.stationary_tol"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                                const std::string& k) {
    s.stationary_tol = to_real(d, k, v);
    if (!(*s.stationary_tol > 0.0)) d.fail(k, "must be positive");
  };
  t["stop.max_steps"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                           const std::string& k) {
    s.max_steps = to_int(d, k, v);
    if (s.max_steps <= 0) d.fail(k, "must be positive");
  };
  t["output.dir"] = [](Scenario& s, std::string_view v, const Diagnostics&, const std::string&) {
    s.output_dir = std::string(v);
  };
  t["output.snapshot_interval"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                                     const std::string& k) {
    s.snapshot_interval = to_real(d, k, v);
    if (!(s.snapshot_interval >= 0.0)) d.fail(k, "must be >= 0");
  };
  t["output.record_interval"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                                   const std::string& k) {
    s.record_interval = to_real(d, k, v);
    if (!(s.record_interval >= 0.0)) d.fail(k, "must be >= 0");
  };
  t["checks"] = [](Scenario& s, std::string_view v, const Diagnostics& d, const std::string& k) {
    s.checks.clear();
    for (auto item : split_list(v)) {
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), item) == known.end()) {
        d.fail(k, "unknown check '" + std::string(item) + "'");
      }
      s.checks.emplace_back(item);
    }
  };
  t["density.x0"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d, const std::string& k) {
    ps.density_x0 = to_reals(d, k, v);
  };
  t["density.z0"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d, const std::string& k) {
    ps.density_z0 = to_real(d, k, v);
  };
  t["density.t0"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d, const std::string& k) {
    ps.density_t0 = to_real(d, k, v);
  };
  t["barrier.vertex"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d,
                              const std::string& k) { ps.barrier_vertex = to_reals(d, k, v); };
  t["barrier.alpha"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d,
                             const std::string& k) { ps.barrier_alpha = to_reals(d, k, v); };
  t["barrier.b"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d, const std::string& k) {
    ps.barrier_b = to_real(d, k, v);
  };
  t["barrier.M"] = [&ps](Scenario&, std::string_view v, const Diagnostics& d, const std::string& k) {
    ps.barrier_m = to_real(d, k, v);
    if (!(*ps.barrier_m >= 0.0)) d.fail(k, "must be >= 0");
  };
  t["compare.tolerance"] = [](Scenario& s, std::string_view v, const Diagnostics& d,
                              const std::string& k) {
    s.compare_tolerance = to_real(d, k, v);
    if (!(s.compare_tolerance >= 0.0)) d.fail(k, "must be >= 0");
  };
  return t;
}

void write_field(std::ostringstream& out, const std::string& prefix, const FieldSpec& f) {
  switch (f.source) {
    case FieldSpec::Source::none:
      out << prefix << ".kind=none\n";
      return;
    case FieldSpec::Source::file:
      out << prefix << ".kind=file\n" << prefix << ".path=" << f.path << '\n';
      return;
    case FieldSpec::Source::builtin:
      break;
  }
  const ShapeSpec& s = f.shape;
  out << prefix << ".kind=" << to_string(s.kind) << '\n'
      << prefix << ".value=" << format_double(s.value) << '\n'
      << prefix << ".amplitude=" << format_double(s.amplitude) << '\n'
      << prefix << ".radius=" << format_double(s.radius) << '\n'
      << prefix << ".center=" << format_double(s.center[0]) << ',' << format_double(s.center[1]) << '\n'
      << prefix << ".sign=" << format_double(s.sign) << '\n'
      << prefix << ".offset=" << format_double(s.offset) << '\n';
}

std::optional<ScalarField> materialize(const FieldSpec& spec, const PeriodicGrid& grid,
                                       const std::string& prefix, const Diagnostics& diag) {
  switch (spec.source) {
    case FieldSpec::Source::none:
      return std::nullopt;
    case FieldSpec::Source::builtin:
      if (spec.shape.kind == ShapeKind::cap && spec.shape.sign != 1.0 && spec.shape.sign != -1.0) {
        diag.fail(prefix + ".sign", "cap sign must be +1 or -1");
      }
      return builtin_obstacle(spec.shape, grid);
    case FieldSpec::Source::file: {
      Snapshot snap = [&] {
        try {
          return read_snapshot_file(spec.path);
        } catch (const IoError& e) {
          diag.fail(prefix + ".path", e.what());
        }
      }();
      if (!(snap.field.grid() == grid)) {
        diag.fail(prefix + ".path", "snapshot grid does not match grid.d/grid.L/grid.n");
      }
      return std::move(snap.field);
    }
  }
  return std::nullopt;
}

Setup build(const Scenario& s, const Diagnostics& diag) {
  PeriodicGrid grid = [&] {
    try {
      return PeriodicGrid(s.dim, s.length, s.samples);
    } catch (const ContractViolation& e) {
      diag.fail("grid.n", e.what());
    }
  }();

  if (s.init.source == FieldSpec::Source::none) diag.fail("init.kind", "initial data is required");
  ScalarField u0 = *materialize(s.init, grid, "init", diag);
  auto lower = materialize(s.lower, grid, "lower", diag);
  auto upper = materialize(s.upper, grid, "upper", diag);

  ObstaclePair obs = [&] {
    try {
      return make_obstacles(grid, std::move(lower), std::move(upper));
    } catch (const ContractViolation& e) {
      diag.fail("upper.kind", e.what());
    }
  }();

  for (std::size_t k = 0; k < u0.size(); ++k) {
    if (u0[k] < obs.lower[k]) {
      diag.fail("init.kind", "initial data lies below the lower obstacle at grid index " +
                                 std::to_string(k) + " (u0=" + format_double(u0[k]) +
                                 ", lower=" + format_double(obs.lower[k]) + ")");
    }
    if (u0[k] > obs.upper[k]) {
      diag.fail("init.kind", "initial data lies above the upper obstacle at grid index " +
                                 std::to_string(k) + " (u0=" + format_double(u0[k]) +
                                 ", upper=" + format_double(obs.upper[k]) + ")");
    }
  }

  FlowConfig flow;
  flow.scheme = s.scheme;
  flow.pen = {s.epsilon, obs.curvature_bound};
  flow.cfl_safety = s.cfl_safety;
  flow.allow_unstable = s.allow_unstable;
  if (s.t_end && s.stationary_tol) {
    diag.fail("stop.t_end", "set either stop.t_end or stop.stationary_tol, not both");
  }
  if (s.t_end) {
    flow.stop = StopAtTime{*s.t_end};
  } else {
    flow.stop = StopWhenStationary{s.stationary_tol.value_or(1e-6)};
  }
  flow.max_steps = s.max_steps;
  flow.record_interval = s.record_interval;
  flow.density = s.density;
  if (s.density) {
    if (s.density->point.size() != static_cast<std::size_t>(s.dim + 1)) {
      diag.fail("density.x0", "needs grid.d coordinates");
    }
    const double t_last = s.t_end.value_or(0.0);
    if (!(s.density->t0 > t_last)) diag.fail("density.t0", "must exceed stop.t_end");
  }
  if (s.barrier) {
    if (s.barrier->vertex.size() != static_cast<std::size_t>(s.dim) ||
        s.barrier->alpha.size() != static_cast<std::size_t>(s.dim)) {
      diag.fail("barrier.vertex", "barrier.vertex and barrier.alpha need grid.d entries");
    }
    for (double a : s.barrier->alpha) {
      if (a < 0.0) diag.fail("barrier.alpha", "coefficients must be >= 0");
    }
  }
  try {
    flow.validate();
    if (s.scheme == Scheme::penalized) {
      const double gap = min_obstacle_gap(obs);
      if (std::isfinite(gap) && s.epsilon > 0.25 * gap) {
        throw ContractViolation("eps=" + format_double(s.epsilon) +
                                " exceeds a quarter of the minimum obstacle gap " + format_double(gap));
      }
    }
  } catch (const ContractViolation& e) {
    const std::string key = s.cfl_safety > 1.0 && !s.allow_unstable ? "flow.cfl_safety" : "flow.epsilon";
    diag.fail(key, e.what());
  }
  return Setup{grid, std::move(u0), std::move(obs), flow};
}

}  // namespace

const std::vector<std::string_view>& known_checks() {
  static const std::vector<std::string_view> names = {
      "lipschitz", "ut_decay", "band", "constraint", "area",
      "dissipation", "complementarity", "density", "barrier"};
  return names;
}

Scenario parse_config_text(std::string_view text, std::string_view source,
                           const std::filesystem::path& base_dir) {
  Diagnostics diag(source);
  Scenario s;
  s.init.source = FieldSpec::Source::none;
  ParseState ps;
  const auto table = key_table(ps);

  int line_no = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (diag.has(key)) {
      diag.fail(key, "duplicate key (also on line " + std::to_string(line_no) + ")");
    }
    diag.set_line(key, line_no);
    const auto it = table.find(key);
    if (it == table.end()) diag.fail(key, "unknown key");
    it->second(s, value, diag, key);
  }

  for (FieldSpec* f : {&s.init, &s.lower, &s.upper}) {
    if (f->source == FieldSpec::Source::file && !f->path.empty()) {
      std::filesystem::path p(f->path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      f->path = p.lexically_normal().string();
    }
  }
  if (!ps.epsilon_set) s.epsilon = 4.0 * s.length / s.samples;

  const bool any_density = !ps.density_x0.empty() || ps.density_z0 || ps.density_t0;
  if (any_density) {
    if (ps.density_x0.empty() || !ps.density_z0 || !ps.density_t0) {
      diag.fail("density.t0", "density.x0, density.z0 and density.t0 must be given together");
    }
    DensityProbe probe{ps.density_x0, *ps.density_t0};
    probe.point.push_back(*ps.density_z0);
    s.density = std::move(probe);
  }
  const bool any_barrier = ps.barrier_vertex || ps.barrier_alpha || ps.barrier_b || ps.barrier_m;
  if (any_barrier) {
    if (!ps.barrier_vertex || !ps.barrier_alpha || !ps.barrier_b) {
      diag.fail("barrier.vertex", "barrier.vertex, barrier.alpha and barrier.b must be given together");
    }
    s.barrier = BarrierConfig{*ps.barrier_vertex, *ps.barrier_alpha, *ps.barrier_b, ps.barrier_m};
  }
  const bool wants_barrier = std::find(s.checks.begin(), s.checks.end(), "barrier") != s.checks.end();
  if (wants_barrier && !s.barrier) diag.fail("checks", "the barrier check needs barrier.* keys");
  const bool wants_density = std::find(s.checks.begin(), s.checks.end(), "density") != s.checks.end();
  if (wants_density && !s.density) diag.fail("checks", "the density check needs density.* keys");

  build(s, diag);
  return s;
}

Scenario parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string(), path.parent_path());
}

std::string serialize_config(const Scenario& s) {
  std::ostringstream out;
  out << "name=" << s.name << '\n'
      << "grid.d=" << std::to_string(s.dim) << '\n'
      << "grid.L=" << format_double(s.length) << '\n'
      << "grid.n=" << std::to_string(s.samples) << '\n';
  write_field(out, "init", s.init);
  write_field(out, "lower", s.lower);
  write_field(out, "upper", s.upper);
  out << "flow.scheme=" << to_string(s.scheme) << '\n'
      << "flow.epsilon=" << format_double(s.epsilon) << '\n'
      << "flow.cfl_safety=" << format_double(s.cfl_safety) << '\n'
      << "flow.allow_unstable=" << (s.allow_unstable ? "true" : "false") << '\n';
  if (s.t_end) out << "stop.t_end=" << format_double(*s.t_end) << '\n';
  if (s.stationary_tol) out << "stop.stationary_tol=" << format_double(*s.stationary_tol) << '\n';
  out << "stop.max_steps=" << std::to_string(s.max_steps) << '\n'
      << "output.dir=" << s.output_dir << '\n'
      << "output.snapshot_interval=" << format_double(s.snapshot_interval) << '\n'
      << "output.record_interval=" << format_double(s.record_interval) << '\n';
  out << "checks=";
  for (std::size_t i = 0; i < s.checks.size(); ++i) out << (i ? "," : "") << s.checks[i];
  out << '\n';
  if (s.density) {
    std::vector<double> x0(s.density->point.begin(), s.density->point.end() - 1);
    out << "density.x0=" << join(x0) << '\n'
        << "density.z0=" << format_double(s.density->point.back()) << '\n'
        << "density.t0=" << format_double(s.density->t0) << '\n';
  }
  if (s.barrier) {
    out << "barrier.vertex=" << join(s.barrier->vertex) << '\n'
        << "barrier.alpha=" << join(s.barrier->alpha) << '\n'
        << "barrier.b=" << format_double(s.barrier->offset) << '\n';
    if (s.barrier->slope) out << "barrier.M=" << format_double(*s.barrier->slope) << '\n';
  }
  out << "compare.tolerance=" << format_double(s.compare_tolerance) << '\n';
  return out.str();
}

Setup build_setup(const Scenario& scenario) {
  return build(scenario, Diagnostics(scenario.name));
}

}  // namespace mcfob::cli
