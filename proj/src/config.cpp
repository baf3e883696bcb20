#include "avgh/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/report.hpp"

namespace avgh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const KeyValueFile::Entry& e) {
  return e.line > 0 ? " (line " + std::to_string(e.line) + ")" : " (command line)";
}

double to_double(const std::string& key, const KeyValueFile::Entry& e) {
  const std::string& s = e.value;
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(key + ": expected a number, got '" + s + "'", e.line);
  return v;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& is) {
  KeyValueFile kv;
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ParseError("empty section name", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line);
    if (!section.empty()) key = section + "." + key;
    if (key.rfind("system.", 0) == 0) key = key.substr(7);
    if (kv.entries_.count(key)) throw ParseError("duplicate key '" + key + "'", line);
    kv.entries_[key] = {value, line};
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string());
  return parse(in);
}

const KeyValueFile::Entry* KeyValueFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) > 0; }

const KeyValueFile::Entry& KeyValueFile::at(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ValidationError(key + ": required key is missing");
  return *e;
}

void KeyValueFile::set(const std::string& key, std::string value) { entries_[key] = {std::move(value), 0}; }

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

std::string KeyValueFile::require_string(const std::string& key) const { return at(key).value; }

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  return e ? to_double(key, *e) : fallback;
}

double KeyValueFile::require_double(const std::string& key) const { return to_double(key, at(key)); }

std::size_t KeyValueFile::get_size(const std::string& key, std::size_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size() || e->value.empty())
    throw ParseError(key + ": expected a non-negative integer, got '" + e->value + "'", e->line);
  return v;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size() || e->value.empty())
    throw ParseError(key + ": expected an unsigned integer, got '" + e->value + "'", e->line);
  return v;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  throw ParseError(key + ": expected true or false, got '" + e->value + "'", e->line);
}

std::vector<double> KeyValueFile::get_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return {};
  std::string s = e->value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(to_double(key, {token, e->line}));
  return out;
}

Mat KeyValueFile::require_matrix(const std::string& key) const {
  const Entry& e = at(key);
  try {
    return parse_matrix(e.value);
  } catch (const ParseError& err) {
    throw ParseError(key + ": " + err.what(), e.line);
  } catch (const ValidationError& err) {
    throw ValidationError(key + ": " + err.what() + where(e));
  }
}

std::vector<std::string> KeyValueFile::children(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string p = prefix + ".";
  for (const auto& [key, e] : entries_) {
    if (key.rfind(p, 0) != 0) continue;
    const std::string rest = key.substr(p.size());
    const std::string child = rest.substr(0, rest.find('.'));
    if (std::find(out.begin(), out.end(), child) == out.end()) out.push_back(child);
  }
  return out;
}

std::vector<std::string> KeyValueFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, e] : entries_)
    if (!used_.count(key)) out.push_back(key);
  return out;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names = {"propagate", "gramian", "hautus", "mintime",
                                                 "hardy",     "perturb", "demo",   "report"};
  return names;
}

bool needs_system(const std::string& command) {
  return command == "propagate" || command == "gramian" || command == "hautus" || command == "perturb" ||
         command == "report";
}

TimeProfile profile_from_keys(const KeyValueFile& kv, const std::string& prefix) {
  const std::string form = kv.get_string(prefix + ".form", "constant");
  const double amplitude = kv.get_double(prefix + ".amplitude", 1.0);
  TimeProfile p;
  if (form == "constant") {
    p = TimeProfile::constant(amplitude);
  } else if (form == "sinusoid") {
    p = TimeProfile::sinusoid(amplitude, kv.require_double(prefix + ".frequency"),
                              kv.get_double(prefix + ".phase", 0.0));
  } else if (form == "piecewise") {
    std::vector<double> values = kv.get_list(prefix + ".values");
    for (double& v : values) v *= amplitude;
    p = TimeProfile::piecewise(kv.get_list(prefix + ".breakpoints"), std::move(values));
  } else {
    throw ValidationError(prefix + ".form: unknown profile '" + form + "'" + where(kv.at(prefix + ".form")));
  }
  if (kv.has(prefix + ".t0")) {
    const double t0 = kv.require_double(prefix + ".t0");
    if (!(t0 > 0.0)) throw ValidationError(prefix + ".t0: must be positive" + where(kv.at(prefix + ".t0")));
    p = p.truncated(t0);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + ": " + e.what());
  }
  return p;
}

namespace {

MatrixFamily family_from_keys(const KeyValueFile& kv, const std::string& name) {
  const std::string kind = kv.get_string(name + ".kind", kv.has(name + ".perturbation.1.matrix") ? "perturbed" : "constant");
  MatrixFamily f;
  if (kind == "constant") {
    f = MatrixFamily::constant(kv.has(name + ".matrix") ? kv.require_matrix(name + ".matrix")
                                                        : kv.require_matrix(name + ".base"));
  } else if (kind == "perturbed") {
    const Mat base = kv.has(name + ".base") ? kv.require_matrix(name + ".base") : kv.require_matrix(name + ".matrix");
    std::vector<PerturbationTerm> terms;
    for (const auto& child : kv.children(name + ".perturbation")) {
      const std::string p = name + ".perturbation." + child;
      const Mat m = kv.require_matrix(p + ".matrix");
      if (m.rows() != base.rows() || m.cols() != base.cols())
        throw ValidationError(p + ".matrix: shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              " does not match " + name + ".base" + where(kv.at(p + ".matrix")));
      terms.push_back({profile_from_keys(kv, p), m});
    }
    f = MatrixFamily::perturbed(base, std::move(terms));
  } else if (kind == "sampled") {
    const std::vector<double> times = kv.get_list(name + ".samples.times");
    if (times.size() < 2) throw ValidationError(name + ".samples.times: needs at least two times");
    std::vector<Mat> samples;
    for (std::size_t i = 1; i <= times.size(); ++i)
      samples.push_back(kv.require_matrix(name + ".samples." + std::to_string(i)));
    f = MatrixFamily::sampled(times, std::move(samples));
  } else if (kind == "identity") {
    const Index n = static_cast<Index>(kv.get_size("dim", 0));
    f = MatrixFamily::constant(Mat::Identity(n, n));
  } else {
    throw ValidationError(name + ".kind: unknown kind '" + kind + "'");
  }
  if (kv.get_bool(name + ".skew", false)) f.claim_skew();
  return f;
}

}  // namespace

SystemSpec system_from_keys(const KeyValueFile& kv) {
  const std::size_t dim = kv.get_size("dim", 0);
  if (dim == 0) throw ValidationError("dim: must be at least 1" + (kv.has("dim") ? where(kv.at("dim")) : std::string(" (missing)")));
  const std::string field = kv.get_string("field", "complex");
  if (field != "real" && field != "complex")
    throw ValidationError("field: must be real or complex" + where(kv.at("field")));
  const double tau = kv.require_double("tau");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau: must be positive" + where(kv.at("tau")));

  MatrixFamily a = family_from_keys(kv, "A");
  if (a.rows() != static_cast<Index>(dim) || a.cols() != static_cast<Index>(dim))
    throw ValidationError("A: expected " + std::to_string(dim) + "x" + std::to_string(dim) + ", got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  std::optional<MatrixFamily> c, b;
  if (!kv.children("C").empty() && kv.get_string("C.kind", "") != "none") c = family_from_keys(kv, "C");
  if (!kv.children("B").empty() && kv.get_string("B.kind", "") != "none") b = family_from_keys(kv, "B");

  std::size_t n_steps = kv.get_size("n_steps", 0);
  if (n_steps == 0) n_steps = default_steps(a, tau);

  std::optional<StructuralConstants> constants;
  if (!kv.children("constants").empty()) {
    StructuralConstants s;
    s.L = kv.get_double("constants.L", 0.0);
    s.growth.k = kv.get_double("constants.k", 1.0);
    s.growth.K = kv.get_double("constants.K", 1.0);
    s.growth.alpha = kv.get_double("constants.alpha", 0.0);
    s.growth.beta = kv.get_double("constants.beta", 0.0);
    try {
      s.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("constants: ") + e.what());
    }
    constants = s;
  }
  SystemSpec sys{std::move(a), std::move(c), std::move(b), TimeGrid(tau, n_steps), constants, field == "complex"};
  sys.validate();
  return sys;
}

CoefficientTerm coefficient_from_keys(const KeyValueFile& kv, const std::string& prefix) {
  CoefficientTerm t{profile_from_keys(kv, prefix), {}};
  t.shape.kind = parse_shape_kind(kv.get_string(prefix + ".shape", "constant"));
  t.shape.center = kv.get_double(prefix + ".center", 0.5);
  t.shape.width = kv.get_double(prefix + ".width", 0.1);
  if (!(t.shape.width > 0.0)) throw ValidationError(prefix + ".width: must be positive");
  return t;
}

namespace {

std::vector<CoefficientTerm> terms_from_keys(const KeyValueFile& kv, const std::string& prefix) {
  std::vector<CoefficientTerm> out;
  if (kv.children(prefix).empty()) return out;
  if (kv.get_bool(prefix + ".enabled", true)) out.push_back(coefficient_from_keys(kv, prefix));
  return out;
}

}  // namespace

SchrodingerSpec schrodinger_from_keys(const KeyValueFile& kv) {
  SchrodingerSpec s;
  s.n_modes = kv.get_size("demo.n_modes", s.n_modes);
  s.tau = kv.get_double("demo.tau", s.tau);
  s.n_steps = kv.get_size("demo.n_steps", 0);
  if (s.n_modes < 1) throw ValidationError("demo.n_modes: must be at least 1");
  if (!(s.tau > 0.0)) throw ValidationError("demo.tau: must be positive");
  s.potential = terms_from_keys(kv, "demo.potential");
  return s;
}

WaveSpec wave_from_keys(const KeyValueFile& kv) {
  WaveSpec s;
  s.n_modes = kv.get_size("demo.n_modes", s.n_modes);
  s.tau = kv.get_double("demo.tau", 0.0);
  s.n_steps = kv.get_size("demo.n_steps", 0);
  if (s.n_modes < 1) throw ValidationError("demo.n_modes: must be at least 1");
  if (s.tau < 0.0) throw ValidationError("demo.tau: must be positive, or 0 to choose it from the fitted constants");
  s.potential = terms_from_keys(kv, "demo.potential");
  s.damping = terms_from_keys(kv, "demo.damping");
  return s;
}

namespace {

ParsedConfig finish(KeyValueFile kv, const std::filesystem::path& input, const std::optional<std::string>& command,
                    const std::optional<std::uint64_t>& seed, const std::optional<std::string>& profile) {
  ParsedConfig pc;
  RunConfig& run = pc.run;
  run.input = input;
  if (command) kv.set("command", *command);
  if (seed) kv.set("seed", std::to_string(*seed));
  if (profile) kv.set("profile", *profile);
  run.command = kv.get_string("command", "");
  if (run.command.empty()) throw ValidationError("command: no command given on the command line or in the config");
  const auto& names = known_commands();
  if (std::find(names.begin(), names.end(), run.command) == names.end())
    throw ValidationError("command: unknown command '" + run.command + "'");
  run.seed = kv.get_u64("seed", 42);
  run.profile = parse_profile(kv.get_string("profile", "quick"));
  run.emit_matrices = kv.get_bool("emit_matrices", false);
  if (needs_system(run.command)) pc.system = system_from_keys(kv);
  for (const auto& [key, e] : kv.entries()) run.overrides[key] = e.value;
  pc.keys = std::move(kv);
  return pc;
}

}  // namespace

ParsedConfig parse_config(const std::filesystem::path& path, const std::optional<std::string>& command,
                          const std::optional<std::uint64_t>& seed, const std::optional<std::string>& profile) {
  if (!std::filesystem::is_regular_file(path)) throw ParseError("config file not found: " + path.string());
  return finish(KeyValueFile::load(path), path, command, seed, profile);
}

ParsedConfig parse_config_text(const std::string& text, const std::optional<std::string>& command,
                               const std::optional<std::uint64_t>& seed, const std::optional<std::string>& profile) {
  std::istringstream in(text);
  return finish(KeyValueFile::parse(in), "<text>", command, seed, profile);
}

}  // namespace avgh
