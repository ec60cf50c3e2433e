#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ergolab/acceptance.hpp"
#include "ergolab/artifact.hpp"
#include "ergolab/boweneye.hpp"
#include "ergolab/cocycle.hpp"
#include "ergolab/gluing.hpp"
#include "ergolab/measures.hpp"
#include "ergolab/shiftspace.hpp"
#include "ergolab/splicer.hpp"

using nlohmann::json;
using namespace ergolab;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitBudget = 2;
constexpr int kExitAcceptance = 3;
constexpr std::uint64_t kDefaultSeed = 20240611;

enum class Kind { kString, kInt, kDouble, kFlag, kList };

struct OptionDef {
  std::string name;  // params key; the flag is --name with '_' shown as '-'
  Kind kind;
  std::string help;
};

// Raw flag values, keyed by params name; filled by CLI11.
struct RawOptions {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;
};

struct Command {
  std::string group;
  std::string name;
  CLI::App* app = nullptr;
  std::vector<OptionDef> options;
};

std::string flag_name(const std::string& key) {
  std::string out = "--" + key;
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kValidation, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kValidation, path + ": " + e.what());
  }
}

// Typed access to the merged command parameters.
class Params {
 public:
  explicit Params(json j) : j_(std::move(j)) {}

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw Error(ErrorKind::kValidation, flag_name(key) + " must be an integer");
    return v.get<std::int64_t>();
  }

  std::size_t count(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    const auto v = integer(key, fallback);
    if (v < 0) throw Error(ErrorKind::kValidation, flag_name(key) + " must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const auto& v = j_.at(key);
    if (!v.is_number()) throw Error(ErrorKind::kValidation, flag_name(key) + " must be a number");
    return v.get<double>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) return required(key, fallback);
    const auto& v = j_.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  bool flag(const std::string& key) const { return has(key) && j_.at(key).get<bool>(); }

  std::vector<std::string> list(const std::string& key) const {
    if (!has(key)) return {};
    std::vector<std::string> out;
    for (const auto& v : j_.at(key)) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    return out;
  }

  const json& raw() const { return j_; }

 private:
  template <typename T>
  static T required(const std::string& key, const std::optional<T>& fallback) {
    if (!fallback) throw Error(ErrorKind::kValidation, "missing required option " + flag_name(key));
    return *fallback;
  }

  json j_;
};

json convert(const OptionDef& def, const std::string& value) {
  try {
    switch (def.kind) {
      case Kind::kInt: {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) break;
        return v;
      }
      case Kind::kDouble: {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) break;
        return v;
      }
      default:
        return value;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::kValidation, flag_name(def.name) + ": cannot parse '" + value + "'");
}

json spec_json_from(const Params& p, const json& config) {
  if (!p.has("spec") && config.contains("spec") && config.at("spec").is_object()) {
    json spec = config.at("spec");
    if (p.has("kappa")) spec["kappa"] = p.text("kappa");
    return spec;
  }
  const std::string type = p.text("spec", "paper");
  if (type == "paper") return {{"type", "paper"}, {"kappa", p.text("kappa", "1/4")}};
  if (type == "full") return {{"type", "full"}, {"alphabet", p.integer("alphabet", 3)}};
  if (type == "sgap") return {{"type", "sgap"}, {"min_run", p.integer("min_run", 2)}};
  if (type == "sft") {
    return {{"type", "sft"}, {"alphabet", p.integer("alphabet", 3)}, {"forbidden", p.list("forbidden")}};
  }
  if (!type.empty() && (type.front() == '{')) return json::parse(type);
  return read_json_file(type);
}

CylinderFunction observable_from(const json& j, const Alphabet& alphabet) {
  const std::string type = j.value("type", "table");
  if (type == "coordinate") return CylinderFunction::coordinate(alphabet);
  if (type == "indicator") return CylinderFunction::indicator(alphabet, word_from_json(j.at("word")));
  if (type == "constant") {
    const auto& v = j.at("value");
    return v.is_string() ? CylinderFunction::constant(alphabet, parse_rational(v.get<std::string>()))
                         : CylinderFunction::constant(alphabet, v.get<double>());
  }
  return CylinderFunction::from_json(j, alphabet);
}

json observable_json_from(const Params& p, const json& config) {
  if (p.has("observable")) {
    const std::string text = p.text("observable");
    if (text == "coordinate") return {{"type", "coordinate"}};
    if (!text.empty() && text.front() == '{') return json::parse(text);
    return read_json_file(text);
  }
  if (config.contains("observable")) return config.at("observable");
  return {{"type", "coordinate"}};
}

// A word given inline in compact form, or as @file holding a compact string,
// a JSON word, or an artifact whose results carry a "word".
Word word_from_text(const std::string& text) {
  if (text.empty() || text.front() != '@') return parse_compact(text);
  std::string body = read_file(text.substr(1));
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r' || body.back() == ' ')) body.pop_back();
  if (!body.empty() && (body.front() == '{' || body.front() == '[' || body.front() == '"')) {
    const json j = json::parse(body);
    if (j.is_object() && j.contains("results") && j.at("results").contains("word")) {
      return word_from_json(j.at("results").at("word"));
    }
    if (j.is_object() && j.contains("word")) return word_from_json(j.at("word"));
    return word_from_json(j);
  }
  return parse_compact(body);
}

json load_program_json(const std::string& path) {
  const json j = read_json_file(path);
  if (j.contains("results") && j.at("results").contains("program")) return j.at("results");
  return j;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  json results;
  Table table;
  int exit_code = 0;
};

std::string str(double v) { return format_double(v); }
template <typename T>
std::string str(T v) {
  return std::to_string(v);
}

EnumerationLimits limits_from(const Params& p) {
  EnumerationLimits limits;
  limits.max_listing_words = p.count("enum_cap", static_cast<std::int64_t>(limits.max_listing_words));
  return limits;
}

OscillationSpec oscillation_from(const json& params, const CylinderFunction& f) {
  const Params p(params);
  OscillationSpec osc{f, p.real("alpha"), p.real("beta"), p.real("tau", 0.05),
                      p.count("checkpoints", 6), p.real("growth", 10.0)};
  osc.start_high = !p.flag("start_low");
  osc.max_length = p.count("max_length", static_cast<std::int64_t>(osc.max_length));
  return osc;
}

struct Context {
  std::string command;
  json config;  // params + spec + observable, hashed into the artifact
  Params params{json::object()};
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

SubshiftSpec spec_of(const Context& c) { return SubshiftSpec::from_json(c.config.at("spec")); }

Outcome run_lang(const Context& c, const std::string& sub) {
  const auto spec = spec_of(c);
  const auto limits = limits_from(c.params);
  const std::size_t n = c.params.count("n");
  Outcome out;
  if (sub == "count") {
    const bool list = c.params.flag("list");
    const auto result = count_language(spec, n, list, c.threads, limits);
    out.results = {{"n", n}, {"count", result.count}};
    out.table.header = {"n", "count"};
    out.table.rows.push_back({str(n), str(result.count)});
    if (list) {
      json words = json::array();
      out.table.header = {"index", "word"};
      out.table.rows.clear();
      for (std::size_t i = 0; i < result.words.size(); ++i) {
        words.push_back(to_compact(result.words[i]));
        out.table.rows.push_back({str(i), to_compact(result.words[i])});
      }
      out.results["words"] = words;
    }
    return out;
  }
  const auto rows = entropy_table(spec, n, c.threads, limits);
  const double delta = c.params.real("delta", 0.3);
  const std::size_t window = c.params.count("window", 5);
  json table = json::array();
  out.table.header = {"n", "count", "ratio", "log_growth"};
  for (const auto& r : rows) {
    table.push_back({{"n", r.n}, {"count", r.count}, {"ratio", r.ratio}, {"log_growth", r.log_growth}});
    out.table.rows.push_back({str(r.n), str(r.count), str(r.ratio), str(r.log_growth)});
  }
  out.results = {{"rows", table},
                 {"delta", delta},
                 {"window", window},
                 {"positive_entropy_certified", certifies_positive_entropy(rows, delta, window)}};
  return out;
}

Outcome run_glue(const Context& c, const std::string& sub) {
  const auto spec = spec_of(c);
  Outcome out;
  if (sub == "min-gap") {
    const Word w = word_from_text(c.params.text("w"));
    const Word u = word_from_text(c.params.text("u"));
    const auto v_max = c.params.integer("v_max", 100000);
    const auto gap = minimal_gap(spec, w, u, v_max);
    if (!gap) {
      throw Error(ErrorKind::kBudgetExceeded, "no legal gap up to v_max = " + std::to_string(v_max));
    }
    out.results = {{"w", to_compact(w)}, {"u", to_compact(u)}, {"v_max", v_max}, {"gap", *gap}};
    out.table.header = {"w", "u", "gap"};
    out.table.rows.push_back({to_compact(w), to_compact(u), str(*gap)});
    return out;
  }
  if (sub == "verify") {
    VerifyOptions vo;
    vo.w_min_length = c.params.count("w_min", 1);
    vo.w_max_length = c.params.count("w_max", 8);
    vo.u_min_length = c.params.count("u_min", 1);
    vo.u_max_length = c.params.count("u_max", 8);
    vo.pair_budget = c.params.count("pair_budget", static_cast<std::int64_t>(vo.pair_budget));
    vo.samples = c.params.count("samples", static_cast<std::int64_t>(vo.samples));
    vo.seed = c.seed;
    vo.threads = c.threads;
    const auto report = verify_m_transitivity(spec, vo);
    out.results = report.to_json();
    out.results["verdict"] = report.failures.empty();
    out.table.header = {"u_length", "pairs", "max_gap", "max_ratio", "bound"};
    for (const auto& r : report.per_length) {
      out.table.rows.push_back({str(r.u_length), str(r.pairs), str(r.max_gap), str(r.max_ratio), str(r.bound)});
    }
    return out;
  }
  AppSearchOptions ao;
  ao.threads = c.threads;
  ao.search_budget = c.params.count("search_budget", static_cast<std::int64_t>(ao.search_budget));
  const std::size_t f = c.params.count("f_budget");
  const std::size_t g = c.params.count("g_budget");
  const std::size_t n = c.params.count("n");
  if (c.params.has("n_max")) {
    const auto rows = app_threshold_scan(spec, n, c.params.count("n_max"), f, g, ao);
    json table = json::array();
    out.table.header = {"n", "witness_found"};
    for (const auto& r : rows) {
      table.push_back({{"n", r.n}, {"witness_found", r.witness_found}});
      out.table.rows.push_back({str(r.n), r.witness_found ? "true" : "false"});
    }
    out.results = {{"f_budget", f}, {"g_budget", g}, {"rows", table}};
    return out;
  }
  const auto witness = app_falsifier(spec, n, f, g, ao);
  out.results = {{"n", n}, {"f_budget", f}, {"g_budget", g}, {"witness_found", witness.has_value()}};
  out.table.header = {"n", "f_budget", "g_budget", "w_hat", "connector", "u_hat"};
  if (witness) {
    out.results["witness"] = {{"w_hat", to_compact(witness->w_hat)},
                              {"connector", to_compact(witness->connector)},
                              {"u_hat", to_compact(witness->u_hat)}};
    out.table.rows.push_back({str(n), str(f), str(g), to_compact(witness->w_hat), to_compact(witness->connector),
                              to_compact(witness->u_hat)});
  } else {
    out.results["witness"] = nullptr;
    out.table.rows.push_back({str(n), str(f), str(g), "", "", ""});
  }
  return out;
}

void program_table(const SpliceProgram& program, Table& table) {
  table.header = {"segment", "block", "reps", "gap", "high", "target", "predicted", "checkpoint"};
  for (std::size_t k = 0; k < program.segments.size(); ++k) {
    const auto& s = program.segments[k];
    table.rows.push_back({str(k), to_compact(s.block), str(s.reps), str(s.gap), s.high ? "true" : "false",
                          str(s.target), str(s.predicted), str(program.checkpoints[k])});
  }
}

Outcome run_splice(const Context& c, const std::string& sub) {
  const auto spec = spec_of(c);
  const auto f = observable_from(c.config.at("observable"), spec.alphabet());
  Outcome out;
  if (sub == "plan") {
    const auto osc = oscillation_from(c.params.raw(), f);
    const Word p_lo = word_from_text(c.params.text("p_lo", spec.as_paper() ? "m" : "0"));
    const Word p_hi = word_from_text(c.params.text("p_hi", spec.as_paper() ? "p" : "1"));
    const auto program = plan_oscillation(spec, osc, p_lo, p_hi);
    out.results = {{"program", program.to_json()},
                   {"oscillation",
                    {{"alpha", osc.alpha},
                     {"beta", osc.beta},
                     {"tau", osc.tau},
                     {"checkpoints", osc.num_checkpoints},
                     {"growth", osc.growth},
                     {"start_high", osc.start_high}}}};
    program_table(program, out.table);
    return out;
  }
  const json stored = load_program_json(c.params.text("program"));
  const auto program = SpliceProgram::from_json(stored.at("program"));
  const Word w = build_point(spec, program);
  if (sub == "build") {
    out.results = {{"length", w.size()}, {"word", to_compact(w)}, {"checkpoints", program.checkpoints}};
    out.table.header = {"index", "symbol"};
    for (std::size_t i = 0; i < w.size(); ++i) out.table.rows.push_back({str(i), str(static_cast<int>(w[i]))});
    return out;
  }
  json osc_json = stored.value("oscillation", json::object());
  for (const auto& [k, v] : c.params.raw().items()) osc_json[k] = v;
  if (osc_json.contains("start_high")) osc_json["start_low"] = !osc_json.at("start_high").get<bool>();
  const auto osc = oscillation_from(osc_json, f);
  const auto report = verify_oscillation(w, osc, program.checkpoints);
  const auto bounds = check_averaging_bound(w, f, program);
  bool bound_ok = true;
  json bound_rows = json::array();
  for (const auto& b : bounds) {
    bound_ok = bound_ok && b.holds;
    bound_rows.push_back({{"checkpoint", b.checkpoint},
                          {"prefix", b.prefix},
                          {"block_windows", b.block_windows},
                          {"deviation", b.deviation},
                          {"bound", b.bound},
                          {"holds", b.holds}});
  }
  out.results = report.to_json();
  out.results["legal"] = true;
  out.results["averaging_bound"] = bound_rows;
  out.results["averaging_bound_holds"] = bound_ok;
  out.results["verdict"] = report.all_pass && bound_ok;
  out.table.header = {"checkpoint", "windows", "average", "scheduled_high", "passes", "reaches_target"};
  for (const auto& r : report.checkpoints) {
    out.table.rows.push_back({str(r.checkpoint), str(r.windows), str(r.average), r.scheduled_high ? "true" : "false",
                              r.passes ? "true" : "false", r.reaches_target ? "true" : "false"});
  }
  return out;
}

Outcome run_measure(const Context& c, const std::string& sub) {
  const auto spec = spec_of(c);
  const Alphabet& alphabet = spec.alphabet();
  Outcome out;
  const MetricTruncation trunc(c.params.count("k", 16));
  const std::size_t depth = c.params.count("depth", static_cast<std::int64_t>(trunc.required_depth(alphabet)));
  if (sub == "empirical") {
    const Word w = word_from_text(c.params.text("word"));
    const std::size_t n = c.params.count("n", static_cast<std::int64_t>(w.size() + 1 > depth ? w.size() + 1 - depth : 0));
    const auto mu = c.params.flag("periodic") ? periodic_measure(w, depth, alphabet)
                                               : empirical_measure(w, n, depth, alphabet);
    out.results = mu.to_json();
    out.table.header = {"word", "count", "freq"};
    for (const auto& e : out.results.at("entries")) {
      out.table.rows.push_back({e.at("word").get<std::string>(), str(e.at("count").get<std::uint64_t>()),
                                str(e.at("freq").get<double>())});
    }
    return out;
  }
  if (sub == "rho") {
    const Word w1 = word_from_text(c.params.text("word"));
    const Word w2 = word_from_text(c.params.text("word2"));
    auto measure = [&](const Word& w, const std::string& key) {
      if (c.params.flag("periodic")) return periodic_measure(w, depth, alphabet);
      const std::size_t n = c.params.count(key, static_cast<std::int64_t>(w.size() + 1 > depth ? w.size() + 1 - depth : 0));
      return empirical_measure(w, n, depth, alphabet);
    };
    const auto d = rho_distance(measure(w1, "n"), measure(w2, "n2"), trunc);
    out.results = {{"k", trunc.terms},
                   {"depth", depth},
                   {"rho", d.value},
                   {"tail", d.tail},
                   {"test_functions", "cylinder indicators, length-lex order"}};
    out.table.header = {"k", "rho", "tail"};
    out.table.rows.push_back({str(trunc.terms), str(d.value), str(d.tail)});
    return out;
  }
  if (sub == "profile") {
    const Word w = word_from_text(c.params.text("word"));
    std::vector<std::size_t> checkpoints;
    for (const auto& s : c.params.list("at")) checkpoints.push_back(static_cast<std::size_t>(std::stoull(s)));
    const auto profile = accumulation_profile(w, checkpoints, depth, trunc, alphabet);
    json pairs = json::array();
    out.table.header = {"i", "j", "n_i", "n_j", "rho"};
    for (const auto& pd : profile.distances) {
      pairs.push_back({{"i", pd.i}, {"j", pd.j}, {"rho", pd.distance.value}});
      out.table.rows.push_back({str(pd.i), str(pd.j), str(checkpoints[pd.i]), str(checkpoints[pd.j]),
                                str(pd.distance.value)});
    }
    out.results = {{"checkpoints", checkpoints},
                   {"distances", pairs},
                   {"dispersion", profile.dispersion},
                   {"tail", profile.tail}};
    return out;
  }
  const auto f = observable_from(c.config.at("observable"), alphabet);
  std::vector<EmpiricalMeasure> measures;
  json integrals = json::array();
  out.table.header = {"period", "integral"};
  for (const auto& text : c.params.list("periods")) {
    const Word period = word_from_text(text);
    if (!periodic_point_legal(spec, period, 0)) {
      throw Error(ErrorKind::kIllegalInput, "period " + text + " does not give a legal periodic point");
    }
    measures.push_back(periodic_measure(period, std::max(depth, f.window()), alphabet));
    const double v = integrate(f, measures.back());
    integrals.push_back({{"period", text}, {"integral", v}});
    out.table.rows.push_back({text, str(v)});
  }
  const double kappa = c.params.has("kappa") ? to_double(parse_rational(c.params.text("kappa")))
                       : spec.as_paper()     ? to_double(spec.as_paper()->budget.kappa())
                                             : 0.0;
  out.results = {{"kappa", kappa},
                 {"integrals", integrals},
                 {"oscillation", f.sup() - f.inf()},
                 {"certified", kappa_controlled_certify(f, measures, kappa)}};
  return out;
}

Outcome run_cocycle(const Context& c, const std::string& sub) {
  const auto spec = spec_of(c);
  const CocycleSpec a = CocycleSpec::from_json(read_json_file(c.params.text("cocycle")), spec.alphabet());
  const Word w = word_from_text(c.params.text("word"));
  const NormKind kind = c.params.text("norm", "spectral") == "frobenius" ? NormKind::kFrobenius : NormKind::kSpectral;
  Outcome out;
  if (sub == "lyapunov") {
    const std::size_t n1 = c.params.count("n");
    const std::size_t n0 = c.params.count("n0", static_cast<std::int64_t>(n1));
    const auto trace = lyapunov_trace(a, w, n0, n1, kind);
    const auto gap = lyapunov_irregularity_gap(a, w, n0, n1, kind);
    json values = json::array();
    out.table.header = {"n", "chi_n"};
    for (const auto& p : trace) {
      values.push_back({{"n", p.n}, {"chi", p.chi}});
      out.table.rows.push_back({str(p.n), str(p.chi)});
    }
    out.results = {{"trace", values},
                   {"lo", gap.lo},
                   {"hi", gap.hi},
                   {"norm", kind == NormKind::kFrobenius ? "frobenius" : "spectral"}};
    if (kind == NormKind::kFrobenius && n1 > 0) out.results["frobenius_slack"] = std::log(a.dim()) / static_cast<double>(n1);
    return out;
  }
  const auto f = observable_from(c.config.at("observable"), spec.alphabet());
  const double k = c.params.real("k", 1.0);
  const std::size_t n = c.params.count("n");
  const double tol = c.params.real("tolerance", 1e-9);
  const double lhs = lyapunov_estimate(perturb(a, f, k), w, n, kind);
  const double rhs = lyapunov_estimate(a, w, n, kind) + birkhoff_average(f, w, n) / k;
  const bool ok = std::abs(lhs - rhs) <= tol;
  out.results = {{"n", n}, {"k", k}, {"perturbed", lhs}, {"predicted", rhs}, {"error", std::abs(lhs - rhs)},
                 {"tolerance", tol}, {"verdict", ok}};
  out.table.header = {"n", "k", "perturbed", "predicted", "verdict"};
  out.table.rows.push_back({str(n), str(k), str(lhs), str(rhs), ok ? "true" : "false"});
  return out;
}

EyeParams eye_params(const Params& p) {
  if (p.has("alpha_plus") || p.has("alpha_minus") || p.has("beta_plus") || p.has("beta_minus")) {
    EyeParams e{p.real("alpha_plus", 1.0), p.real("alpha_minus", 1.0), p.real("beta_plus", 1.0),
                p.real("beta_minus", 1.0)};
    e.validate();
    return e;
  }
  return EyeParams::from_ratios(p.real("lambda", 2.0), p.real("sigma", 2.0));
}

Outcome run_boweneye(const Context& c, const std::string& sub) {
  const auto p = eye_params(c.params);
  const double s0 = c.params.real("s0", 1.0);
  const std::size_t cycles = c.params.count("cycles", 20);
  const double transit = c.params.real("transit", 0.0);
  const auto ends = accumulation_endpoints(p);
  Outcome out;
  const json endpoints = {{"mu1", {ends.mu1.a, ends.mu1.b}}, {"mu2", {ends.mu2.a, ends.mu2.b}}};
  if (sub == "trace") {
    const auto trace = sojourn_sequence(p, s0, cycles, transit);
    json entries = json::array();
    out.table.header = {"k", "saddle", "duration", "cumulative"};
    for (const auto& s : trace.entries) {
      const std::string saddle(1, saddle_name(s.saddle));
      entries.push_back({{"k", s.cycle}, {"saddle", saddle}, {"duration", s.duration}, {"cumulative", s.end}});
      out.table.rows.push_back({str(s.cycle), saddle, str(s.duration), str(s.end)});
    }
    out.results = {{"lambda", p.lambda()}, {"sigma", p.sigma()}, {"entries", entries}, {"endpoints", endpoints}};
    return out;
  }
  if (sub == "weights") {
    const auto trace = sojourn_sequence(p, s0, cycles, transit);
    json rows = json::array();
    out.table.header = {"t", "w_a", "w_b"};
    const auto times = c.params.list("t");
    if (times.empty()) {
      out.table.header = {"k", "max_w_a", "min_w_a"};
      for (const auto& e : cycle_extremes(trace)) {
        rows.push_back({{"k", e.cycle}, {"max_w_a", e.max_a}, {"min_w_a", e.min_a}});
        out.table.rows.push_back({str(e.cycle), str(e.max_a), str(e.min_a)});
      }
      out.results = {{"extremes", rows}, {"endpoints", endpoints}};
      return out;
    }
    for (const auto& text : times) {
      const double t = std::stod(text);
      const auto w = time_average_weights(trace, t);
      rows.push_back({{"t", t}, {"w_a", w.a}, {"w_b", w.b}});
      out.table.rows.push_back({str(t), str(w.a), str(w.b)});
    }
    out.results = {{"weights", rows}, {"endpoints", endpoints}};
    return out;
  }
  CoverageOptions co;
  co.grid = c.params.count("grid", 50);
  co.eps = c.params.real("eps", 0.02);
  co.samples_per_sojourn = c.params.count("samples", 256);
  co.transit = transit;
  const auto report = segment_coverage_check(p, s0, cycles, co);
  out.results = report.to_json();
  out.results["endpoints"] = endpoints;
  out.results["verdict"] = report.all_pass;
  out.table.header = {"c", "best", "hit"};
  for (const auto& t : report.targets) out.table.rows.push_back({str(t.c), str(t.best), t.hit ? "true" : "false"});
  return out;
}

Outcome run_accept(const Context& c) {
  AcceptanceOptions options;
  options.threads = c.threads;
  options.seed = c.seed;
  for (const auto& id : c.params.list("only")) options.only.push_back(std::stoi(id));
  const auto report = run_acceptance(options, [](const CriterionResult& r) {
    std::cout << format_criterion_line(r) << std::endl;
  });
  Outcome out;
  out.results = report.to_json();
  out.table.header = {"id", "name", "pass", "detail"};
  for (const auto& r : report.criteria) {
    out.table.rows.push_back({str(r.id), r.name, r.pass ? "true" : "false", r.detail});
  }
  std::cout << (report.all_pass ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
  out.exit_code = report.all_pass ? 0 : kExitAcceptance;
  return out;
}

void emit_error(ErrorKind kind, const std::string& message) {
  const json err = {{"schema_version", kSchemaVersion},
                    {"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kBudgetExceeded || kind == ErrorKind::kCapExceeded ? kExitBudget : kExitValidation;
}

std::vector<OptionDef> options_for(const std::string& group, const std::string& name) {
  using K = Kind;
  if (group == "lang") {
    std::vector<OptionDef> o = {{"n", K::kInt, "word length"}, {"enum_cap", K::kInt, "cap on listed words"}};
    if (name == "count") o.push_back({"list", K::kFlag, "list the words in lexicographic order"});
    if (name == "entropy") {
      o.push_back({"delta", K::kDouble, "certify ratio >= 1 + delta"});
      o.push_back({"window", K::kInt, "rows the certificate must span"});
    }
    return o;
  }
  if (group == "glue") {
    if (name == "min-gap") {
      return {{"w", K::kString, "left word (compact, e.g. p0m)"},
              {"u", K::kString, "right word"},
              {"v_max", K::kInt, "largest gap to try"}};
    }
    if (name == "verify") {
      return {{"w_min", K::kInt, "shortest left word"},   {"w_max", K::kInt, "longest left word"},
              {"u_min", K::kInt, "shortest right word"},  {"u_max", K::kInt, "longest right word"},
              {"pair_budget", K::kInt, "exhaustive limit"}, {"samples", K::kInt, "pairs sampled past the limit"}};
    }
    return {{"n", K::kInt, "word length"},
            {"n_max", K::kInt, "scan n .. n_max"},
            {"f_budget", K::kInt, "longest connector"},
            {"g_budget", K::kInt, "Hamming radius"},
            {"search_budget", K::kInt, "candidate limit"}};
  }
  if (group == "splice") {
    if (name == "plan") {
      return {{"alpha", K::kDouble, "low target"},         {"beta", K::kDouble, "high target"},
              {"tau", K::kDouble, "verification margin"},  {"checkpoints", K::kInt, "number of checkpoints"},
              {"growth", K::kDouble, "segment growth factor"}, {"start_low", K::kFlag, "start with the low block"},
              {"max_length", K::kInt, "length cap"},       {"p_lo", K::kString, "low block"},
              {"p_hi", K::kString, "high block"},          {"observable", K::kString, "observable JSON file"}};
    }
    std::vector<OptionDef> o = {{"program", K::kString, "plan artifact"},
                                {"observable", K::kString, "observable JSON file"}};
    if (name == "verify") {
      o.push_back({"alpha", K::kDouble, "low target"});
      o.push_back({"beta", K::kDouble, "high target"});
      o.push_back({"tau", K::kDouble, "verification margin"});
    }
    return o;
  }
  if (group == "measure") {
    std::vector<OptionDef> o = {{"depth", K::kInt, "cylinder depth"}, {"k", K::kInt, "metric terms K"}};
    if (name == "empirical" || name == "rho" || name == "profile") o.push_back({"word", K::kString, "word or @file"});
    if (name == "empirical" || name == "rho") {
      o.push_back({"n", K::kInt, "number of windows"});
      o.push_back({"periodic", K::kFlag, "treat words as periods"});
    }
    if (name == "rho") {
      o.push_back({"word2", K::kString, "second word or @file"});
      o.push_back({"n2", K::kInt, "windows of the second word"});
    }
    if (name == "profile") o.push_back({"at", K::kList, "checkpoints"});
    if (name == "kappa-check") {
      o.push_back({"periods", K::kList, "periodic words"});
      o.push_back({"observable", K::kString, "observable JSON file"});
    }
    return o;
  }
  if (group == "cocycle") {
    std::vector<OptionDef> o = {{"cocycle", K::kString, "cocycle JSON file"},
                                {"word", K::kString, "word or @file"},
                                {"n", K::kInt, "product length"},
                                {"norm", K::kString, "spectral or frobenius"}};
    if (name == "lyapunov") o.push_back({"n0", K::kInt, "first n of the trace"});
    if (name == "perturb-check") {
      o.push_back({"k", K::kDouble, "perturbation divisor"});
      o.push_back({"observable", K::kString, "observable JSON file"});
      o.push_back({"tolerance", K::kDouble, "identity tolerance"});
    }
    return o;
  }
  if (group == "boweneye") {
    std::vector<OptionDef> o = {{"lambda", K::kDouble, "alpha_minus / beta_plus"},
                                {"sigma", K::kDouble, "beta_minus / alpha_plus"},
                                {"alpha_plus", K::kDouble, "eigenvalue magnitude"},
                                {"alpha_minus", K::kDouble, "eigenvalue magnitude"},
                                {"beta_plus", K::kDouble, "eigenvalue magnitude"},
                                {"beta_minus", K::kDouble, "eigenvalue magnitude"},
                                {"s0", K::kDouble, "first sojourn"},
                                {"cycles", K::kInt, "number of A/B cycles"},
                                {"transit", K::kDouble, "travel time between saddles"}};
    if (name == "weights") o.push_back({"t", K::kList, "times"});
    if (name == "coverage") {
      o.push_back({"grid", K::kInt, "grid points"});
      o.push_back({"eps", K::kDouble, "hit tolerance"});
      o.push_back({"samples", K::kInt, "samples per sojourn"});
    }
    return o;
  }
  return {{"only", K::kList, "criterion ids to run"}};
}

bool uses_spec(const std::string& group) { return group != "boweneye" && group != "accept"; }

bool uses_observable(const std::string& group, const std::string& name) {
  return group == "splice" || (group == "measure" && name == "kappa-check") ||
         (group == "cocycle" && name == "perturb-check");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic averages on symbolic systems"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<unsigned> threads_flag;
  std::optional<std::uint64_t> seed_flag;
  RawOptions raw;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "artifact path (stdout when omitted)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads_flag, "worker threads (default: ERGOLAB_THREADS)");
  app.add_option("--seed", seed_flag, "random seed recorded in the artifact");
  const std::vector<std::pair<std::string, std::string>> spec_flags = {
      {"spec", "subshift: paper|full|sgap|sft or a JSON file"},
      {"kappa", "gap slope of the paper shift, as a fraction"},
      {"alphabet", "alphabet size for full and sft shifts"},
      {"min_run", "shortest zero run of an sgap shift"},
  };
  for (const auto& [key, help] : spec_flags) app.add_option(flag_name(key), raw.scalars[key], help);
  app.add_option("--forbidden", raw.lists["forbidden"], "forbidden words of an SFT");

  const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
      {"lang", {"count", "entropy"}},
      {"glue", {"min-gap", "verify", "app-falsify"}},
      {"splice", {"plan", "build", "verify"}},
      {"measure", {"empirical", "rho", "profile", "kappa-check"}},
      {"cocycle", {"lyapunov", "perturb-check"}},
      {"boweneye", {"trace", "weights", "coverage"}},
  };
  std::vector<Command> commands;
  std::map<std::string, std::map<std::string, std::string>> scalars;
  std::map<std::string, std::map<std::string, std::vector<std::string>>> lists;
  std::map<std::string, std::map<std::string, bool>> flags;
  auto register_options = [&](Command& cmd) {
    const std::string id = cmd.group + "/" + cmd.name;
    for (const auto& def : cmd.options) {
      switch (def.kind) {
        case Kind::kFlag:
          cmd.app->add_flag(flag_name(def.name), flags[id][def.name], def.help);
          break;
        case Kind::kList:
          cmd.app->add_option(flag_name(def.name), lists[id][def.name], def.help);
          break;
        default:
          cmd.app->add_option(flag_name(def.name), scalars[id][def.name], def.help);
      }
    }
  };
  for (const auto& [group, names] : groups) {
    CLI::App* g = app.add_subcommand(group, group + " commands");
    g->require_subcommand(1);
    for (const auto& name : names) {
      Command cmd{group, name, g->add_subcommand(name, group + " " + name), options_for(group, name)};
      register_options(cmd);
      commands.push_back(std::move(cmd));
    }
  }
  {
    Command cmd{"accept", "", app.add_subcommand("accept", "run the acceptance suite"), options_for("accept", "")};
    register_options(cmd);
    commands.push_back(std::move(cmd));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(ErrorKind::kValidation, e.what());
    return kExitValidation;
  }

  const Command* active = nullptr;
  for (const auto& cmd : commands) {
    if (cmd.app->parsed()) active = &cmd;
  }
  if (!active) {
    emit_error(ErrorKind::kValidation, "no subcommand given");
    return kExitValidation;
  }

  try {
    const json config_file = config_path.empty() ? json::object() : read_json_file(config_path);
    if (!config_file.is_object()) throw Error(ErrorKind::kValidation, "config must be a JSON object");

    Context ctx;
    ctx.command = active->name.empty() ? active->group : active->group + " " + active->name;

    // Command parameters: config "params" first, then flags.
    json params = config_file.value("params", json::object());
    if (config_file.contains("budgets")) {
      for (const auto& [k, v] : config_file.at("budgets").items()) params[k] = v;
    }
    const std::string id = active->group + "/" + active->name;
    for (const auto& def : active->options) {
      const auto* opt = active->app->get_option_no_throw(flag_name(def.name));
      if (!opt || opt->count() == 0) continue;
      switch (def.kind) {
        case Kind::kFlag:
          params[def.name] = flags[id][def.name];
          break;
        case Kind::kList:
          params[def.name] = lists[id][def.name];
          break;
        default:
          params[def.name] = convert(def, scalars[id][def.name]);
      }
    }
    json spec_params = json::object();
    for (const std::string key : {"spec", "kappa", "alphabet", "min_run"}) {
      if (app.get_option(flag_name(key))->count() > 0) {
        const OptionDef def{key, key == "alphabet" || key == "min_run" ? Kind::kInt : Kind::kString, ""};
        spec_params[key] = convert(def, raw.scalars[key]);
      }
    }
    if (app.get_option("--forbidden")->count() > 0) spec_params["forbidden"] = raw.lists["forbidden"];

    ctx.params = Params(params);
    ctx.config = {{"command", ctx.command}, {"params", params}};
    if (uses_spec(active->group)) {
      json spec = spec_json_from(Params(spec_params), config_file);
      if (spec.contains("kappa") && !spec.at("kappa").is_string()) {
        throw Error(ErrorKind::kValidation, "kappa must be an exact fraction string such as \"1/4\"");
      }
      SubshiftSpec::from_json(spec);
      ctx.config["spec"] = spec;
    }
    if (uses_observable(active->group, active->name)) ctx.config["observable"] = observable_json_from(ctx.params, config_file);

    ctx.seed = seed_flag ? *seed_flag : config_file.value("seed", kDefaultSeed);
    if (threads_flag) {
      ctx.threads = *threads_flag;
    } else if (const char* env = std::getenv("ERGOLAB_THREADS")) {
      ctx.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    } else {
      ctx.threads = std::max(1u, std::thread::hardware_concurrency());
    }
    if (ctx.threads == 0) ctx.threads = 1;
    if (out_path.empty() && config_file.contains("output")) {
      out_path = config_file.at("output").value("path", "");
      if (!app.get_option("--format")->count()) format = config_file.at("output").value("format", format);
    }

    Outcome outcome;
    const auto& g = active->group;
    if (g == "lang") outcome = run_lang(ctx, active->name);
    if (g == "glue") outcome = run_glue(ctx, active->name);
    if (g == "splice") outcome = run_splice(ctx, active->name);
    if (g == "measure") outcome = run_measure(ctx, active->name);
    if (g == "cocycle") outcome = run_cocycle(ctx, active->name);
    if (g == "boweneye") outcome = run_boweneye(ctx, active->name);
    if (g == "accept") outcome = run_accept(ctx);

    std::string text;
    if (format == "csv") {
      CsvWriter csv(outcome.table.header);
      csv.meta("schema_version", kSchemaVersion);
      csv.meta("tool_version", tool_version());
      csv.meta("command", ctx.command);
      csv.meta("config_hash", config_hash(ctx.config));
      csv.meta("seed", std::to_string(ctx.seed));
      for (const auto& row : outcome.table.rows) csv.row(row);
      text = csv.str();
    } else {
      text = make_artifact(ctx.command, ctx.config, ctx.seed, outcome.results).dump(2) + "\n";
    }
    if (out_path.empty() || out_path == "-") {
      std::cout << text;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) throw Error(ErrorKind::kValidation, "cannot write " + out_path);
      file << text;
    }
    return outcome.exit_code;
  } catch (const Error& e) {
    emit_error(e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    emit_error(ErrorKind::kValidation, e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    emit_error(ErrorKind::kValidation, e.what());
    return kExitValidation;
  }
}
