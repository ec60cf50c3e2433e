#include "ergolab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "ergolab/boweneye.hpp"
#include "ergolab/cocycle.hpp"
#include "ergolab/gluing.hpp"
#include "ergolab/measures.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"
#include "ergolab/shiftspace.hpp"
#include "ergolab/splicer.hpp"

namespace ergolab {

namespace {

const std::vector<Rational> kKappas = {Rational(1, 4), Rational(1, 2), Rational(1, 1)};

std::string fixed(double v, int digits = 6) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

CriterionResult criterion(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

std::vector<std::vector<Word>> legal_words_by_length(const SubshiftSpec& spec, std::size_t max_len,
                                                     unsigned threads) {
  std::vector<std::vector<Word>> out(max_len + 1);
  for (std::size_t n = 1; n <= max_len; ++n) out[n] = count_language(spec, n, true, threads).words;
  return out;
}

// floor(kappa n) + 2 from the fraction directly, not through GapBudget.
std::int64_t expected_witness_gap(const Rational& kappa, std::int64_t n) {
  return kappa.numerator() * n / kappa.denominator() + 2;
}

CriterionResult language_oracle(const AcceptanceOptions& opt) {
  auto r = criterion(1, "language-oracle");
  const std::vector<SubshiftSpec> specs = {SubshiftSpec::full(3), SubshiftSpec::paper(kKappas[0]),
                                           SubshiftSpec::paper(kKappas[1]), SubshiftSpec::paper(kKappas[2]),
                                           SubshiftSpec::sgap(2)};
  constexpr std::size_t kMaxN = 12;
  const std::size_t tasks = specs.size() * kMaxN;
  const auto naive = parallel_map<std::uint64_t>(tasks, opt.threads, [&](std::size_t t) {
    return oracle::naive_count(specs[t / kMaxN], t % kMaxN + 1);
  });
  r.pass = true;
  std::size_t mismatches = 0;
  r.data = nlohmann::json::array();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<std::uint64_t> dfs_counts;
    std::vector<std::uint64_t> naive_counts;
    for (std::size_t n = 1; n <= kMaxN; ++n) {
      const auto dfs = count_language(specs[s], n, false, opt.threads).count;
      dfs_counts.push_back(dfs);
      naive_counts.push_back(naive[s * kMaxN + n - 1]);
      if (dfs != naive_counts.back()) ++mismatches;
    }
    r.data.push_back({{"spec", specs[s].describe()}, {"dfs", dfs_counts}, {"naive", naive_counts}});
  }
  r.pass = mismatches == 0;
  r.detail = std::to_string(specs.size() * kMaxN - mismatches) + "/" + std::to_string(specs.size() * kMaxN) +
             " counts match the brute-force oracle (n <= 12, 5 specs)";
  return r;
}

struct PairCheck {
  std::uint64_t pairs = 0;
  std::uint64_t bound_failures = 0;
  std::uint64_t oracle_mismatches = 0;
};

CriterionResult minimal_gap_law(const AcceptanceOptions& opt) {
  auto r = criterion(2, "minimal-gap-law");
  r.data = nlohmann::json::array();
  bool pass = true;
  std::uint64_t total_pairs = 0;
  for (const auto& kappa : kKappas) {
    const auto spec = SubshiftSpec::paper(kappa);
    const auto& budget = spec.as_paper()->budget;

    std::vector<std::int64_t> witness_gaps;
    bool witness_ok = true;
    for (std::int64_t n = 1; n <= 30; ++n) {
      const Word u = Word::repeat(-1, static_cast<std::size_t>(n));
      const auto g = minimal_gap(spec, Word{1}, u, 1000);
      const auto scan = oracle::scan_minimal_gap(spec, Word{1}, u, 1000);
      const std::int64_t expected = expected_witness_gap(kappa, n);
      witness_ok = witness_ok && g && scan && *g == expected && *scan == expected;
      witness_gaps.push_back(g ? *g : -1);
    }

    const auto words = legal_words_by_length(spec, 8, opt.threads);
    std::vector<const Word*> flat;
    for (std::size_t n = 1; n <= 8; ++n) {
      for (const auto& w : words[n]) flat.push_back(&w);
    }
    const auto checks = parallel_map<PairCheck>(flat.size(), opt.threads, [&](std::size_t i) {
      PairCheck c;
      const Word& w = *flat[i];
      for (std::size_t n = 1; n <= 8; ++n) {
        const std::int64_t bound = 1 + budget.m(static_cast<std::int64_t>(n));
        for (const auto& u : words[n]) {
          ++c.pairs;
          Word glued(w);
          glued.append(0, static_cast<std::size_t>(bound)).append(u);
          const auto fast = minimal_gap(spec, w, u, bound);
          const auto slow = oracle::scan_minimal_gap(spec, w, u, bound);
          if (!oracle::naive_is_legal(spec, glued) || !fast || *fast > bound) ++c.bound_failures;
          if (fast != slow) ++c.oracle_mismatches;
        }
      }
      return c;
    });
    PairCheck sum;
    for (const auto& c : checks) {
      sum.pairs += c.pairs;
      sum.bound_failures += c.bound_failures;
      sum.oracle_mismatches += c.oracle_mismatches;
    }

    VerifyOptions vo;
    vo.threads = opt.threads;
    const auto report = verify_m_transitivity(spec, vo);
    const bool sweep_ok = report.exhaustive && report.failures.empty();

    pass = pass && witness_ok && sum.bound_failures == 0 && sum.oracle_mismatches == 0 && sweep_ok;
    total_pairs += sum.pairs;
    nlohmann::json max_gaps = nlohmann::json::array();
    for (const auto& row : report.per_length) max_gaps.push_back(row.max_gap);
    r.data.push_back({{"kappa", to_string(kappa)},
                      {"witness_gaps", witness_gaps},
                      {"witness_ok", witness_ok},
                      {"pairs", sum.pairs},
                      {"bound_failures", sum.bound_failures},
                      {"oracle_mismatches", sum.oracle_mismatches},
                      {"sweep_exhaustive", report.exhaustive},
                      {"sweep_failures", report.failures.size()},
                      {"max_gap_by_u_length", max_gaps}});
  }
  r.pass = pass;
  r.detail = "gap((1), (-1)^n) = floor(kappa n) + 2 for n <= 30; " + std::to_string(total_pairs) +
             " legal pairs with |w|,|u| <= 8 glue within 1 + m(|u|)";
  return r;
}

CriterionResult gap_asymptotics(const AcceptanceOptions& opt) {
  auto r = criterion(3, "gap-asymptotics");
  r.data = nlohmann::json::array();
  bool pass = true;
  std::ostringstream detail;
  for (const auto& kappa : kKappas) {
    const auto spec = SubshiftSpec::paper(kappa);
    const double k = to_double(kappa);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n : {8u, 16u}) {
      VerifyOptions vo;
      vo.w_min_length = 1;
      vo.w_max_length = 8;
      vo.u_min_length = n;
      vo.u_max_length = n;
      vo.threads = opt.threads;
      const auto report = verify_m_transitivity(spec, vo);
      const double ratio = report.per_length.at(0).max_ratio;
      const double tol = 2.0 / static_cast<double>(n);
      const bool ok = report.exhaustive && report.failures.empty() && std::abs(ratio - k) <= tol;
      pass = pass && ok;
      rows.push_back({{"u_length", n},
                      {"pairs", report.pairs_tested},
                      {"max_gap", report.per_length.at(0).max_gap},
                      {"max_ratio", ratio},
                      {"tolerance", tol},
                      {"ok", ok}});
    }
    const auto g = minimal_gap(spec, Word{1}, Word::repeat(-1, 200), 1000);
    const double ratio200 = g ? static_cast<double>(*g) / 200.0 : -1.0;
    const bool ok200 = g && std::abs(ratio200 - k) <= 0.05;
    pass = pass && ok200;
    rows.push_back({{"u_length", 200}, {"witness_gap", g ? *g : -1}, {"max_ratio", ratio200}, {"tolerance", 0.05},
                    {"ok", ok200}});
    r.data.push_back({{"kappa", to_string(kappa)}, {"rows", rows}});
    detail << "kappa=" << to_string(kappa) << " ratio@200=" << fixed(ratio200) << " ";
  }
  r.pass = pass;
  r.detail = detail.str() + "(|ratio - kappa| <= 2/n at n = 8, 16 exhaustive)";
  return r;
}

CriterionResult positive_entropy(const AcceptanceOptions& opt) {
  auto r = criterion(4, "positive-entropy");
  const auto paper = SubshiftSpec::paper(Rational(1));
  const auto sgap = SubshiftSpec::sgap(2);
  std::vector<std::uint64_t> pc(18, 0);
  std::vector<std::uint64_t> sc(17, 0);
  for (std::size_t n = 1; n <= 17; ++n) pc[n] = count_language(paper, n, false, opt.threads).count;
  for (std::size_t n = 1; n <= 16; ++n) sc[n] = count_language(sgap, n, false, opt.threads).count;
  bool ratios_ok = true;
  double min_ratio = 1e300;
  for (std::size_t n = 10; n <= 16; ++n) {
    const double ratio = static_cast<double>(pc[n + 1]) / static_cast<double>(pc[n]);
    min_ratio = std::min(min_ratio, ratio);
    ratios_ok = ratios_ok && ratio >= 1.3;
  }
  bool dominates = true;
  for (std::size_t n = 1; n <= 16; ++n) dominates = dominates && pc[n] >= sc[n];
  const double root = oracle::sgap_growth_root(2);
  const double sgap_ratio = static_cast<double>(sc[16]) / static_cast<double>(sc[15]);
  const bool root_ok = std::abs(sgap_ratio - root) <= 0.02;
  r.pass = ratios_ok && dominates && root_ok;
  r.data = {{"paper_counts", std::vector<std::uint64_t>(pc.begin() + 1, pc.end())},
            {"sgap_counts", std::vector<std::uint64_t>(sc.begin() + 1, sc.end())},
            {"min_ratio_10_16", min_ratio},
            {"dominates_sgap", dominates},
            {"sgap_ratio_16", sgap_ratio},
            {"cubic_root", root}};
  r.detail = "min ratio " + fixed(min_ratio) + " (>= 1.3), SGap(2) ratio " + fixed(sgap_ratio) + " vs root " +
             fixed(root) + (dominates ? ", counts dominate SGap(2)" : ", SGap(2) NOT dominated");
  return r;
}

CriterionResult app_falsification(const AcceptanceOptions& opt) {
  auto r = criterion(5, "app-falsification");
  const auto spec = SubshiftSpec::paper(Rational(1));
  AppSearchOptions ao;
  ao.threads = opt.threads;
  const auto main = app_falsifier(spec, 20, 1, 1, ao);
  const auto control = app_falsifier(spec, 4, 12, 0, ao);
  bool control_legal = false;
  nlohmann::json control_json = nullptr;
  if (control) {
    Word glued = control->w_hat;
    glued.append(control->connector).append(control->u_hat);
    control_legal = oracle::naive_is_legal(spec, glued);
    control_json = {{"w_hat", to_compact(control->w_hat)},
                    {"connector", to_compact(control->connector)},
                    {"u_hat", to_compact(control->u_hat)}};
  }
  r.pass = !main && control && control_legal;
  r.data = {{"n20_f1_g1_witness", main ? nlohmann::json(to_compact(main->connector)) : nlohmann::json(nullptr)},
            {"control_n4_f12_g0", control_json},
            {"control_legal", control_legal}};
  r.detail = std::string(main ? "unexpected witness at n=20, f=1, g=1" : "no witness at n=20, f=1, g=1") +
             (control ? "; control found " + to_compact(control->w_hat) + "|" + to_compact(control->connector) +
                            "|" + to_compact(control->u_hat)
                      : "; control found nothing");
  return r;
}

Word random_legal_word(const SubshiftSpec& spec, Rng& rng, std::size_t max_len) {
  const Alphabet& a = spec.alphabet();
  while (true) {
    const std::size_t len = 1 + static_cast<std::size_t>(rng.below(max_len));
    Word w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(a.symbol(static_cast<std::size_t>(rng.below(a.size()))));
    if (oracle::naive_is_legal(spec, w)) return w;
  }
}

CriterionResult periodic_density(const AcceptanceOptions& opt) {
  auto r = criterion(6, "periodic-density");
  Rng rng(opt.seed ^ 0x6a09e667f3bcc908ULL);
  r.data = nlohmann::json::array();
  std::size_t failures = 0;
  std::size_t total = 0;
  for (const auto& kappa : kKappas) {
    const auto spec = SubshiftSpec::paper(kappa);
    const auto& budget = spec.as_paper()->budget;
    std::size_t ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Word w = random_legal_word(spec, rng, 10);
      const auto v = static_cast<std::size_t>(1 + budget.m(static_cast<std::int64_t>(w.size())));
      Word period(w);
      period.append(0, v);
      const bool fast = periodic_point_legal(spec, w, v);
      const bool slow = oracle::naive_is_legal(spec, repeat_word(period, 4));
      if (fast && slow) ++ok;
      ++total;
    }
    failures += 200 - ok;
    r.data.push_back({{"kappa", to_string(kappa)}, {"words", 200}, {"periodic_legal", ok}});
  }
  r.pass = failures == 0;
  r.detail = std::to_string(total - failures) + "/" + std::to_string(total) +
             " random legal words give legal periodic points w 0^{1+m(|w|)}";
  return r;
}

CriterionResult splicer_oscillation(const AcceptanceOptions&) {
  auto r = criterion(7, "splicer-oscillation");
  const Rational kappa(1, 4);
  const auto spec = SubshiftSpec::paper(kappa);
  constexpr double kGrowth = 10.0;
  constexpr double kLevel = 0.7;
  OscillationSpec osc{CylinderFunction::coordinate(spec.alphabet()), -0.75, 0.75, 0.05, 6, kGrowth};
  const auto program = plan_oscillation(spec, osc, Word{-1}, Word{1});
  const Word w = build_point(spec, program);
  const bool legal = oracle::naive_is_legal(spec, w);
  const auto report = verify_oscillation(w, osc, program.checkpoints);

  bool alternates = report.checkpoints.size() == 6;
  std::vector<double> averages;
  for (const auto& c : report.checkpoints) {
    averages.push_back(c.average);
    alternates = alternates && (c.scheduled_high ? c.average > kLevel : c.average < -kLevel);
  }
  bool growth_ok = true;
  for (std::size_t k = 1; k < program.segments.size(); ++k) {
    growth_ok = growth_ok && static_cast<double>(program.segments[k].length()) >=
                                 kGrowth * static_cast<double>(program.checkpoints[k - 1]);
  }

  // After the opening all-ones segment, no running average leaves the reach
  // 1/(1+kappa) by more than 1/G.
  OscillationSpec later = osc;
  later.start_high = false;
  const std::vector<std::uint64_t> tail(program.checkpoints.begin() + 1, program.checkpoints.end());
  const auto tail_report = verify_oscillation(w, later, tail);
  const double reach = 1.0 / (1.0 + to_double(kappa)) + 1.0 / kGrowth;
  const bool reach_ok = tail_report.realized.hi <= reach && tail_report.realized.lo >= -reach;

  const auto bounds = check_averaging_bound(w, osc.f, program, 1e-9);
  bool bound_ok = bounds.size() == program.segments.size();
  double worst_slack = 1e300;
  for (const auto& b : bounds) {
    bound_ok = bound_ok && b.holds;
    worst_slack = std::min(worst_slack, b.bound - b.deviation);
  }

  r.pass = legal && alternates && growth_ok && reach_ok && bound_ok;
  r.data = {{"program", program.to_json()},
            {"length", w.size()},
            {"averages", averages},
            {"naive_legal", legal},
            {"alternates", alternates},
            {"growth_ok", growth_ok},
            {"realized_after_first", {tail_report.realized.lo, tail_report.realized.hi}},
            {"reach_ok", reach_ok},
            {"averaging_bound_ok", bound_ok},
            {"averaging_bound_min_slack", worst_slack}};
  std::ostringstream detail;
  detail << "length " << w.size() << ", averages";
  for (double a : averages) detail << ' ' << fixed(a, 4);
  detail << (legal ? ", legal" : ", ILLEGAL") << (bound_ok ? ", averaging bound holds" : ", averaging bound FAILS");
  r.detail = detail.str();
  return r;
}

Matrix random_invertible(Rng& rng, int d) {
  while (true) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    }
    if (std::abs(m.determinant()) >= 1e-3) return m;
  }
}

CylinderFunction random_function(Rng& rng, const Alphabet& a, std::size_t window) {
  std::vector<double> values(power_checked(a.size(), window, 1u << 20));
  for (auto& v : values) v = rng.uniform(-1.0, 1.0);
  return CylinderFunction(a, window, std::move(values));
}

CocycleSpec random_cocycle(Rng& rng, const Alphabet& a, int d, std::size_t window) {
  std::vector<Matrix> table;
  for (std::size_t i = 0; i < power_checked(a.size(), window, 1u << 20); ++i) table.push_back(random_invertible(rng, d));
  return CocycleSpec(a, d, window, std::move(table));
}

Word random_word(Rng& rng, const Alphabet& a, std::size_t n) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(a.symbol(static_cast<std::size_t>(rng.below(a.size()))));
  return w;
}

CriterionResult cocycle_identities(const AcceptanceOptions& opt) {
  auto r = criterion(8, "cocycle-identities");
  Rng rng(opt.seed ^ 0xbb67ae8584caa73bULL);
  const Alphabet a = Alphabet::signed_ternary();
  constexpr double kTol = 1e-9;
  constexpr std::size_t kN = 1000;

  double scalar_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_function(rng, a, 1 + rng.below(3));
    const int d = 1 + static_cast<int>(rng.below(3));
    const Word w = random_word(rng, a, kN + f.window() - 1);
    const double chi = lyapunov_estimate(scalar_cocycle(f, d), w, kN);
    scalar_err = std::max(scalar_err, std::abs(chi - oracle::naive_birkhoff_average(f, w, kN)));
  }

  double perturb_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto A = random_cocycle(rng, a, d, 1 + rng.below(2));
    const auto f = random_function(rng, a, 1 + rng.below(2));
    const double k = static_cast<double>(1 + rng.below(10));
    const std::size_t window = std::max(A.window(), f.window());
    const Word w = random_word(rng, a, kN + window - 1);
    const double lhs = lyapunov_estimate(perturb(A, f, k), w, kN);
    const double rhs = lyapunov_estimate(A, w, kN) + oracle::naive_birkhoff_average(f, w, kN) / k;
    perturb_err = std::max(perturb_err, std::abs(lhs - rhs));
  }

  double worst_excess = -1e300;
  std::size_t split_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(2));
    const auto A = random_cocycle(rng, a, d, 1 + rng.below(2));
    const std::size_t m = 1 + rng.below(250);
    const std::size_t n = 1 + rng.below(250);
    const Word w = random_word(rng, a, m + n + A.window() - 1);
    const double whole = log_norm_product(A, w, 0, m + n);
    const double parts = log_norm_product(A, w, 0, m) + log_norm_product(A, w, m, n);
    worst_excess = std::max(worst_excess, whole - parts);
    if (whole > parts + kTol) ++split_failures;
  }

  r.pass = scalar_err <= kTol && perturb_err <= kTol && split_failures == 0;
  r.data = {{"scalar_max_error", scalar_err},
            {"perturb_max_error", perturb_err},
            {"subadditive_failures", split_failures},
            {"subadditive_worst_excess", worst_excess}};
  r.detail = "scalar err " + fixed(scalar_err, 3) + ", perturbation err " + fixed(perturb_err, 3) + ", " +
             std::to_string(100 - split_failures) + "/100 subadditive splits";
  return r;
}

CriterionResult bowen_eye(const AcceptanceOptions&) {
  auto r = criterion(9, "bowen-eye");
  const auto p = EyeParams::from_ratios(2.0, 2.0);
  const auto trace = sojourn_sequence(p, 1.0, 20);
  const auto late = cycle_extremes(trace).back();
  const auto ends = accumulation_endpoints(p);
  const bool max_ok = std::abs(late.max_a - 2.0 / 3.0) <= 1e-3;
  const bool min_ok = std::abs(late.min_a - 1.0 / 3.0) <= 1e-3;
  CoverageOptions co;
  co.grid = 50;
  co.eps = 0.02;
  const auto coverage = segment_coverage_check(p, 1.0, 20, co);
  r.pass = max_ok && min_ok && coverage.all_pass;
  r.data = {{"cycle", late.cycle},
            {"max_w_a", late.max_a},
            {"min_w_a", late.min_a},
            {"mu1", {ends.mu1.a, ends.mu1.b}},
            {"mu2", {ends.mu2.a, ends.mu2.b}},
            {"coverage_misses", coverage.misses}};
  r.detail = "cycle 20: max w_A " + fixed(late.max_a, 8) + ", min w_A " + fixed(late.min_a, 8) + ", coverage " +
             std::to_string(co.grid - coverage.misses) + "/" + std::to_string(co.grid);
  return r;
}

CriterionResult metric_properties(const AcceptanceOptions& opt) {
  auto r = criterion(10, "metric-properties");
  Rng rng(opt.seed ^ 0x3c6ef372fe94f82bULL);
  const Alphabet a = Alphabet::signed_ternary();
  const MetricTruncation trunc(16);
  const std::size_t depth = trunc.required_depth(a);
  const double slack = 2.0 * trunc.tail();
  auto random_measure = [&] {
    const std::size_t n = 10 + rng.below(190);
    return empirical_measure(random_word(rng, a, n + depth - 1), n, depth, a);
  };
  std::size_t asym = 0;
  std::size_t triangle = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 500; ++trial) {
    const auto mu = random_measure();
    const auto nu = random_measure();
    const auto la = random_measure();
    const double mn = rho_distance(mu, nu, trunc).value;
    if (mn != rho_distance(nu, mu, trunc).value) ++asym;
    const double excess = rho_distance(mu, la, trunc).value - mn - rho_distance(nu, la, trunc).value;
    worst = std::max(worst, excess);
    if (excess > slack) ++triangle;
  }
  const MetricTruncation k3(3);
  const std::size_t d3 = k3.required_depth(a);
  const double example = rho_distance(periodic_measure(Word{1}, d3, a), periodic_measure(Word{-1}, d3, a), k3).value;
  r.pass = asym == 0 && triangle == 0 && example == 0.625;
  r.data = {{"triples", 500},
            {"asymmetric", asym},
            {"triangle_failures", triangle},
            {"worst_triangle_excess", worst},
            {"point_mass_example", example}};
  r.detail = std::to_string(500 - asym) + "/500 symmetric, " + std::to_string(500 - triangle) +
             "/500 triangle within 2^-15, example rho = " + fixed(example, 17);
  return r;
}

using CriterionFn = CriterionResult (*)(const AcceptanceOptions&);

const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> fns = {language_oracle,     minimal_gap_law,   gap_asymptotics,
                                               positive_entropy,    app_falsification, periodic_density,
                                               splicer_oscillation, cocycle_identities, bowen_eye,
                                               metric_properties};
  return fns;
}

bool selected(const AcceptanceOptions& opt, int id) {
  return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
}

CriterionResult run_one(CriterionFn fn, int id, const AcceptanceOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn(opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion-" + std::to_string(id);
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json criterion_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}};
}

}  // namespace

nlohmann::json AcceptanceReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& c : criteria) rows.push_back(criterion_json(c));
  return {{"criteria", rows}, {"all_pass", all_pass}};
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options, const CriterionCallback& on_result) {
  AcceptanceReport report;
  report.all_pass = true;
  auto record = [&](CriterionResult r) {
    if (on_result) on_result(r);
    report.all_pass = report.all_pass && r.pass;
    report.criteria.push_back(std::move(r));
  };

  nlohmann::json first = nlohmann::json::array();
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected(options, id)) continue;
    auto r = run_one(criteria()[i], id, options);
    first.push_back(criterion_json(r));
    record(std::move(r));
  }

  if (selected(options, 11)) {
    auto r = criterion(11, "determinism");
    const auto start = std::chrono::steady_clock::now();
    if (!options.check_thread_invariance) {
      r.pass = false;
      r.detail = "skipped: thread-invariance rerun disabled";
    } else {
      // Always 1 versus 8 threads, so the artifact does not depend on the
      // caller's thread count; the first pass is reused when it matches.
      auto rerun = [&](unsigned threads) {
        AcceptanceOptions other = options;
        other.threads = threads;
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t i = 0; i < criteria().size(); ++i) {
          const int id = static_cast<int>(i) + 1;
          if (!selected(options, id)) continue;
          out.push_back(criterion_json(run_one(criteria()[i], id, other)));
        }
        return out.dump();
      };
      const std::string a = options.threads == 1 ? first.dump() : rerun(1);
      const std::string b = options.threads == 8 ? first.dump() : rerun(8);
      r.pass = a == b && first.dump() == a;
      r.data = {{"compared_threads", {1, 8}}, {"bytes", a.size()}, {"identical", r.pass}};
      r.detail = std::string("criteria 1-10 at 1 and 8 threads: ") + (r.pass ? "byte-identical" : "DIFFERENT") +
                 " (" + std::to_string(a.size()) + " bytes)";
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record(std::move(r));
  }
  return report;
}

std::string format_criterion_line(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << fixed(r.seconds, 3) << "s): "
      << r.detail;
  return out.str();
}

}  // namespace ergolab
