#include "ergolab/gluing.hpp"

#include <algorithm>

#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"

namespace ergolab {

TailProfile tail_profile(WordView w) {
  TailProfile p;
  const auto n = static_cast<std::int64_t>(w.size());
  std::int64_t i = n - 1;
  while (i >= 0 && w[static_cast<std::size_t>(i)] == 0) --i;
  p.trailing_zeros = n - 1 - i;
  if (i < 0) return p;
  p.has_nonzero = true;
  p.last_sign = w[static_cast<std::size_t>(i)] > 0 ? 1 : -1;
  const std::int64_t run_end = i;
  while (i >= 0 && w[static_cast<std::size_t>(i)] != 0) --i;
  p.last_run = run_end - i;
  const std::int64_t gap_end = i;
  while (i >= 0 && w[static_cast<std::size_t>(i)] == 0) --i;
  p.gap_before_last_run = gap_end - i;
  p.gap_flanked = i >= 0 && p.gap_before_last_run > 0;
  return p;
}

HeadProfile head_profile(WordView w) {
  HeadProfile p;
  const std::size_t n = w.size();
  std::size_t i = 0;
  while (i < n && w[i] == 0) ++i;
  p.leading_zeros = static_cast<std::int64_t>(i);
  if (i == n) return p;
  p.has_nonzero = true;
  p.first_sign = w[i] > 0 ? 1 : -1;
  const std::size_t start = i;
  while (i < n && w[i] != 0) ++i;
  p.first_run = static_cast<std::int64_t>(i - start);
  return p;
}

namespace {

bool zero_free(WordView block) {
  return std::none_of(block.begin(), block.end(), [](Symbol s) { return s == 0; });
}

}  // namespace

TailProfile tail_profile_repeated(WordView block, std::uint64_t reps) {
  if (reps == 0 || block.empty()) return {};
  if (zero_free(block)) {
    TailProfile p = tail_profile(block);
    p.last_run = static_cast<std::int64_t>(block.size() * reps);
    return p;
  }
  // With a zero inside the block, the last run and the gap before it lie in
  // the last two copies.
  TailProfile p = tail_profile(repeat_word(block, std::min<std::uint64_t>(reps, 3)));
  if (!p.has_nonzero) p.trailing_zeros = static_cast<std::int64_t>(block.size() * reps);
  return p;
}

HeadProfile head_profile_repeated(WordView block, std::uint64_t reps) {
  if (reps == 0 || block.empty()) return {};
  HeadProfile p = head_profile(block);
  if (!p.has_nonzero) {
    p.leading_zeros = static_cast<std::int64_t>(block.size() * reps);
  } else if (zero_free(block)) {
    p.first_run = static_cast<std::int64_t>(block.size() * reps);
  }
  return p;
}

std::int64_t paper_junction_gap(const GapBudget& budget, const TailProfile& left, const HeadProfile& right) {
  if (!left.has_nonzero || !right.has_nonzero) return 0;
  const std::int64_t need = budget.m(right.first_run) + 1;
  const std::int64_t existing = left.trailing_zeros + right.leading_zeros;
  if (existing > 0) return std::max<std::int64_t>(0, need - existing);
  // v = 0 merges the two boundary runs into one of length last_run + first_run.
  const bool adjacent_ok =
      left.last_sign == right.first_sign &&
      !(left.gap_flanked && left.gap_before_last_run <= budget.m(left.last_run + right.first_run));
  return adjacent_ok ? 0 : need;
}

std::optional<std::int64_t> minimal_gap(const SubshiftSpec& spec, WordView w, WordView u, std::int64_t v_max) {
  if (v_max < 0) throw Error(ErrorKind::kValidation, "v_max must be nonnegative");
  if (!is_legal(spec, w)) throw Error(ErrorKind::kIllegalInput, "left word " + to_compact(w) + " is illegal");
  if (!is_legal(spec, u)) throw Error(ErrorKind::kIllegalInput, "right word " + to_compact(u) + " is illegal");
  if (spec.is_full()) return 0;
  if (const auto* paper = spec.as_paper()) {
    const auto gap = paper_junction_gap(paper->budget, tail_profile(w), head_profile(u));
    if (gap > v_max) return std::nullopt;
    return gap;
  }
  // Forbidden patterns span at most `radius` symbols, so only that much
  // context on either side of the junction matters.
  const std::size_t radius = spec.context_radius();
  const WordView tail = w.subspan(w.size() - std::min(w.size(), radius));
  const WordView head = u.first(std::min(u.size(), radius));
  for (std::int64_t v = 0; v <= v_max; ++v) {
    Word glued(tail);
    glued.append(0, static_cast<std::size_t>(v)).append(head);
    if (is_legal(spec, glued)) return v;
  }
  return std::nullopt;
}

nlohmann::json GlueReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& r : per_length) {
    rows.push_back({{"u_length", r.u_length},
                    {"pairs", r.pairs},
                    {"max_gap", r.max_gap},
                    {"max_ratio", r.max_ratio},
                    {"bound", r.bound}});
  }
  auto witness_json = [](const std::vector<GapWitness>& list) {
    auto arr = nlohmann::json::array();
    for (const auto& g : list) {
      arr.push_back({{"w", to_compact(g.w)}, {"u", to_compact(g.u)}, {"gap", g.gap}});
    }
    return arr;
  };
  return {{"pairs_tested", pairs_tested},
          {"max_min_gap", max_min_gap},
          {"exhaustive", exhaustive},
          {"per_length", rows},
          {"witnesses", witness_json(witnesses)},
          {"failures", witness_json(failures)}};
}

namespace {

constexpr std::size_t kMaxRecordedFailures = 64;

struct Candidate {
  Word word;
  TailProfile tail;
  HeadProfile head;
};

std::vector<Candidate> legal_words(const SubshiftSpec& spec, std::size_t min_len, std::size_t max_len,
                                   unsigned threads) {
  std::vector<Candidate> out;
  for (std::size_t n = min_len; n <= max_len; ++n) {
    for (auto& w : count_language(spec, n, true, threads).words) {
      Candidate c{std::move(w), {}, {}};
      c.tail = tail_profile(c.word);
      c.head = head_profile(c.word);
      out.push_back(std::move(c));
    }
  }
  return out;
}

struct PairOutcome {
  std::int64_t gap = -1;  // -1: no gap found
  bool violates = false;
};

class PairChecker {
 public:
  explicit PairChecker(const SubshiftSpec& spec) : spec_(spec) {}

  PairOutcome check(const Candidate& w, const Candidate& u) const {
    PairOutcome out;
    const auto u_len = static_cast<std::int64_t>(u.word.size());
    if (const auto* paper = spec_.as_paper()) {
      out.gap = paper_junction_gap(paper->budget, w.tail, u.head);
      out.violates = out.gap > 1 + paper->budget.m(u_len);
      return out;
    }
    const auto radius = static_cast<std::int64_t>(spec_.context_radius());
    const auto gap = minimal_gap(spec_, w.word, u.word, 2 * radius + u_len + 1);
    out.gap = gap ? *gap : -1;
    out.violates = !gap;
    return out;
  }

  std::int64_t bound(std::size_t u_len) const {
    if (const auto* paper = spec_.as_paper()) return 1 + paper->budget.m(static_cast<std::int64_t>(u_len));
    return -1;
  }

 private:
  const SubshiftSpec& spec_;
};

struct RowAccumulator {
  std::uint64_t pairs = 0;
  std::int64_t max_gap = -1;
  std::size_t arg_w = 0;
  std::size_t arg_u = 0;
  std::vector<std::pair<std::size_t, std::size_t>> failures;
  std::vector<std::int64_t> failure_gaps;

  void record(std::size_t wi, std::size_t ui, const PairOutcome& o) {
    ++pairs;
    if (o.gap > max_gap) {
      max_gap = o.gap;
      arg_w = wi;
      arg_u = ui;
    }
    if (o.violates && failures.size() < kMaxRecordedFailures) {
      failures.emplace_back(wi, ui);
      failure_gaps.push_back(o.gap);
    }
  }

  void merge(const RowAccumulator& other) {
    pairs += other.pairs;
    if (other.max_gap > max_gap) {
      max_gap = other.max_gap;
      arg_w = other.arg_w;
      arg_u = other.arg_u;
    }
    for (std::size_t i = 0; i < other.failures.size() && failures.size() < kMaxRecordedFailures; ++i) {
      failures.push_back(other.failures[i]);
      failure_gaps.push_back(other.failure_gaps[i]);
    }
  }
};

}  // namespace

GlueReport verify_m_transitivity(const SubshiftSpec& spec, const VerifyOptions& options) {
  if (options.w_min_length > options.w_max_length || options.u_min_length > options.u_max_length ||
      options.u_min_length == 0) {
    throw Error(ErrorKind::kValidation, "invalid length ranges for gluing verification");
  }
  const auto ws = legal_words(spec, options.w_min_length, options.w_max_length, options.threads);
  const auto us = legal_words(spec, options.u_min_length, options.u_max_length, options.threads);
  const PairChecker checker(spec);
  const std::size_t rows = options.u_max_length - options.u_min_length + 1;

  GlueReport report;
  std::vector<RowAccumulator> acc(rows);
  const auto total_pairs = static_cast<std::uint64_t>(ws.size()) * us.size();
  report.exhaustive = total_pairs <= options.pair_budget;

  if (report.exhaustive) {
    auto parts = parallel_map<RowAccumulator>(us.size(), options.threads, [&](std::size_t ui) {
      RowAccumulator a;
      for (std::size_t wi = 0; wi < ws.size(); ++wi) a.record(wi, ui, checker.check(ws[wi], us[ui]));
      return a;
    });
    for (std::size_t ui = 0; ui < us.size(); ++ui) {
      acc[us[ui].word.size() - options.u_min_length].merge(parts[ui]);
    }
  } else if (!ws.empty() && !us.empty()) {
    Rng rng(options.seed);
    for (std::uint64_t s = 0; s < options.samples; ++s) {
      const std::size_t wi = rng.below(ws.size());
      const std::size_t ui = rng.below(us.size());
      acc[us[ui].word.size() - options.u_min_length].record(wi, ui, checker.check(ws[wi], us[ui]));
    }
  }

  for (std::size_t r = 0; r < rows; ++r) {
    const auto& a = acc[r];
    LengthRow row;
    row.u_length = options.u_min_length + r;
    row.pairs = a.pairs;
    row.max_gap = std::max<std::int64_t>(a.max_gap, 0);
    row.max_ratio = static_cast<double>(row.max_gap) / static_cast<double>(row.u_length);
    row.bound = checker.bound(row.u_length);
    report.per_length.push_back(row);
    report.pairs_tested += a.pairs;
    if (a.pairs > 0) {
      report.max_min_gap = std::max(report.max_min_gap, row.max_gap);
      report.witnesses.push_back({ws[a.arg_w].word, us[a.arg_u].word, row.max_gap});
    }
    for (std::size_t i = 0; i < a.failures.size() && report.failures.size() < kMaxRecordedFailures; ++i) {
      const auto [wi, ui] = a.failures[i];
      report.failures.push_back({ws[wi].word, us[ui].word, a.failure_gaps[i]});
    }
  }
  return report;
}

namespace {

void choose_changes(const SubshiftSpec& spec, Word& current, std::size_t from, std::size_t changes_left,
                    std::vector<Word>& out) {
  if (changes_left == 0) {
    if (is_legal(spec, current)) out.push_back(current);
    return;
  }
  for (std::size_t p = from; p + changes_left <= current.size(); ++p) {
    const Symbol original = current[p];
    for (Symbol s : spec.alphabet().symbols()) {
      if (s == original) continue;
      current[p] = s;
      choose_changes(spec, current, p + 1, changes_left - 1, out);
    }
    current[p] = original;
  }
}

// Legal words within Hamming distance g of `base`, ordered by distance, then
// by the changed positions, then by replacement symbols.
std::vector<Word> hamming_ball(const SubshiftSpec& spec, const Word& base, std::size_t g) {
  std::vector<Word> out;
  Word current = base;
  for (std::size_t d = 0; d <= g && d <= base.size(); ++d) choose_changes(spec, current, 0, d, out);
  return out;
}

double binomial_ball(std::size_t n, std::size_t g, std::size_t k) {
  double total = 0.0;
  double c = 1.0;
  double per = 1.0;
  for (std::size_t d = 0; d <= g && d <= n; ++d) {
    if (d > 0) {
      c = c * static_cast<double>(n - d + 1) / static_cast<double>(d);
      per *= static_cast<double>(k - 1);
    }
    total += c * per;
  }
  return total;
}

struct ConnectorSearch {
  const SubshiftSpec& spec;
  const std::vector<Word>& u_hats;
  std::vector<Symbol> connector;

  // Connectors of exactly `length` symbols in lexicographic order.
  bool search(const LegalityTracker& tracker, std::size_t length, AppWitness& found) {
    if (connector.size() == length) {
      for (const auto& u : u_hats) {
        LegalityTracker t = tracker;
        bool ok = true;
        for (Symbol s : u.symbols()) {
          if (!t.push(s)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          found.connector = Word(connector);
          found.u_hat = u;
          return true;
        }
      }
      return false;
    }
    for (Symbol s : spec.alphabet().symbols()) {
      LegalityTracker next = tracker;
      if (!next.push(s)) continue;
      connector.push_back(s);
      const bool hit = search(next, length, found);
      connector.pop_back();
      if (hit) return true;
    }
    return false;
  }
};

}  // namespace

std::optional<AppWitness> app_falsifier(const SubshiftSpec& spec, std::size_t n, std::size_t f_budget,
                                        std::size_t g_budget, const AppSearchOptions& options) {
  if (n < 2 * g_budget + 2) throw Error(ErrorKind::kValidation, "app_falsifier needs n >= 2g + 2");
  if (!spec.alphabet().contains(1) || !spec.alphabet().contains(0)) {
    throw Error(ErrorKind::kAlphabetMismatch, "app_falsifier needs symbols 0 and 1");
  }
  const std::size_t k = spec.alphabet().size();
  double connectors = 0.0;
  double power = 1.0;
  for (std::size_t l = 0; l <= f_budget; ++l) {
    connectors += power;
    power *= static_cast<double>(k);
  }
  const double ball = binomial_ball(n, g_budget, k);
  const double size = ball * ball * connectors;
  if (size > static_cast<double>(options.search_budget)) {
    throw Error(ErrorKind::kBudgetExceeded, "app_falsifier search size " + std::to_string(size) +
                                                " exceeds the budget " + std::to_string(options.search_budget));
  }

  Word w = Word::repeat(1, n - (g_budget + 1));
  w.append(0, g_budget + 1);
  const Word u = Word::repeat(1, n);
  const auto w_hats = hamming_ball(spec, w, g_budget);
  const auto u_hats = hamming_ball(spec, u, g_budget);
  if (u_hats.empty()) return std::nullopt;

  auto results = parallel_map<std::optional<AppWitness>>(w_hats.size(), options.threads, [&](std::size_t i) {
    std::optional<AppWitness> out;
    LegalityTracker tracker(spec);
    for (Symbol s : w_hats[i].symbols()) tracker.push(s);
    ConnectorSearch search{spec, u_hats, {}};
    AppWitness found;
    found.w_hat = w_hats[i];
    for (std::size_t l = 0; l <= f_budget; ++l) {
      if (search.search(tracker, l, found)) {
        out = std::move(found);
        break;
      }
    }
    return out;
  });
  for (auto& r : results) {
    if (r) return std::move(r);
  }
  return std::nullopt;
}

std::vector<AppThresholdRow> app_threshold_scan(const SubshiftSpec& spec, std::size_t n_min, std::size_t n_max,
                                                std::size_t f_budget, std::size_t g_budget,
                                                const AppSearchOptions& options) {
  std::vector<AppThresholdRow> rows;
  for (std::size_t n = std::max(n_min, 2 * g_budget + 2); n <= n_max; ++n) {
    rows.push_back({n, app_falsifier(spec, n, f_budget, g_budget, options).has_value()});
  }
  return rows;
}

}  // namespace ergolab
