#include "ergolab/shiftspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergolab/parallel.hpp"

namespace ergolab {

GapBudget::GapBudget(Rational kappa) : kappa_(kappa) {
  if (kappa_ <= 0) throw Error(ErrorKind::kValidation, "kappa must be positive");
}

std::int64_t GapBudget::m(std::int64_t n) const {
  // floor for nonnegative n; kappa is stored in lowest terms with den > 0.
  const std::int64_t num = kappa_.numerator();
  const std::int64_t den = kappa_.denominator();
  return static_cast<std::int64_t>((static_cast<__int128>(num) * n) / den) + 1;
}

SubshiftSpec SubshiftSpec::full(int alphabet_size) {
  return SubshiftSpec(FullShift{alphabet_size}, Alphabet::of_size(alphabet_size));
}

SubshiftSpec SubshiftSpec::sft(Alphabet alphabet, std::vector<Word> forbidden) {
  if (forbidden.empty()) throw Error(ErrorKind::kValidation, "SFT needs at least one forbidden word");
  for (const auto& w : forbidden) {
    if (w.empty()) throw Error(ErrorKind::kValidation, "forbidden words must be nonempty");
    alphabet.check(w);
  }
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
  Alphabet a = alphabet;
  return SubshiftSpec(SftShift{std::move(alphabet), std::move(forbidden)}, std::move(a));
}

SubshiftSpec SubshiftSpec::sgap(int min_run) {
  if (min_run < 1) throw Error(ErrorKind::kValidation, "S-gap min_run must be positive");
  return SubshiftSpec(SGapShift{min_run}, Alphabet::binary());
}

SubshiftSpec SubshiftSpec::paper(Rational kappa) {
  return SubshiftSpec(PaperShift{GapBudget(kappa)}, Alphabet::signed_ternary());
}

SubshiftSpec SubshiftSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw Error(ErrorKind::kValidation, "spec needs a 'type' field");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "paper") {
    if (!j.contains("kappa")) throw Error(ErrorKind::kValidation, "paper spec needs 'kappa'");
    const auto& k = j.at("kappa");
    if (!k.is_string()) throw Error(ErrorKind::kValidation, "kappa must be a fraction string such as \"1/4\"");
    return paper(parse_rational(k.get<std::string>()));
  }
  if (type == "full") return full(j.value("alphabet", 3));
  if (type == "sgap") return sgap(j.value("min_run", 1));
  if (type == "sft") {
    const Alphabet alphabet = Alphabet::of_size(j.value("alphabet", 3));
    std::vector<Word> forbidden;
    for (const auto& w : j.at("forbidden")) forbidden.push_back(word_from_json(w));
    return sft(alphabet, std::move(forbidden));
  }
  throw Error(ErrorKind::kValidation, "unknown spec type '" + type + "'");
}

nlohmann::json SubshiftSpec::to_json() const {
  struct Visitor {
    nlohmann::json operator()(const FullShift& s) const {
      return {{"type", "full"}, {"alphabet", s.alphabet_size}};
    }
    nlohmann::json operator()(const SftShift& s) const {
      auto forbidden = nlohmann::json::array();
      for (const auto& w : s.forbidden) forbidden.push_back(to_compact(w));
      return {{"type", "sft"}, {"alphabet", s.alphabet.size()}, {"forbidden", forbidden}};
    }
    nlohmann::json operator()(const SGapShift& s) const {
      return {{"type", "sgap"}, {"min_run", s.min_run}};
    }
    nlohmann::json operator()(const PaperShift& s) const {
      return {{"type", "paper"}, {"kappa", to_string(s.budget.kappa())}};
    }
  };
  return std::visit(Visitor{}, variant_);
}

std::string SubshiftSpec::describe() const { return to_json().dump(); }

std::size_t SubshiftSpec::context_radius() const {
  struct Visitor {
    std::size_t operator()(const FullShift&) const { return 0; }
    std::size_t operator()(const SftShift& s) const {
      std::size_t r = 0;
      for (const auto& w : s.forbidden) r = std::max(r, w.size());
      return r;
    }
    std::size_t operator()(const SGapShift& s) const { return static_cast<std::size_t>(s.min_run) + 2; }
    std::size_t operator()(const PaperShift&) const { return 0; }
  };
  return std::visit(Visitor{}, variant_);
}

namespace {

bool paper_legal(const GapBudget& budget, WordView w) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (w[i] * w[i + 1] < 0) return false;
  }
  std::size_t i = 0;
  while (i < n) {
    if (w[i] != 0) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n && w[i] == 0) ++i;
    // Zero run [start, i); boundary runs are unconstrained on the open side.
    if (start == 0 || i == n) continue;
    std::size_t r = 0;
    while (i + r < n && w[i + r] != 0) ++r;
    const auto k = static_cast<std::int64_t>(i - start);
    if (k <= budget.m(static_cast<std::int64_t>(r))) return false;
  }
  return true;
}

bool sgap_legal(int min_run, WordView w) {
  std::int64_t last_one = -1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 1) continue;
    if (last_one >= 0 && static_cast<std::int64_t>(i) - last_one - 1 < min_run) return false;
    last_one = static_cast<std::int64_t>(i);
  }
  return true;
}

bool sft_legal(const SftShift& s, WordView w) {
  for (const auto& f : s.forbidden) {
    if (std::search(w.begin(), w.end(), f.view().begin(), f.view().end()) != w.end()) return false;
  }
  return true;
}

}  // namespace

bool is_legal(const SubshiftSpec& spec, WordView w) {
  spec.alphabet().check(w);
  struct Visitor {
    WordView w;
    bool operator()(const FullShift&) const { return true; }
    bool operator()(const SftShift& s) const { return sft_legal(s, w); }
    bool operator()(const SGapShift& s) const { return sgap_legal(s.min_run, w); }
    bool operator()(const PaperShift& s) const { return paper_legal(s.budget, w); }
  };
  return std::visit(Visitor{w}, spec.variant());
}

LegalityTracker::LegalityTracker(const SubshiftSpec& spec) : spec_(&spec) {}

bool LegalityTracker::push(Symbol s) {
  if (!spec_->alphabet().contains(s)) spec_->alphabet().check(WordView(&s, 1));
  const auto& variant = spec_->variant();
  if (const auto* paper = std::get_if<PaperShift>(&variant)) {
    const bool at_start = buffer_.empty();
    if (s == 0) {
      if (!at_start && last_ != 0) {
        zero_len_ = 1;
        zero_flanked_ = true;
      } else {
        ++zero_len_;
      }
      run_len_ = 0;
    } else if (!at_start && last_ != 0) {
      if (last_ * s < 0) return false;
      ++run_len_;
      if (gap_flanked_ && gap_before_run_ <= paper->budget.m(run_len_)) return false;
    } else {
      gap_before_run_ = zero_len_;
      gap_flanked_ = zero_flanked_ && zero_len_ > 0;
      run_len_ = 1;
      zero_len_ = 0;
      zero_flanked_ = false;
      if (gap_flanked_ && gap_before_run_ <= paper->budget.m(1)) return false;
    }
    last_ = s;
    buffer_.push_back(s);
    return true;
  }
  if (const auto* sgap = std::get_if<SGapShift>(&variant)) {
    if (s == 1) {
      if (seen_one_ && zero_len_ < sgap->min_run) return false;
      seen_one_ = true;
      zero_len_ = 0;
    } else {
      ++zero_len_;
    }
    buffer_.push_back(s);
    return true;
  }
  buffer_.push_back(s);
  if (const auto* sft = std::get_if<SftShift>(&variant)) {
    const WordView b(buffer_.data(), buffer_.size());
    for (const auto& f : sft->forbidden) {
      if (f.size() <= b.size() &&
          std::equal(f.view().begin(), f.view().end(), b.end() - static_cast<std::ptrdiff_t>(f.size()))) {
        buffer_.pop_back();
        return false;
      }
    }
  }
  return true;
}

namespace {

struct DfsResult {
  std::uint64_t count = 0;
  std::vector<Word> words;
};

void dfs(const SubshiftSpec& spec, const LegalityTracker& tracker, std::vector<Symbol>& prefix,
         std::size_t n, bool list, std::size_t max_words, DfsResult& out) {
  if (prefix.size() == n) {
    ++out.count;
    if (list) {
      if (out.words.size() >= max_words) {
        throw Error(ErrorKind::kCapExceeded, "word listing exceeds the memory guard");
      }
      out.words.emplace_back(prefix);
    }
    return;
  }
  for (Symbol s : spec.alphabet().symbols()) {
    LegalityTracker next = tracker;
    if (!next.push(s)) continue;
    prefix.push_back(s);
    dfs(spec, next, prefix, n, list, max_words, out);
    prefix.pop_back();
  }
}

}  // namespace

LanguageCount count_language(const SubshiftSpec& spec, std::size_t n, bool list_words, unsigned threads,
                             const EnumerationLimits& limits) {
  if (list_words && n > limits.max_listing_length) {
    throw Error(ErrorKind::kCapExceeded, "listing L_" + std::to_string(n) + " exceeds the cap n <= " +
                                             std::to_string(limits.max_listing_length));
  }
  if (n > limits.max_count_length) {
    throw Error(ErrorKind::kCapExceeded, "counting L_" + std::to_string(n) + " exceeds the cap n <= " +
                                             std::to_string(limits.max_count_length));
  }
  LanguageCount result;
  if (n == 0) {
    result.count = 1;
    if (list_words) result.words.emplace_back();
    return result;
  }
  const auto& symbols = spec.alphabet().symbols();
  auto parts = parallel_map<DfsResult>(symbols.size(), threads, [&](std::size_t i) {
    DfsResult part;
    LegalityTracker tracker(spec);
    if (!tracker.push(symbols[i])) return part;
    std::vector<Symbol> prefix{symbols[i]};
    prefix.reserve(n);
    dfs(spec, tracker, prefix, n, list_words, limits.max_listing_words, part);
    return part;
  });
  for (auto& part : parts) {
    result.count += part.count;
    if (list_words) {
      std::move(part.words.begin(), part.words.end(), std::back_inserter(result.words));
    }
  }
  if (list_words && result.words.size() > limits.max_listing_words) {
    throw Error(ErrorKind::kCapExceeded, "word listing exceeds the memory guard");
  }
  return result;
}

EntropyEstimate entropy_estimate(const SubshiftSpec& spec, std::size_t n, unsigned threads,
                                 const EnumerationLimits& limits) {
  if (n < 2) throw Error(ErrorKind::kValidation, "entropy estimate needs n >= 2");
  const auto prev = count_language(spec, n - 1, false, threads, limits).count;
  const auto cur = count_language(spec, n, false, threads, limits).count;
  EntropyEstimate e;
  e.log_growth = cur == 0 ? -std::numeric_limits<double>::infinity()
                          : std::log(static_cast<double>(cur)) / static_cast<double>(n);
  e.ratio = prev == 0 ? 0.0 : static_cast<double>(cur) / static_cast<double>(prev);
  return e;
}

std::vector<EntropyRow> entropy_table(const SubshiftSpec& spec, std::size_t n_max, unsigned threads,
                                      const EnumerationLimits& limits) {
  std::vector<EntropyRow> rows;
  rows.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    EntropyRow row;
    row.n = n;
    row.count = count_language(spec, n, false, threads, limits).count;
    if (n > 0) {
      const auto prev = rows.back().count;
      row.ratio = prev == 0 ? 0.0 : static_cast<double>(row.count) / static_cast<double>(prev);
      row.log_growth = row.count == 0 ? -std::numeric_limits<double>::infinity()
                                      : std::log(static_cast<double>(row.count)) / static_cast<double>(n);
    }
    rows.push_back(row);
  }
  return rows;
}

bool certifies_positive_entropy(const std::vector<EntropyRow>& rows, double delta, std::size_t window) {
  if (window == 0 || rows.size() < window + 1) return false;
  for (std::size_t i = rows.size() - window; i < rows.size(); ++i) {
    if (rows[i].ratio < 1.0 + delta) return false;
  }
  return true;
}

bool periodic_point_legal(const SubshiftSpec& spec, WordView w, std::size_t v) {
  if (w.empty()) throw Error(ErrorKind::kValidation, "periodic block must be nonempty");
  spec.alphabet().check(w);
  Word period(w);
  period.append(0, v);
  // A forbidden pattern of the periodic point is shorter than two periods
  // (PaperShift, S-gap); SFT patterns may need more copies.
  std::size_t copies = 3;
  if (const std::size_t radius = spec.context_radius(); radius > 0) {
    copies = std::max<std::size_t>(copies, (radius + period.size() - 1) / period.size() + 2);
  }
  return is_legal(spec, repeat_word(period, copies));
}

}  // namespace ergolab
