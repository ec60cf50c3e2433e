#include "ergolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergolab {

namespace {
constexpr std::size_t kMaxDepthTable = std::size_t{1} << 22;
}

EmpiricalMeasure::EmpiricalMeasure(Alphabet alphabet, std::size_t depth, std::uint64_t sample_count,
                                   std::vector<std::vector<std::uint64_t>> counts, bool periodic)
    : alphabet_(std::move(alphabet)), depth_(depth), n_(sample_count), counts_(std::move(counts)),
      periodic_(periodic) {
  if (depth_ == 0 || counts_.size() != depth_) {
    throw Error(ErrorKind::kValidation, "measure needs one count table per depth");
  }
  if (n_ == 0) throw Error(ErrorKind::kValidation, "measure needs at least one sample");
}

double EmpiricalMeasure::freq(std::size_t length, std::size_t index) const {
  if (length == 0) return 1.0;
  if (length > depth_) throw Error(ErrorKind::kInsufficientDepth, "cylinder longer than the measure depth");
  return static_cast<double>(counts_[length - 1][index]) / static_cast<double>(n_);
}

double EmpiricalMeasure::freq(WordView w) const { return freq(w.size(), word_index(alphabet_, w)); }

Rational EmpiricalMeasure::exact_freq(WordView w) const {
  if (w.empty()) return Rational(1);
  if (w.size() > depth_) throw Error(ErrorKind::kInsufficientDepth, "cylinder longer than the measure depth");
  return Rational(static_cast<std::int64_t>(counts_[w.size() - 1][word_index(alphabet_, w)]),
                  static_cast<std::int64_t>(n_));
}

double EmpiricalMeasure::marginal_defect() const {
  double worst = 0.0;
  const std::size_t k = alphabet_.size();
  for (std::size_t d = 1; d < depth_; ++d) {
    const auto& parent = counts_[d - 1];
    const auto& child = counts_[d];
    for (std::size_t idx = 0; idx < parent.size(); ++idx) {
      std::uint64_t children = 0;
      for (std::size_t a = 0; a < k; ++a) children += child[idx * k + a];
      const double defect =
          std::abs(static_cast<double>(parent[idx]) - static_cast<double>(children)) / static_cast<double>(n_);
      worst = std::max(worst, defect);
    }
  }
  return worst;
}

nlohmann::json EmpiricalMeasure::to_json() const {
  auto entries = nlohmann::json::array();
  for (std::size_t d = 1; d <= depth_; ++d) {
    for (std::size_t idx = 0; idx < counts_[d - 1].size(); ++idx) {
      const auto c = counts_[d - 1][idx];
      if (c == 0) continue;
      entries.push_back({{"word", to_compact(word_at_index(alphabet_, d, idx))},
                         {"count", c},
                         {"freq", static_cast<double>(c) / static_cast<double>(n_)}});
    }
  }
  auto symbols = nlohmann::json::array();
  for (Symbol s : alphabet_.symbols()) symbols.push_back(static_cast<int>(s));
  return {{"depth", depth_},
          {"sample_count", n_},
          {"periodic", periodic_},
          {"alphabet", symbols},
          {"entries", entries}};
}

namespace {

std::vector<std::vector<std::uint64_t>> empty_tables(const Alphabet& alphabet, std::size_t depth) {
  std::vector<std::vector<std::uint64_t>> tables;
  for (std::size_t d = 1; d <= depth; ++d) {
    tables.emplace_back(power_checked(alphabet.size(), d, kMaxDepthTable), 0);
  }
  return tables;
}

// Counts the windows starting at 0 .. n-1 of `source`, which must hold at
// least n + depth - 1 symbols.
void count_windows(const Alphabet& alphabet, WordView source, std::size_t n, std::size_t depth,
                   std::vector<std::vector<std::uint64_t>>& tables) {
  const std::size_t k = alphabet.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t index = 0;
    for (std::size_t d = 1; d <= depth; ++d) {
      const int digit = alphabet.index_of(source[i + d - 1]);
      if (digit < 0) alphabet.check(source.subspan(i + d - 1, 1));
      index = index * k + static_cast<std::size_t>(digit);
      ++tables[d - 1][index];
    }
  }
}

}  // namespace

EmpiricalMeasure empirical_measure(WordView w, std::size_t n, std::size_t depth, const Alphabet& alphabet) {
  if (n == 0 || depth == 0) throw Error(ErrorKind::kValidation, "empirical measure needs n >= 1 and D >= 1");
  if (n + depth - 1 > w.size()) {
    throw Error(ErrorKind::kWindowOverrun, "need " + std::to_string(n + depth - 1) + " symbols, word has " +
                                               std::to_string(w.size()));
  }
  auto tables = empty_tables(alphabet, depth);
  count_windows(alphabet, w, n, depth, tables);
  return EmpiricalMeasure(alphabet, depth, n, std::move(tables), false);
}

EmpiricalMeasure periodic_measure(WordView period, std::size_t depth, const Alphabet& alphabet) {
  if (period.empty() || depth == 0) throw Error(ErrorKind::kValidation, "periodic measure needs a nonempty period");
  // One period plus depth - 1 wrapped symbols covers every cyclic window.
  Word extended(period);
  for (std::size_t i = 0; i + 1 < depth; ++i) extended.push_back(period[i % period.size()]);
  auto tables = empty_tables(alphabet, depth);
  count_windows(alphabet, extended, period.size(), depth, tables);
  return EmpiricalMeasure(alphabet, depth, period.size(), std::move(tables), true);
}

double integrate(const CylinderFunction& f, const EmpiricalMeasure& mu) {
  if (!(f.alphabet() == mu.alphabet())) throw Error(ErrorKind::kAlphabetMismatch, "measure and function alphabets differ");
  if (f.window() > mu.depth()) throw Error(ErrorKind::kInsufficientDepth, "measure depth below the function window");
  double total = 0.0;
  for (std::size_t idx = 0; idx < f.table_size(); ++idx) {
    const auto c = mu.count(f.window(), idx);
    if (c != 0) total += static_cast<double>(c) * f.value_at(idx);
  }
  return total / static_cast<double>(mu.sample_count());
}

MetricTruncation::MetricTruncation(std::size_t k) : terms(k) {
  if (terms == 0) throw Error(ErrorKind::kValidation, "metric truncation needs K >= 1");
}

double MetricTruncation::tail() const { return std::ldexp(1.0, -static_cast<int>(terms)); }

std::size_t MetricTruncation::required_depth(const Alphabet& alphabet) const {
  std::size_t covered = 0;
  std::size_t layer = 1;
  std::size_t depth = 0;
  while (covered < terms) {
    layer *= alphabet.size();
    covered += layer;
    ++depth;
  }
  return depth;
}

Distance rho_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MetricTruncation& trunc) {
  if (!(mu.alphabet() == nu.alphabet())) throw Error(ErrorKind::kAlphabetMismatch, "measure alphabets differ");
  const std::size_t needed = trunc.required_depth(mu.alphabet());
  if (mu.depth() < needed || nu.depth() < needed) {
    throw Error(ErrorKind::kInsufficientDepth,
                "K = " + std::to_string(trunc.terms) + " needs depth " + std::to_string(needed));
  }
  Distance d;
  d.tail = trunc.tail();
  const std::size_t k = mu.alphabet().size();
  std::size_t i = 1;
  std::size_t layer = 1;
  for (std::size_t length = 1; i <= trunc.terms; ++length) {
    layer *= k;
    for (std::size_t idx = 0; idx < layer && i <= trunc.terms; ++idx, ++i) {
      d.value += std::ldexp(std::abs(mu.freq(length, idx) - nu.freq(length, idx)), -static_cast<int>(i));
    }
  }
  return d;
}

AccumulationProfile accumulation_profile(WordView w, const std::vector<std::size_t>& checkpoints,
                                         std::size_t depth, const MetricTruncation& trunc,
                                         const Alphabet& alphabet) {
  if (checkpoints.empty()) throw Error(ErrorKind::kValidation, "profile needs at least one checkpoint");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      std::adjacent_find(checkpoints.begin(), checkpoints.end()) != checkpoints.end()) {
    throw Error(ErrorKind::kValidation, "checkpoints must be strictly increasing");
  }
  AccumulationProfile profile;
  profile.checkpoints = checkpoints;
  profile.tail = trunc.tail();
  for (std::size_t n : checkpoints) profile.measures.push_back(empirical_measure(w, n, depth, alphabet));
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    for (std::size_t j = i + 1; j < checkpoints.size(); ++j) {
      const auto d = rho_distance(profile.measures[i], profile.measures[j], trunc);
      profile.distances.push_back({i, j, d});
      profile.dispersion = std::max(profile.dispersion, d.value);
    }
  }
  return profile;
}

bool kappa_controlled_certify(const CylinderFunction& f, const std::vector<EmpiricalMeasure>& measures,
                              double kappa) {
  if (measures.empty()) return false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& mu : measures) {
    if (!mu.periodic()) {
      throw Error(ErrorKind::kNonPeriodic, "kappa certification needs measures of periodic points");
    }
    const double v = integrate(f, mu);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo > kappa * (f.sup() - f.inf());
}

}  // namespace ergolab
