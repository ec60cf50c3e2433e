#include "ergolab/words.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace ergolab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kAlphabetMismatch: return "alphabet-mismatch";
    case ErrorKind::kWindowOverrun: return "window-overrun";
    case ErrorKind::kCapExceeded: return "cap-exceeded";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kIllegalInput: return "illegal-input";
    case ErrorKind::kInfeasibleTargets: return "infeasible-targets";
    case ErrorKind::kLegalityViolation: return "legality-violation";
    case ErrorKind::kSingularMatrix: return "singular-matrix";
    case ErrorKind::kInsufficientDepth: return "insufficient-depth";
    case ErrorKind::kNonPeriodic: return "non-periodic";
    case ErrorKind::kInvalidParams: return "invalid-params";
    case ErrorKind::kOutOfRange: return "out-of-range";
  }
  return "unknown";
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw Error(ErrorKind::kValidation, "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const std::int64_t num = parse_int(trim(text.substr(0, slash)));
  const std::int64_t den = parse_int(trim(text.substr(slash + 1)));
  if (den == 0) throw Error(ErrorKind::kValidation, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << '/' << r.denominator();
  return os.str();
}

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  if (symbols_.empty() || symbols_.size() > kMaxAlphabetSize) {
    throw Error(ErrorKind::kValidation, "alphabet size must be in [1, 16]");
  }
  if (std::adjacent_find(symbols_.begin(), symbols_.end()) != symbols_.end()) {
    throw Error(ErrorKind::kValidation, "alphabet has repeated symbols");
  }
  index_.fill(-1);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    index_[slot(symbols_[i])] = static_cast<std::int8_t>(i);
  }
}

Alphabet Alphabet::of_size(int k) {
  if (k < 1 || k > static_cast<int>(kMaxAlphabetSize)) {
    throw Error(ErrorKind::kValidation, "alphabet size must be in [1, 16]");
  }
  if (k == 3) return signed_ternary();
  std::vector<Symbol> symbols;
  for (int i = 0; i < k; ++i) symbols.push_back(static_cast<Symbol>(i));
  return Alphabet(std::move(symbols));
}

void Alphabet::check(WordView w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!contains(w[i])) {
      throw Error(ErrorKind::kAlphabetMismatch,
                  "symbol " + std::to_string(static_cast<int>(w[i])) + " at position " +
                      std::to_string(i) + " is not in the alphabet");
    }
  }
}

Word::Word(std::initializer_list<int> symbols) {
  symbols_.reserve(symbols.size());
  for (int s : symbols) symbols_.push_back(static_cast<Symbol>(s));
}

Word repeat_word(WordView block, std::size_t count) {
  std::vector<Symbol> out;
  out.reserve(block.size() * count);
  for (std::size_t i = 0; i < count; ++i) out.insert(out.end(), block.begin(), block.end());
  return Word(std::move(out));
}

std::string to_compact(WordView w) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) {
    if (s == -1) {
      out.push_back('m');
    } else if (s == 1) {
      out.push_back('p');
    } else if (s >= 0 && s < 16) {
      out.push_back(kHex[s]);
    } else {
      throw Error(ErrorKind::kValidation,
                  "symbol " + std::to_string(static_cast<int>(s)) + " has no compact form");
    }
  }
  return out;
}

Word parse_compact(std::string_view text) {
  std::vector<Symbol> out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == 'm') {
      out.push_back(-1);
    } else if (c == 'p') {
      out.push_back(1);
    } else if (c >= '0' && c <= '9') {
      out.push_back(static_cast<Symbol>(c - '0'));
    } else if (c >= 'a' && c <= 'f') {
      out.push_back(static_cast<Symbol>(c - 'a' + 10));
    } else {
      throw Error(ErrorKind::kValidation, std::string("bad character '") + c + "' in word");
    }
  }
  return Word(std::move(out));
}

nlohmann::json word_to_json(WordView w) {
  auto arr = nlohmann::json::array();
  for (Symbol s : w) arr.push_back(static_cast<int>(s));
  return arr;
}

Word word_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_compact(j.get<std::string>());
  if (!j.is_array()) throw Error(ErrorKind::kValidation, "word must be an array or a string");
  std::vector<Symbol> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(ErrorKind::kValidation, "word entries must be integers");
    const int s = v.get<int>();
    if (s < -128 || s > 127) throw Error(ErrorKind::kValidation, "symbol out of range");
    out.push_back(static_cast<Symbol>(s));
  }
  return Word(std::move(out));
}

std::size_t power_checked(std::size_t base, std::size_t exponent, std::size_t limit) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (out > limit / base) {
      throw Error(ErrorKind::kCapExceeded, "table of size " + std::to_string(base) + "^" +
                                               std::to_string(exponent) + " is too large");
    }
    out *= base;
  }
  return out;
}

std::size_t word_index(const Alphabet& alphabet, WordView w) {
  std::size_t index = 0;
  for (Symbol s : w) {
    const int d = alphabet.index_of(s);
    if (d < 0) alphabet.check(w);
    index = index * alphabet.size() + static_cast<std::size_t>(d);
  }
  return index;
}

Word word_at_index(const Alphabet& alphabet, std::size_t length, std::size_t index) {
  std::vector<Symbol> out(length);
  for (std::size_t i = length; i-- > 0;) {
    out[i] = alphabet.symbol(index % alphabet.size());
    index /= alphabet.size();
  }
  return Word(std::move(out));
}

namespace {
constexpr std::size_t kMaxTableSize = std::size_t{1} << 24;
}

CylinderFunction::CylinderFunction(Alphabet alphabet, std::size_t window, std::vector<double> values)
    : alphabet_(std::move(alphabet)), window_(window), values_(std::move(values)) {
  if (window_ == 0) throw Error(ErrorKind::kValidation, "cylinder window must be positive");
  const std::size_t expected = power_checked(alphabet_.size(), window_, kMaxTableSize);
  if (values_.size() != expected) {
    throw Error(ErrorKind::kValidation, "cylinder table must have " + std::to_string(expected) +
                                            " entries, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kValidation, "cylinder table value is not finite");
  }
  cache_bounds();
}

CylinderFunction::CylinderFunction(Alphabet alphabet, std::size_t window, std::vector<Rational> values)
    : alphabet_(std::move(alphabet)), window_(window) {
  if (window_ == 0) throw Error(ErrorKind::kValidation, "cylinder window must be positive");
  const std::size_t expected = power_checked(alphabet_.size(), window_, kMaxTableSize);
  if (values.size() != expected) {
    throw Error(ErrorKind::kValidation, "cylinder table must have " + std::to_string(expected) +
                                            " entries, got " + std::to_string(values.size()));
  }
  values_.reserve(values.size());
  for (const auto& r : values) values_.push_back(to_double(r));
  exact_ = std::move(values);
  cache_bounds();
}

void CylinderFunction::cache_bounds() {
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  inf_ = *lo;
  sup_ = *hi;
  norm_ = std::max(std::abs(inf_), std::abs(sup_));
}

CylinderFunction CylinderFunction::constant(const Alphabet& alphabet, double c) {
  return CylinderFunction(alphabet, 1, std::vector<double>(alphabet.size(), c));
}

CylinderFunction CylinderFunction::constant(const Alphabet& alphabet, const Rational& c) {
  return CylinderFunction(alphabet, 1, std::vector<Rational>(alphabet.size(), c));
}

CylinderFunction CylinderFunction::coordinate(const Alphabet& alphabet) {
  std::vector<Rational> values;
  for (Symbol s : alphabet.symbols()) values.emplace_back(s);
  return CylinderFunction(alphabet, 1, std::move(values));
}

CylinderFunction CylinderFunction::indicator(const Alphabet& alphabet, WordView w) {
  if (w.empty()) throw Error(ErrorKind::kValidation, "indicator of the empty cylinder");
  alphabet.check(w);
  const std::size_t size = power_checked(alphabet.size(), w.size(), kMaxTableSize);
  std::vector<Rational> values(size, Rational(0));
  values[word_index(alphabet, w)] = Rational(1);
  return CylinderFunction(alphabet, w.size(), std::move(values));
}

// {window, entries: [{word, value}]}; words not listed default to `default`
// (0 when absent). Values may be numbers or fraction strings.
CylinderFunction CylinderFunction::from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  if (!j.is_object() || !j.contains("window") || !j.contains("entries")) {
    throw Error(ErrorKind::kValidation, "cylinder function JSON needs 'window' and 'entries'");
  }
  const auto window = j.at("window").get<std::size_t>();
  if (window == 0) throw Error(ErrorKind::kValidation, "cylinder window must be positive");
  const std::size_t size = power_checked(alphabet.size(), window, kMaxTableSize);

  bool exact = true;
  auto parse_value = [&exact](const nlohmann::json& v) -> std::pair<double, Rational> {
    if (v.is_string()) {
      const Rational r = parse_rational(v.get<std::string>());
      return {to_double(r), r};
    }
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      return {static_cast<double>(i), Rational(i)};
    }
    if (v.is_number()) {
      exact = false;
      return {v.get<double>(), Rational(0)};
    }
    throw Error(ErrorKind::kValidation, "cylinder value must be a number or a fraction string");
  };

  std::pair<double, Rational> fill{0.0, Rational(0)};
  if (j.contains("default")) fill = parse_value(j.at("default"));
  std::vector<double> values(size, fill.first);
  std::vector<Rational> rationals(size, fill.second);
  std::vector<bool> seen(size, false);
  for (const auto& entry : j.at("entries")) {
    const Word w = word_from_json(entry.at("word"));
    if (w.size() != window) {
      throw Error(ErrorKind::kValidation, "entry word length differs from the window");
    }
    const std::size_t idx = word_index(alphabet, w);
    if (seen[idx]) throw Error(ErrorKind::kValidation, "duplicate entry " + to_compact(w));
    seen[idx] = true;
    const auto [d, r] = parse_value(entry.at("value"));
    values[idx] = d;
    rationals[idx] = r;
  }
  if (exact) return CylinderFunction(alphabet, window, std::move(rationals));
  return CylinderFunction(alphabet, window, std::move(values));
}

nlohmann::json CylinderFunction::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    nlohmann::json value;
    if (exact_) {
      const Rational& r = (*exact_)[i];
      if (r.denominator() == 1) {
        value = r.numerator();
      } else {
        value = to_string(r);
      }
    } else {
      value = values_[i];
    }
    entries.push_back({{"word", to_compact(word_at_index(alphabet_, window_, i))}, {"value", value}});
  }
  return {{"window", window_}, {"entries", entries}};
}

double CylinderFunction::value(WordView window_word) const {
  if (window_word.size() != window_) {
    throw Error(ErrorKind::kWindowOverrun, "word length differs from the cylinder window");
  }
  return values_[word_index(alphabet_, window_word)];
}

namespace {

void check_range(const CylinderFunction& f, WordView w, std::size_t n) {
  if (n + f.window() - 1 > w.size()) {
    throw Error(ErrorKind::kWindowOverrun,
                "need " + std::to_string(n + f.window() - 1) + " symbols, word has " +
                    std::to_string(w.size()));
  }
}

// Calls visit(table_index) for the windows starting at 0 .. n-1.
template <typename Visit>
void for_each_window(const CylinderFunction& f, WordView w, std::size_t n, Visit&& visit) {
  const Alphabet& a = f.alphabet();
  const std::size_t k = a.size();
  const std::size_t modulus = f.table_size();
  const std::size_t last = n + f.window() - 1;
  std::size_t index = 0;
  for (std::size_t i = 0; i < last; ++i) {
    const int d = a.index_of(w[i]);
    if (d < 0) a.check(w.subspan(i, 1));
    index = (index * k + static_cast<std::size_t>(d)) % modulus;
    if (i + 1 >= f.window()) visit(index);
  }
}

}  // namespace

double evaluate(const CylinderFunction& f, WordView w, std::size_t i) {
  if (i + f.window() > w.size()) {
    throw Error(ErrorKind::kWindowOverrun, "window at " + std::to_string(i) + " overruns the word");
  }
  return f.value(w.subspan(i, f.window()));
}

double birkhoff_sum(const CylinderFunction& f, WordView w, std::size_t n) {
  check_range(f, w, n);
  double sum = 0.0;
  for_each_window(f, w, n, [&](std::size_t idx) { sum += f.value_at(idx); });
  return sum;
}

double birkhoff_average(const CylinderFunction& f, WordView w, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kValidation, "Birkhoff average needs n >= 1");
  return birkhoff_sum(f, w, n) / static_cast<double>(n);
}

std::optional<Rational> birkhoff_average_exact(const CylinderFunction& f, WordView w, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kValidation, "Birkhoff average needs n >= 1");
  check_range(f, w, n);
  if (!f.is_exact()) return std::nullopt;
  const auto& table = *f.exact_values();
  std::vector<std::int64_t> counts(table.size(), 0);
  for_each_window(f, w, n, [&](std::size_t idx) { ++counts[idx]; });
  Rational sum(0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) sum += table[i] * counts[i];
  }
  return sum / static_cast<std::int64_t>(n);
}

std::vector<double> birkhoff_averages(const CylinderFunction& f, WordView w, std::size_t n_max) {
  check_range(f, w, n_max);
  std::vector<double> out;
  out.reserve(n_max);
  double sum = 0.0;
  for_each_window(f, w, n_max, [&](std::size_t idx) {
    sum += f.value_at(idx);
    out.push_back(sum / static_cast<double>(out.size() + 1));
  });
  return out;
}

Interval irregularity_gap(const CylinderFunction& f, WordView w, std::size_t n0, std::size_t n1) {
  if (n0 == 0 || n1 < n0) throw Error(ErrorKind::kValidation, "need 1 <= N0 <= N1");
  check_range(f, w, n1);
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  double sum = 0.0;
  std::size_t n = 0;
  for_each_window(f, w, n1, [&](std::size_t idx) {
    sum += f.value_at(idx);
    ++n;
    if (n >= n0) {
      const double avg = sum / static_cast<double>(n);
      out.lo = std::min(out.lo, avg);
      out.hi = std::max(out.hi, avg);
    }
  });
  return out;
}

StreamingSum::StreamingSum(const CylinderFunction& f) : f_(&f), modulus_(f.table_size()) {}

void StreamingSum::push(Symbol s) {
  const Alphabet& a = f_->alphabet();
  const int d = a.index_of(s);
  if (d < 0) a.check(WordView(&s, 1));
  index_ = (index_ * a.size() + static_cast<std::size_t>(d)) % modulus_;
  ++length_;
  if (length_ >= f_->window()) {
    sum_ += f_->value_at(index_);
    ++windows_;
  }
}

void StreamingSum::push_repeated(WordView block, std::uint64_t reps) {
  if (block.empty() || reps == 0) return;
  const std::uint64_t period = block.size();
  // After `warm` copies the last `window` symbols come from the block, so the
  // rolling state repeats at every block boundary.
  const std::uint64_t warm = (f_->window() + period - 1) / period;
  const std::uint64_t explicit_reps = std::min<std::uint64_t>(reps, warm);
  for (std::uint64_t r = 0; r < explicit_reps; ++r) push(block);
  if (reps == explicit_reps) return;
  const double before = sum_;
  push(block);
  const double per_rep = sum_ - before;
  const std::uint64_t remaining = reps - explicit_reps - 1;
  sum_ += per_rep * static_cast<double>(remaining);
  windows_ += period * remaining;
  length_ += period * remaining;
}

}  // namespace ergolab
