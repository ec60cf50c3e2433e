#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include "ergolab/error.hpp"

namespace ergolab {

using Symbol = std::int8_t;
using Rational = boost::rational<std::int64_t>;
using WordView = std::span<const Symbol>;

inline constexpr std::size_t kMaxAlphabetSize = 16;

// Parses "3", "-2", "1/4" or "-3/8". Throws kValidation on anything else.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Finite ordered symbol set. Symbols are small signed integers; the index of
// a symbol is its rank in ascending order, which also fixes lexicographic
// order on words.
class Alphabet {
 public:
  Alphabet() : Alphabet(signed_ternary()) {}
  explicit Alphabet(std::vector<Symbol> symbols);

  static Alphabet signed_ternary() { return Alphabet(std::vector<Symbol>{-1, 0, 1}); }
  static Alphabet binary() { return Alphabet(std::vector<Symbol>{0, 1}); }
  // k = 3 gives {-1, 0, 1}; any other k gives {0, ..., k-1}.
  static Alphabet of_size(int k);

  std::size_t size() const { return symbols_.size(); }
  Symbol symbol(std::size_t index) const { return symbols_[index]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  bool contains(Symbol s) const { return index_[slot(s)] >= 0; }
  // -1 when absent.
  int index_of(Symbol s) const { return index_[slot(s)]; }

  // Throws kAlphabetMismatch naming the first offending position.
  void check(WordView w) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  static std::size_t slot(Symbol s) { return static_cast<std::size_t>(static_cast<int>(s) + 128); }

  std::vector<Symbol> symbols_;
  std::array<std::int8_t, 256> index_{};
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  Word(std::initializer_list<int> symbols);
  explicit Word(WordView view) : symbols_(view.begin(), view.end()) {}

  static Word repeat(Symbol s, std::size_t count) {
    return Word(std::vector<Symbol>(count, s));
  }
  static Word zeros(std::size_t count) { return repeat(0, count); }

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  Symbol& operator[](std::size_t i) { return symbols_[i]; }

  WordView view() const { return {symbols_.data(), symbols_.size()}; }
  operator WordView() const { return view(); }  // NOLINT
  const std::vector<Symbol>& symbols() const { return symbols_; }

  Word& append(WordView other) {
    symbols_.insert(symbols_.end(), other.begin(), other.end());
    return *this;
  }
  Word& append(Symbol s, std::size_t count) {
    symbols_.insert(symbols_.end(), count, s);
    return *this;
  }
  Word& push_back(Symbol s) {
    symbols_.push_back(s);
    return *this;
  }

  friend Word operator+(Word a, WordView b) { return std::move(a.append(b)); }
  bool operator==(const Word& other) const = default;
  auto operator<=>(const Word& other) const = default;

 private:
  std::vector<Symbol> symbols_;
};

// Concatenation of `count` copies of `block`.
Word repeat_word(WordView block, std::size_t count);

// Compact text form: 'm' = -1, '0' = 0, 'p' = +1, other values as hex digits.
std::string to_compact(WordView w);
Word parse_compact(std::string_view text);

nlohmann::json word_to_json(WordView w);
// Accepts either an integer array or a compact string.
Word word_from_json(const nlohmann::json& j);

// Base-|alphabet| rank of a word, most significant symbol first. Equal-length
// words rank in lexicographic order.
std::size_t word_index(const Alphabet& alphabet, WordView w);
Word word_at_index(const Alphabet& alphabet, std::size_t length, std::size_t index);
std::size_t power_checked(std::size_t base, std::size_t exponent, std::size_t limit);

// Locally constant observable f(x) = table[x_0 .. x_{L-1}].
class CylinderFunction {
 public:
  CylinderFunction(Alphabet alphabet, std::size_t window, std::vector<double> values);
  CylinderFunction(Alphabet alphabet, std::size_t window, std::vector<Rational> values);

  static CylinderFunction constant(const Alphabet& alphabet, double c);
  static CylinderFunction constant(const Alphabet& alphabet, const Rational& c);
  // f(x) = x_0.
  static CylinderFunction coordinate(const Alphabet& alphabet);
  // Indicator of the cylinder [w], window |w|.
  static CylinderFunction indicator(const Alphabet& alphabet, WordView w);
  static CylinderFunction from_json(const nlohmann::json& j, const Alphabet& alphabet);

  nlohmann::json to_json() const;

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t window() const { return window_; }
  std::size_t table_size() const { return values_.size(); }
  double value_at(std::size_t index) const { return values_[index]; }
  double value(WordView window_word) const;
  const std::optional<std::vector<Rational>>& exact_values() const { return exact_; }
  bool is_exact() const { return exact_.has_value(); }

  double sup() const { return sup_; }
  double inf() const { return inf_; }
  double sup_norm() const { return norm_; }

 private:
  void cache_bounds();

  Alphabet alphabet_;
  std::size_t window_;
  std::vector<double> values_;
  std::optional<std::vector<Rational>> exact_;
  double sup_ = 0.0;
  double inf_ = 0.0;
  double norm_ = 0.0;
};

// f(T^i w).
double evaluate(const CylinderFunction& f, WordView w, std::size_t i);

// (1/n) sum_{i<n} f(T^i w).
double birkhoff_average(const CylinderFunction& f, WordView w, std::size_t n);
double birkhoff_sum(const CylinderFunction& f, WordView w, std::size_t n);
// Exact counterpart; nullopt when the table is not rational.
std::optional<Rational> birkhoff_average_exact(const CylinderFunction& f, WordView w,
                                               std::size_t n);

// Running averages for n = 1 .. n_max (entry n-1 holds the average over n).
std::vector<double> birkhoff_averages(const CylinderFunction& f, WordView w, std::size_t n_max);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Finite-horizon stand-in for (liminf, limsup) of the Birkhoff averages:
// min and max of the average over n in [n0, n1].
Interval irregularity_gap(const CylinderFunction& f, WordView w, std::size_t n0, std::size_t n1);

// Incremental Birkhoff sum over a stream of symbols. Only windows that lie
// entirely inside the stream are counted.
class StreamingSum {
 public:
  explicit StreamingSum(const CylinderFunction& f);

  void push(Symbol s);
  void push(WordView w) {
    for (Symbol s : w) push(s);
  }
  // Appends `block` repeated `reps` times in O(window + |block|) time once the
  // stream is periodic.
  void push_repeated(WordView block, std::uint64_t reps);

  double sum() const { return sum_; }
  std::uint64_t windows() const { return windows_; }
  std::uint64_t length() const { return length_; }
  double average() const { return windows_ == 0 ? 0.0 : sum_ / static_cast<double>(windows_); }

 private:
  const CylinderFunction* f_;
  std::size_t modulus_;
  std::size_t index_ = 0;
  std::uint64_t length_ = 0;
  std::uint64_t windows_ = 0;
  double sum_ = 0.0;
};

}  // namespace ergolab
