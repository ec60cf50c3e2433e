#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/words.hpp"

namespace ergolab {

// m(n) = floor(kappa * n) + 1, computed exactly for rational kappa > 0.
// m is nondecreasing and subadditive: m(a + b) <= m(a) + m(b).
class GapBudget {
 public:
  explicit GapBudget(Rational kappa);

  const Rational& kappa() const { return kappa_; }
  std::int64_t m(std::int64_t n) const;

 private:
  Rational kappa_;
};

struct FullShift {
  int alphabet_size = 3;
};

struct SftShift {
  Alphabet alphabet;
  std::vector<Word> forbidden;
};

// Binary shift whose points are concatenations of blocks 1 0^s, s >= min_run.
struct SGapShift {
  int min_run = 1;
};

// Subshift of {-1, 0, 1}^Z forbidding (R1) any ij with ij < 0 and (R2) any
// v_{j+1} 0^k v_j ... v_1 with all v_i nonzero and 1 <= k <= m(j).
struct PaperShift {
  GapBudget budget;
};

class SubshiftSpec {
 public:
  using Variant = std::variant<FullShift, SftShift, SGapShift, PaperShift>;

  static SubshiftSpec full(int alphabet_size = 3);
  static SubshiftSpec sft(Alphabet alphabet, std::vector<Word> forbidden);
  static SubshiftSpec sgap(int min_run);
  static SubshiftSpec paper(Rational kappa);
  // {type: "paper", kappa: "1/4"} | {type: "sft", forbidden: [...], alphabet: 3}
  // | {type: "sgap", min_run: 2} | {type: "full", alphabet: 3}
  static SubshiftSpec from_json(const nlohmann::json& j);

  nlohmann::json to_json() const;
  std::string describe() const;

  const Variant& variant() const { return variant_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const PaperShift* as_paper() const { return std::get_if<PaperShift>(&variant_); }
  bool is_full() const { return std::holds_alternative<FullShift>(variant_); }

  // Longest span of symbols a single forbidden pattern can involve besides
  // arbitrarily long zero runs; used to size local legality checks.
  std::size_t context_radius() const;

 private:
  SubshiftSpec(Variant v, Alphabet a) : variant_(std::move(v)), alphabet_(std::move(a)) {}

  Variant variant_;
  Alphabet alphabet_;
};

// True iff w contains no forbidden sub-word. Throws kAlphabetMismatch.
bool is_legal(const SubshiftSpec& spec, WordView w);

// Incremental legality for words built left to right. push() returns false
// when the appended symbol completes a forbidden sub-word; prefixes that were
// legal stay legal, so a failed push means every extension is illegal.
class LegalityTracker {
 public:
  explicit LegalityTracker(const SubshiftSpec& spec);

  bool push(Symbol s);
  std::size_t length() const { return buffer_.size(); }

 private:
  const SubshiftSpec* spec_;
  std::vector<Symbol> buffer_;
  // PaperShift / SGap run bookkeeping.
  Symbol last_ = 0;
  std::int64_t zero_len_ = 0;
  bool zero_flanked_ = false;
  std::int64_t run_len_ = 0;
  std::int64_t gap_before_run_ = 0;
  bool gap_flanked_ = false;
  bool seen_one_ = false;
};

struct EnumerationLimits {
  std::size_t max_listing_length = 22;
  std::size_t max_listing_words = std::size_t{1} << 24;
  std::size_t max_count_length = 30;
};

struct LanguageCount {
  std::uint64_t count = 0;
  std::vector<Word> words;  // lexicographic order, filled only when listing
};

// |L_n| by prefix-pruned depth-first search, parallel over the first symbol.
// Results do not depend on `threads`.
LanguageCount count_language(const SubshiftSpec& spec, std::size_t n, bool list_words = false,
                             unsigned threads = 1, const EnumerationLimits& limits = {});

struct EntropyEstimate {
  double log_growth = 0.0;  // log|L_n| / n
  double ratio = 0.0;       // |L_n| / |L_{n-1}|
};

EntropyEstimate entropy_estimate(const SubshiftSpec& spec, std::size_t n, unsigned threads = 1,
                                 const EnumerationLimits& limits = {});

struct EntropyRow {
  std::size_t n = 0;
  std::uint64_t count = 0;
  double ratio = 0.0;  // 0 for n = 0
  double log_growth = 0.0;
};

// Rows for n = 0 .. n_max.
std::vector<EntropyRow> entropy_table(const SubshiftSpec& spec, std::size_t n_max,
                                      unsigned threads = 1, const EnumerationLimits& limits = {});

// Positive entropy is certified when the growth ratio stays >= 1 + delta over
// the last `window` rows.
bool certifies_positive_entropy(const std::vector<EntropyRow>& rows, double delta, std::size_t window);

// Legality of the bi-infinite periodic point ...(w 0^v)(w 0^v)...
bool periodic_point_legal(const SubshiftSpec& spec, WordView w, std::size_t v);

}  // namespace ergolab
