#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/words.hpp"

namespace ergolab {

// Cylinder-frequency table of (1/n) sum_{i<n} delta_{T^i x}, truncated at
// depth D. Counts are kept as integers so periodic inputs compare exactly.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(Alphabet alphabet, std::size_t depth, std::uint64_t sample_count,
                   std::vector<std::vector<std::uint64_t>> counts, bool periodic);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  std::uint64_t sample_count() const { return n_; }
  // True when computed from one full period of a periodic point, in which
  // case the measure is exactly shift-invariant.
  bool periodic() const { return periodic_; }

  double freq(WordView w) const;
  double freq(std::size_t length, std::size_t index) const;
  Rational exact_freq(WordView w) const;
  std::uint64_t count(std::size_t length, std::size_t index) const { return counts_[length - 1][index]; }

  // max over words w with |w| < depth of |freq(w) - sum_a freq(w a)|.
  double marginal_defect() const;

  nlohmann::json to_json() const;

 private:
  Alphabet alphabet_;
  std::size_t depth_;
  std::uint64_t n_;
  std::vector<std::vector<std::uint64_t>> counts_;  // counts_[d-1][word_index]
  bool periodic_;
};

// Sliding-window frequencies of the first n windows, for every length 1..D.
EmpiricalMeasure empirical_measure(WordView w, std::size_t n, std::size_t depth,
                                   const Alphabet& alphabet = Alphabet::signed_ternary());

// Invariant measure of the periodic point ...www..., from one period with
// cyclic windows.
EmpiricalMeasure periodic_measure(WordView period, std::size_t depth,
                                  const Alphabet& alphabet = Alphabet::signed_ternary());

// Integral of f against mu; needs depth >= window.
double integrate(const CylinderFunction& f, const EmpiricalMeasure& mu);

// Test functions f_i are the cylinder indicators in length-lex order: all
// length-1 cylinders in symbol order, then length 2, and so on.
struct MetricTruncation {
  std::size_t terms = 16;  // K

  explicit MetricTruncation(std::size_t k);
  double tail() const;
  std::size_t required_depth(const Alphabet& alphabet) const;
};

struct Distance {
  double value = 0.0;
  double tail = 0.0;  // true distance lies in [value, value + tail]
};

// sum_{i=1}^K 2^{-i} |mu(C_i) - nu(C_i)|.
Distance rho_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MetricTruncation& trunc);

struct PairDistance {
  std::size_t i = 0;
  std::size_t j = 0;
  Distance distance;
};

struct AccumulationProfile {
  std::vector<std::size_t> checkpoints;
  std::vector<EmpiricalMeasure> measures;
  std::vector<PairDistance> distances;
  double dispersion = 0.0;  // max pairwise value
  double tail = 0.0;
};

AccumulationProfile accumulation_profile(WordView w, const std::vector<std::size_t>& checkpoints,
                                         std::size_t depth, const MetricTruncation& trunc,
                                         const Alphabet& alphabet = Alphabet::signed_ternary());

// True certifies that f is kappa-controlled: the spread of integrals over the
// supplied invariant measures exceeds kappa (sup f - inf f). False says
// nothing. Throws kNonPeriodic for measures not built from a full period.
bool kappa_controlled_certify(const CylinderFunction& f, const std::vector<EmpiricalMeasure>& measures,
                              double kappa);

}  // namespace ergolab
