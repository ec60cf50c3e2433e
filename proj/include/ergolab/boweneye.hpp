#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

namespace ergolab {

// Eigenvalue magnitudes at the two saddles of the eye.
struct EyeParams {
  double alpha_plus = 1.0;
  double alpha_minus = 1.0;
  double beta_plus = 1.0;
  double beta_minus = 1.0;

  double lambda() const { return alpha_minus / beta_plus; }
  double sigma() const { return beta_minus / alpha_plus; }

  // Throws kInvalidParams unless all four are positive and lambda * sigma > 1.
  void validate() const;

  static EyeParams from_ratios(double lambda, double sigma);
};

enum class Saddle { kA, kB };

char saddle_name(Saddle s);

struct Sojourn {
  std::size_t cycle = 0;  // 1-based
  Saddle saddle = Saddle::kA;
  double duration = 0.0;
  double start = 0.0;
  double end = 0.0;      // cumulative time at the end of the sojourn
  double a_before = 0.0;  // time spent near A before this sojourn starts
};

struct SojournTrace {
  std::vector<Sojourn> entries;
  double transit = 0.0;  // travel time between consecutive sojourns

  double total_time() const { return entries.empty() ? 0.0 : entries.back().end; }
  std::size_t cycles() const { return entries.size() / 2; }
};

// A_1 = s0, B_k = lambda A_k, A_{k+1} = sigma B_k; 2K entries.
SojournTrace sojourn_sequence(const EyeParams& p, double s0, std::size_t cycles, double transit = 0.0);

struct Weights {
  double a = 0.0;
  double b = 0.0;
};

// Fractions of [0, t] spent near A and near B. Throws kOutOfRange unless
// 0 < t <= total time.
Weights time_average_weights(const SojournTrace& trace, double t);

struct Endpoints {
  Weights mu1;  // reached at the end of late A-sojourns
  Weights mu2;  // reached at the end of late B-sojourns
};

Endpoints accumulation_endpoints(const EyeParams& p);

struct CycleExtremes {
  std::size_t cycle = 0;
  double max_a = 0.0;  // at the end of A_k
  double min_a = 0.0;  // at the end of B_k
};

std::vector<CycleExtremes> cycle_extremes(const SojournTrace& trace);

struct CoverageOptions {
  std::size_t grid = 50;
  double eps = 0.02;
  std::size_t samples_per_sojourn = 256;
  double transit = 0.0;
};

struct CoverageTarget {
  double c = 0.0;
  double best = 0.0;  // smallest |w_A(t) - c| over the samples
  bool hit = false;
};

struct CoverageReport {
  std::vector<CoverageTarget> targets;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t samples = 0;
  std::size_t misses = 0;
  bool all_pass = false;

  nlohmann::json to_json() const;
};

// Samples w_A(t) on the last two cycles and checks that every grid point of
// [mu2.w_A, mu1.w_A] is within eps of some sample. With grid = 1 the single
// target is mu1.w_A.
CoverageReport segment_coverage_check(const EyeParams& p, double s0, std::size_t cycles,
                                      const CoverageOptions& options = {});

}  // namespace ergolab
