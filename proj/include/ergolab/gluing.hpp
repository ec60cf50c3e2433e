#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/shiftspace.hpp"

namespace ergolab {

// What the right end of a word looks like to whatever gets glued after it.
struct TailProfile {
  bool has_nonzero = false;
  Symbol last_sign = 0;
  std::int64_t trailing_zeros = 0;
  std::int64_t last_run = 0;             // maximal nonzero run ending at the last nonzero
  std::int64_t gap_before_last_run = 0;  // zero run immediately left of that run
  bool gap_flanked = false;              // that zero run has a nonzero on its left
};

// What the left end of a word looks like to whatever precedes it.
struct HeadProfile {
  bool has_nonzero = false;
  Symbol first_sign = 0;
  std::int64_t leading_zeros = 0;
  std::int64_t first_run = 0;
};

TailProfile tail_profile(WordView w);
HeadProfile head_profile(WordView w);
// Profiles of block^reps without materializing it.
TailProfile tail_profile_repeated(WordView block, std::uint64_t reps);
HeadProfile head_profile_repeated(WordView block, std::uint64_t reps);

// Smallest v >= 0 with w 0^v u legal in the PaperShift, for legal w and u.
std::int64_t paper_junction_gap(const GapBudget& budget, const TailProfile& left, const HeadProfile& right);

// Smallest v in [0, v_max] with w 0^v u legal; nullopt if none.
// Throws kIllegalInput when w or u is illegal.
std::optional<std::int64_t> minimal_gap(const SubshiftSpec& spec, WordView w, WordView u, std::int64_t v_max);

struct GapWitness {
  Word w;
  Word u;
  std::int64_t gap = 0;
};

struct LengthRow {
  std::size_t u_length = 0;
  std::uint64_t pairs = 0;
  std::int64_t max_gap = 0;
  double max_ratio = 0.0;   // max_gap / u_length
  std::int64_t bound = -1;  // 1 + m(u_length) for the PaperShift, -1 otherwise
};

struct GlueReport {
  std::uint64_t pairs_tested = 0;
  std::int64_t max_min_gap = 0;
  bool exhaustive = true;
  std::vector<LengthRow> per_length;
  std::vector<GapWitness> witnesses;  // one maximizing pair per |u|
  std::vector<GapWitness> failures;   // missing gap (gap = -1) or bound violated
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::size_t w_min_length = 1;
  std::size_t w_max_length = 8;
  std::size_t u_min_length = 1;
  std::size_t u_max_length = 8;
  std::uint64_t pair_budget = 200'000'000;  // beyond this, switch to sampling
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Finite-scale m-transitivity check: every legal pair (w, u) in range must
// glue through a zero run of length <= 1 + m(|u|).
GlueReport verify_m_transitivity(const SubshiftSpec& spec, const VerifyOptions& options);

struct AppWitness {
  Word w_hat;
  Word connector;
  Word u_hat;
};

struct AppSearchOptions {
  std::uint64_t search_budget = 200'000'000;
  unsigned threads = 1;
};

// Searches every w' within Hamming distance g_budget of 1^{n-g-1} 0^{g+1}, every
// u' within g_budget of 1^n and every connector of length <= f_budget for a
// legal concatenation w' v u'. Returns the first one in canonical order.
std::optional<AppWitness> app_falsifier(const SubshiftSpec& spec, std::size_t n, std::size_t f_budget,
                                        std::size_t g_budget, const AppSearchOptions& options = {});

struct AppThresholdRow {
  std::size_t n = 0;
  bool witness_found = false;
};

// Runs app_falsifier for n = n_min .. n_max and reports where gluing stops.
std::vector<AppThresholdRow> app_threshold_scan(const SubshiftSpec& spec, std::size_t n_min, std::size_t n_max,
                                                std::size_t f_budget, std::size_t g_budget,
                                                const AppSearchOptions& options = {});

}  // namespace ergolab
