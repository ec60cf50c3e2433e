#pragma once

#include <cstdint>
#include <optional>

#include "ergolab/shiftspace.hpp"
#include "ergolab/words.hpp"

// Slow, literal reference implementations used to cross-check the fast paths.
namespace ergolab::oracle {

// Tests every sub-word against the forbidden-word definition directly.
bool naive_is_legal(const SubshiftSpec& spec, WordView w);

// Enumerates all |A|^n words and scans each one.
std::uint64_t naive_count(const SubshiftSpec& spec, std::size_t n);

// Tries v = 0, 1, ..., v_max on the materialized w 0^v u.
std::optional<std::int64_t> scan_minimal_gap(const SubshiftSpec& spec, WordView w, WordView u,
                                             std::int64_t v_max);

// Sum of f over the first n windows, one window at a time.
double naive_birkhoff_average(const CylinderFunction& f, WordView w, std::size_t n);

// Growth rate of SGap(s): the root in (1, 2] of x^{s+1} - x^s - 1, by bisection.
double sgap_growth_root(int min_run);

}  // namespace ergolab::oracle
