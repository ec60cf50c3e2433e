#include "ergolab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace ergolab::oracle {

namespace {

// v_{j+1} 0^k v_j ... v_1 with all v_i nonzero and 1 <= k <= m(j), anchored
// at position i.
bool paper_pattern_at(const GapBudget& budget, WordView w, std::size_t i) {
  if (w[i] == 0) return false;
  std::size_t p = i + 1;
  std::int64_t k = 0;
  while (p < w.size() && w[p] == 0) {
    ++p;
    ++k;
  }
  if (k == 0) return false;
  for (std::int64_t j = 1; p < w.size() && w[p] != 0; ++p, ++j) {
    if (k <= budget.m(j)) return true;
  }
  return false;
}

bool contains_at(WordView w, std::size_t i, WordView pattern) {
  if (i + pattern.size() > w.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), w.begin() + static_cast<std::ptrdiff_t>(i));
}

}  // namespace

bool naive_is_legal(const SubshiftSpec& spec, WordView w) {
  spec.alphabet().check(w);
  if (const auto* paper = spec.as_paper()) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] * w[i + 1] < 0) return false;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (paper_pattern_at(paper->budget, w, i)) return false;
    }
    return true;
  }
  if (const auto* sgap = std::get_if<SGapShift>(&spec.variant())) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 1) continue;
      for (std::size_t l = i + 1; l < w.size(); ++l) {
        if (w[l] == 1) {
          if (static_cast<int>(l - i - 1) < sgap->min_run) return false;
          break;
        }
      }
    }
    return true;
  }
  if (const auto* sft = std::get_if<SftShift>(&spec.variant())) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (const auto& f : sft->forbidden) {
        if (contains_at(w, i, f)) return false;
      }
    }
    return true;
  }
  return true;
}

std::uint64_t naive_count(const SubshiftSpec& spec, std::size_t n) {
  const Alphabet& a = spec.alphabet();
  std::vector<std::size_t> digits(n, 0);
  Word w = Word::repeat(a.symbol(0), n);
  std::uint64_t count = 0;
  while (true) {
    if (naive_is_legal(spec, w)) ++count;
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < a.size()) {
        w[pos] = a.symbol(digits[pos]);
        break;
      }
      digits[pos] = 0;
      w[pos] = a.symbol(0);
      if (pos == 0) return count;
    }
    if (n == 0) return count;
  }
}

std::optional<std::int64_t> scan_minimal_gap(const SubshiftSpec& spec, WordView w, WordView u,
                                             std::int64_t v_max) {
  for (std::int64_t v = 0; v <= v_max; ++v) {
    Word glued(w);
    glued.append(0, static_cast<std::size_t>(v)).append(u);
    if (naive_is_legal(spec, glued)) return v;
  }
  return std::nullopt;
}

double naive_birkhoff_average(const CylinderFunction& f, WordView w, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += f.value(w.subspan(i, f.window()));
  return total / static_cast<double>(n);
}

double sgap_growth_root(int min_run) {
  const auto p = [min_run](double x) { return std::pow(x, min_run + 1) - std::pow(x, min_run) - 1.0; };
  double lo = 1.0;
  double hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ergolab::oracle
