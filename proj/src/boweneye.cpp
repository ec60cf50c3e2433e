#include "ergolab/boweneye.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ergolab/error.hpp"

namespace ergolab {

void EyeParams::validate() const {
  for (double v : {alpha_plus, alpha_minus, beta_plus, beta_minus}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::kInvalidParams, "eigenvalue magnitudes must be positive");
  }
  if (!(lambda() * sigma() > 1.0)) {
    throw Error(ErrorKind::kInvalidParams, "need lambda * sigma > 1, got " + std::to_string(lambda() * sigma()));
  }
}

EyeParams EyeParams::from_ratios(double lambda, double sigma) {
  EyeParams p{1.0, lambda, 1.0, sigma};
  p.validate();
  return p;
}

char saddle_name(Saddle s) { return s == Saddle::kA ? 'A' : 'B'; }

SojournTrace sojourn_sequence(const EyeParams& p, double s0, std::size_t cycles, double transit) {
  p.validate();
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw Error(ErrorKind::kInvalidParams, "s0 must be positive");
  if (cycles == 0) throw Error(ErrorKind::kInvalidParams, "need at least one cycle");
  if (!(transit >= 0.0) || !std::isfinite(transit)) throw Error(ErrorKind::kInvalidParams, "transit time must be >= 0");
  SojournTrace trace;
  trace.transit = transit;
  double clock = 0.0;
  double a_time = 0.0;
  double duration = s0;
  for (std::size_t k = 1; k <= cycles; ++k) {
    for (Saddle s : {Saddle::kA, Saddle::kB}) {
      if (!trace.entries.empty()) clock += transit;
      if (!std::isfinite(clock + duration)) throw Error(ErrorKind::kInvalidParams, "sojourn times overflow");
      trace.entries.push_back({k, s, duration, clock, clock + duration, a_time});
      clock += duration;
      if (s == Saddle::kA) {
        a_time += duration;
        duration *= p.lambda();
      } else {
        duration *= p.sigma();
      }
    }
  }
  return trace;
}

Weights time_average_weights(const SojournTrace& trace, double t) {
  if (!(t > 0.0) || t > trace.total_time()) {
    throw Error(ErrorKind::kOutOfRange, "t must lie in (0, " + std::to_string(trace.total_time()) + "]");
  }
  const auto it = std::lower_bound(trace.entries.begin(), trace.entries.end(), t,
                                   [](const Sojourn& s, double value) { return s.end < value; });
  double a_time = it->a_before;
  if (it->saddle == Saddle::kA && t > it->start) a_time += t - it->start;
  double b_time = 0.0;
  if (trace.transit == 0.0) {
    b_time = t - a_time;
  } else {
    b_time = it->start - it->a_before - static_cast<double>(it - trace.entries.begin()) * trace.transit;
    if (it->saddle == Saddle::kB && t > it->start) b_time += t - it->start;
  }
  return {a_time / t, b_time / t};
}

Endpoints accumulation_endpoints(const EyeParams& p) {
  p.validate();
  const double l = p.lambda();
  const double s = p.sigma();
  return {{s / (1.0 + s), 1.0 / (1.0 + s)}, {1.0 / (1.0 + l), l / (1.0 + l)}};
}

std::vector<CycleExtremes> cycle_extremes(const SojournTrace& trace) {
  std::vector<CycleExtremes> out;
  for (std::size_t i = 0; i + 1 < trace.entries.size(); i += 2) {
    const auto& a = trace.entries[i];
    const auto& b = trace.entries[i + 1];
    out.push_back({a.cycle, time_average_weights(trace, a.end).a, time_average_weights(trace, b.end).a});
  }
  return out;
}

nlohmann::json CoverageReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& t : targets) rows.push_back({{"c", t.c}, {"best", t.best}, {"hit", t.hit}});
  return {{"targets", rows},
          {"window_start", window_start},
          {"window_end", window_end},
          {"samples", samples},
          {"misses", misses},
          {"all_pass", all_pass}};
}

CoverageReport segment_coverage_check(const EyeParams& p, double s0, std::size_t cycles,
                                      const CoverageOptions& options) {
  if (options.grid == 0) throw Error(ErrorKind::kInvalidParams, "grid must be at least 1");
  if (!(options.eps >= 0.0)) throw Error(ErrorKind::kInvalidParams, "eps must be >= 0");
  if (options.samples_per_sojourn == 0) throw Error(ErrorKind::kInvalidParams, "need at least one sample per sojourn");
  const auto trace = sojourn_sequence(p, s0, cycles, options.transit);
  const auto ends = accumulation_endpoints(p);

  const std::size_t first = trace.entries.size() >= 4 ? trace.entries.size() - 4 : 0;
  std::vector<double> samples;
  for (std::size_t i = first; i < trace.entries.size(); ++i) {
    const auto& s = trace.entries[i];
    for (std::size_t j = 1; j <= options.samples_per_sojourn; ++j) {
      const double t = j == options.samples_per_sojourn
                           ? s.end
                           : s.start + s.duration * static_cast<double>(j) /
                                           static_cast<double>(options.samples_per_sojourn);
      samples.push_back(time_average_weights(trace, t).a);
    }
  }

  CoverageReport report;
  report.window_start = trace.entries[first].start;
  report.window_end = trace.total_time();
  report.samples = samples.size();
  const double lo = ends.mu2.a;
  const double hi = ends.mu1.a;
  for (std::size_t i = 0; i < options.grid; ++i) {
    CoverageTarget target;
    target.c = options.grid == 1 ? hi
                                 : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options.grid - 1);
    target.best = std::numeric_limits<double>::infinity();
    for (double v : samples) target.best = std::min(target.best, std::abs(v - target.c));
    target.hit = target.best <= options.eps;
    if (!target.hit) ++report.misses;
    report.targets.push_back(target);
  }
  report.all_pass = report.misses == 0;
  return report;
}

}  // namespace ergolab
