#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/gluing.hpp"
#include "ergolab/shiftspace.hpp"
#include "ergolab/words.hpp"

namespace ergolab {

// Birkhoff averages of f should alternate between "above beta" and "below
// alpha" at successive checkpoints, each segment at least `growth` times
// longer than everything before it.
struct OscillationSpec {
  CylinderFunction f;
  double alpha = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  std::size_t num_checkpoints = 0;
  double growth = 10.0;
  bool start_high = true;
  std::uint64_t max_length = std::uint64_t{1} << 30;
};

struct SpliceSegment {
  Word block;
  std::uint64_t reps = 0;
  std::uint64_t gap = 0;  // zeros inserted before the block run
  bool high = true;
  double target = 0.0;
  double predicted = 0.0;  // average over the windows inside the prefix ending here

  std::uint64_t length() const { return gap + block.size() * reps; }
};

struct SpliceProgram {
  std::vector<SpliceSegment> segments;
  std::vector<std::uint64_t> checkpoints;  // cumulative length at each segment end
  double tau = 0.0;
  double reach_lo = 0.0;
  double reach_hi = 0.0;
  bool legality_certified = false;  // every gap is the minimal legal gap

  std::vector<double> targets() const;
  std::uint64_t length() const { return checkpoints.empty() ? 0 : checkpoints.back(); }

  nlohmann::json to_json() const;
  static SpliceProgram from_json(const nlohmann::json& j);
};

struct ReachBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Limits of the checkpoint averages reachable by long runs of p_lo / p_hi,
// accounting for the gap overhead (kappa per symbol in the PaperShift).
ReachBounds reach_bounds(const SubshiftSpec& spec, const CylinderFunction& f, WordView p_lo, WordView p_hi);

// Tail profile of left 0^gap block^reps.
TailProfile append_to_tail(const TailProfile& left, std::uint64_t gap, WordView block, std::uint64_t reps);

SpliceProgram plan_oscillation(const SubshiftSpec& spec, const OscillationSpec& osc, WordView p_lo, WordView p_hi);

// Materializes the program and re-checks legality (kLegalityViolation).
Word build_point(const SubshiftSpec& spec, const SpliceProgram& program);

struct CheckpointResult {
  std::uint64_t checkpoint = 0;
  std::uint64_t windows = 0;
  double average = 0.0;
  bool scheduled_high = true;
  bool passes = false;          // beyond the midpoint by more than tau
  bool reaches_target = false;  // within tau of beta (high) or alpha (low)
};

struct OscillationReport {
  std::vector<CheckpointResult> checkpoints;
  bool all_pass = false;
  bool all_targets_reached = false;
  Interval realized;  // irregularity gap over [first, last] checkpoint windows

  nlohmann::json to_json() const;
};

OscillationReport verify_oscillation(WordView w, const OscillationSpec& osc,
                                     const std::vector<std::uint64_t>& checkpoints);

// |avg_x(p + n) - avg_y(n)| <= (p / (p + n)) (B - A) + |mismatch| / (p + n)
// at a checkpoint, with x the built word, p the prefix before the block run,
// n the block windows and y the periodic point of the block.
struct AveragingBoundCheck {
  std::uint64_t checkpoint = 0;
  std::uint64_t prefix = 0;
  std::uint64_t block_windows = 0;
  double deviation = 0.0;
  double bound = 0.0;
  bool holds = false;
};

std::vector<AveragingBoundCheck> check_averaging_bound(WordView w, const CylinderFunction& f,
                                                       const SpliceProgram& program, double tolerance = 1e-9);

}  // namespace ergolab
