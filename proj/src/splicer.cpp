#include "ergolab/splicer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergolab/measures.hpp"

namespace ergolab {

std::vector<double> SpliceProgram::targets() const {
  std::vector<double> out;
  for (const auto& s : segments) out.push_back(s.target);
  return out;
}

nlohmann::json SpliceProgram::to_json() const {
  auto segs = nlohmann::json::array();
  for (const auto& s : segments) {
    segs.push_back({{"block", to_compact(s.block)},
                    {"reps", s.reps},
                    {"gap", s.gap},
                    {"high", s.high},
                    {"target", s.target},
                    {"predicted", s.predicted}});
  }
  return {{"segments", segs},
          {"checkpoints", checkpoints},
          {"tau", tau},
          {"reach_lo", reach_lo},
          {"reach_hi", reach_hi},
          {"legality_certified", legality_certified}};
}

SpliceProgram SpliceProgram::from_json(const nlohmann::json& j) {
  SpliceProgram p;
  std::uint64_t total = 0;
  for (const auto& s : j.at("segments")) {
    SpliceSegment seg;
    seg.block = word_from_json(s.at("block"));
    seg.reps = s.at("reps").get<std::uint64_t>();
    seg.gap = s.at("gap").get<std::uint64_t>();
    seg.high = s.value("high", true);
    seg.target = s.value("target", 0.0);
    seg.predicted = s.value("predicted", 0.0);
    if (seg.block.empty() || seg.reps == 0) throw Error(ErrorKind::kValidation, "segments need a block and reps >= 1");
    total += seg.length();
    p.checkpoints.push_back(total);
    p.segments.push_back(std::move(seg));
  }
  if (j.contains("checkpoints") && j.at("checkpoints").get<std::vector<std::uint64_t>>() != p.checkpoints) {
    throw Error(ErrorKind::kValidation, "recorded checkpoints do not match the segments");
  }
  p.tau = j.value("tau", 0.0);
  p.reach_lo = j.value("reach_lo", 0.0);
  p.reach_hi = j.value("reach_hi", 0.0);
  p.legality_certified = j.value("legality_certified", false);
  return p;
}

namespace {

double block_average(const CylinderFunction& f, WordView block) {
  return integrate(f, periodic_measure(block, f.window(), f.alphabet()));
}

double zero_value(const CylinderFunction& f) {
  return f.value(Word::zeros(f.window()));
}

}  // namespace

ReachBounds reach_bounds(const SubshiftSpec& spec, const CylinderFunction& f, WordView p_lo, WordView p_hi) {
  // Each run of length b pays a gap of about kappa * b zeros in the PaperShift;
  // other shifts pay a bounded gap, which vanishes in the limit.
  double rate = 0.0;
  if (const auto* paper = spec.as_paper()) rate = to_double(paper->budget.kappa());
  const double a0 = zero_value(f);
  ReachBounds r;
  r.lo = (block_average(f, p_lo) + rate * a0) / (1.0 + rate);
  r.hi = (block_average(f, p_hi) + rate * a0) / (1.0 + rate);
  return r;
}

TailProfile append_to_tail(const TailProfile& left, std::uint64_t gap, WordView block, std::uint64_t reps) {
  const auto seg_len = static_cast<std::int64_t>(block.size() * reps);
  const TailProfile seg = tail_profile_repeated(block, reps);
  if (!seg.has_nonzero) {
    TailProfile out = left;
    out.trailing_zeros += static_cast<std::int64_t>(gap) + seg_len;
    return out;
  }
  if (seg.gap_flanked) return seg;
  // The last run of the segment, with its leading zeros, reaches back to the
  // segment start, so the left word decides what flanks it.
  TailProfile out = seg;
  const std::int64_t run_start = seg_len - seg.trailing_zeros - seg.last_run;
  const std::int64_t zeros = left.trailing_zeros + static_cast<std::int64_t>(gap) + run_start;
  if (zeros == 0 && left.has_nonzero) {
    out.last_run = left.last_run + seg.last_run;
    out.gap_before_last_run = left.gap_before_last_run;
    out.gap_flanked = left.gap_flanked;
  } else {
    out.gap_before_last_run = zeros;
    out.gap_flanked = left.has_nonzero && zeros > 0;
  }
  return out;
}

namespace {

class GapOracle {
 public:
  GapOracle(const SubshiftSpec& spec) : spec_(spec), radius_(spec.context_radius()) {}

  std::uint64_t gap(WordView block, std::uint64_t reps) const {
    if (spec_.is_full()) return 0;
    if (const auto* paper = spec_.as_paper()) {
      return static_cast<std::uint64_t>(
          paper_junction_gap(paper->budget, tail_, head_profile_repeated(block, reps)));
    }
    const std::uint64_t copies = std::min<std::uint64_t>(reps, radius_ / block.size() + 1);
    const Word head = repeat_word(block, copies);
    const WordView head_view = head.view().first(std::min(head.size(), radius_));
    const auto g = minimal_gap(spec_, tail_buffer_, head_view, static_cast<std::int64_t>(radius_ + 1));
    if (!g) throw Error(ErrorKind::kInfeasibleTargets, "block " + to_compact(block) + " cannot be glued");
    return static_cast<std::uint64_t>(*g);
  }

  void commit(std::uint64_t gap, WordView block, std::uint64_t reps) {
    if (spec_.as_paper()) {
      tail_ = append_to_tail(tail_, gap, block, reps);
      return;
    }
    if (radius_ == 0) return;
    tail_buffer_.append(0, std::min<std::uint64_t>(gap, radius_));
    const std::uint64_t copies = std::min<std::uint64_t>(reps, radius_ / block.size() + 1);
    tail_buffer_.append(repeat_word(block, copies));
    if (tail_buffer_.size() > radius_) {
      tail_buffer_ = Word(tail_buffer_.view().subspan(tail_buffer_.size() - radius_));
    }
  }

 private:
  const SubshiftSpec& spec_;
  std::size_t radius_;
  TailProfile tail_;
  Word tail_buffer_;
};

struct Candidate {
  std::uint64_t reps = 0;
  std::uint64_t gap = 0;
  double predicted = 0.0;
  std::uint64_t length = 0;
  bool ok = false;
};

}  // namespace

SpliceProgram plan_oscillation(const SubshiftSpec& spec, const OscillationSpec& osc, WordView p_lo, WordView p_hi) {
  const CylinderFunction& f = osc.f;
  if (!(f.alphabet() == spec.alphabet())) throw Error(ErrorKind::kAlphabetMismatch, "observable alphabet differs from the shift");
  if (!(osc.alpha < osc.beta)) throw Error(ErrorKind::kInvalidParams, "need alpha < beta");
  if (!(osc.growth > 1.0)) throw Error(ErrorKind::kInvalidParams, "growth factor must exceed 1");
  if (osc.tau < 0.0) throw Error(ErrorKind::kInvalidParams, "tau must be nonnegative");
  for (WordView block : {p_lo, p_hi}) {
    if (block.empty()) throw Error(ErrorKind::kInvalidParams, "blocks must be nonempty");
    if (!periodic_point_legal(spec, block, 0)) {
      throw Error(ErrorKind::kIllegalInput, "block " + to_compact(block) + " does not repeat legally");
    }
  }
  if (const auto* paper = spec.as_paper()) {
    for (WordView block : {p_lo, p_hi}) {
      if (std::any_of(block.begin(), block.end(), [](Symbol s) { return s == 0; })) {
        throw Error(ErrorKind::kInvalidParams, "PaperShift blocks must be constant-sign runs");
      }
    }
    const double kappa = to_double(paper->budget.kappa());
    if (!(osc.beta - osc.alpha > 2.0 * kappa * (f.sup() - f.inf()))) {
      throw Error(ErrorKind::kInvalidParams, "need beta - alpha > 2 kappa (sup f - inf f)");
    }
  }
  if (!(block_average(f, p_lo) < osc.alpha) || !(block_average(f, p_hi) > osc.beta)) {
    throw Error(ErrorKind::kInvalidParams, "block averages must lie outside [alpha, beta]");
  }

  SpliceProgram program;
  program.tau = osc.tau;
  const ReachBounds reach = reach_bounds(spec, f, p_lo, p_hi);
  program.reach_lo = reach.lo;
  program.reach_hi = reach.hi;
  for (std::size_t k = 0; k < osc.num_checkpoints && k < 2; ++k) {
    const bool high = osc.start_high == (k % 2 == 0);
    if (high && !(osc.beta < reach.hi)) {
      throw Error(ErrorKind::kInfeasibleTargets,
                  "beta = " + std::to_string(osc.beta) + " is beyond the reach " + std::to_string(reach.hi));
    }
    if (!high && !(osc.alpha > reach.lo)) {
      throw Error(ErrorKind::kInfeasibleTargets,
                  "alpha = " + std::to_string(osc.alpha) + " is beyond the reach " + std::to_string(reach.lo));
    }
  }

  StreamingSum stream(f);
  GapOracle gaps(spec);
  const Word zero{0};
  std::uint64_t total = 0;

  for (std::size_t k = 0; k < osc.num_checkpoints; ++k) {
    const bool high = osc.start_high == (k % 2 == 0);
    const WordView block = high ? p_hi : p_lo;
    const double target = high ? osc.beta : osc.alpha;
    const double min_length = osc.growth * static_cast<double>(total);

    auto evaluate = [&](std::uint64_t reps) {
      Candidate c;
      c.reps = reps;
      c.gap = gaps.gap(block, reps);
      StreamingSum s = stream;
      s.push_repeated(zero, c.gap);
      s.push_repeated(block, reps);
      c.length = c.gap + block.size() * reps;
      c.predicted = s.average();
      c.ok = s.windows() > 0 && static_cast<double>(c.length) >= min_length &&
             (high ? c.predicted >= target : c.predicted <= target);
      return c;
    };
    auto over_budget = [&](std::uint64_t reps) {
      return total + block.size() * reps > osc.max_length;
    };

    std::uint64_t reps = 1;
    Candidate best = evaluate(reps);
    while (!best.ok) {
      reps *= 2;
      if (over_budget(reps)) {
        throw Error(ErrorKind::kBudgetExceeded, "segment " + std::to_string(k) + " needs more than " +
                                                    std::to_string(osc.max_length) + " symbols");
      }
      best = evaluate(reps);
    }
    // Smallest passing reps, assuming the predicate is monotone; confirmed below.
    std::uint64_t lo = reps / 2;
    std::uint64_t hi = reps;
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (evaluate(mid).ok) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    best = evaluate(hi);
    while (!best.ok) best = evaluate(best.reps + 1);

    SpliceSegment seg;
    seg.block = Word(block);
    seg.reps = best.reps;
    seg.gap = best.gap;
    seg.high = high;
    seg.target = target;
    seg.predicted = best.predicted;
    stream.push_repeated(zero, seg.gap);
    stream.push_repeated(block, seg.reps);
    gaps.commit(seg.gap, block, seg.reps);
    total += seg.length();
    program.checkpoints.push_back(total);
    program.segments.push_back(std::move(seg));
  }
  program.legality_certified = true;
  return program;
}

Word build_point(const SubshiftSpec& spec, const SpliceProgram& program) {
  if (!program.legality_certified) {
    throw Error(ErrorKind::kValidation, "program carries no legality certificate");
  }
  std::vector<Symbol> symbols;
  symbols.reserve(program.length());
  for (const auto& seg : program.segments) {
    symbols.insert(symbols.end(), seg.gap, 0);
    for (std::uint64_t r = 0; r < seg.reps; ++r) {
      symbols.insert(symbols.end(), seg.block.symbols().begin(), seg.block.symbols().end());
    }
  }
  Word w(std::move(symbols));
  if (w.size() != program.length()) {
    throw Error(ErrorKind::kLegalityViolation, "built word length differs from the last checkpoint");
  }
  if (!is_legal(spec, w)) throw Error(ErrorKind::kLegalityViolation, "planned word is not in the language");
  return w;
}

nlohmann::json OscillationReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& c : checkpoints) {
    rows.push_back({{"checkpoint", c.checkpoint},
                    {"windows", c.windows},
                    {"average", c.average},
                    {"scheduled_high", c.scheduled_high},
                    {"passes", c.passes},
                    {"reaches_target", c.reaches_target}});
  }
  return {{"checkpoints", rows},
          {"all_pass", all_pass},
          {"all_targets_reached", all_targets_reached},
          {"realized_lo", realized.lo},
          {"realized_hi", realized.hi}};
}

OscillationReport verify_oscillation(WordView w, const OscillationSpec& osc,
                                     const std::vector<std::uint64_t>& checkpoints) {
  const CylinderFunction& f = osc.f;
  const double mid = 0.5 * (osc.alpha + osc.beta);
  OscillationReport report;
  report.all_pass = !checkpoints.empty();
  report.all_targets_reached = !checkpoints.empty();
  if (checkpoints.empty()) return report;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) {
      throw Error(ErrorKind::kValidation, "checkpoints must be strictly increasing");
    }
  }
  if (checkpoints.front() < f.window()) throw Error(ErrorKind::kWindowOverrun, "checkpoint shorter than the window");
  if (checkpoints.back() > w.size()) throw Error(ErrorKind::kWindowOverrun, "checkpoint beyond the word");

  // One pass over the windows; the realized range starts at the first checkpoint.
  const std::uint64_t first = checkpoints.front() - f.window() + 1;
  const std::uint64_t last = checkpoints.back() - f.window() + 1;
  report.realized.lo = std::numeric_limits<double>::infinity();
  report.realized.hi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t k = 0;
  for (std::uint64_t n = 1; n <= last; ++n) {
    sum += f.value(w.subspan(n - 1, f.window()));
    const double avg = sum / static_cast<double>(n);
    if (n >= first) {
      report.realized.lo = std::min(report.realized.lo, avg);
      report.realized.hi = std::max(report.realized.hi, avg);
    }
    if (n != checkpoints[k] - f.window() + 1) continue;
    CheckpointResult r;
    r.checkpoint = checkpoints[k];
    r.windows = n;
    r.average = avg;
    r.scheduled_high = osc.start_high == (k % 2 == 0);
    r.passes = r.scheduled_high ? r.average > mid + osc.tau : r.average < mid - osc.tau;
    r.reaches_target = r.scheduled_high ? r.average >= osc.beta - osc.tau : r.average <= osc.alpha + osc.tau;
    report.all_pass = report.all_pass && r.passes;
    report.all_targets_reached = report.all_targets_reached && r.reaches_target;
    report.checkpoints.push_back(r);
    ++k;
  }
  return report;
}

std::vector<AveragingBoundCheck> check_averaging_bound(WordView w, const CylinderFunction& f,
                                                       const SpliceProgram& program, double tolerance) {
  std::vector<AveragingBoundCheck> out;
  const double spread = f.sup() - f.inf();
  for (std::size_t k = 0; k < program.segments.size(); ++k) {
    const auto& seg = program.segments[k];
    const std::uint64_t end = program.checkpoints[k];
    const std::uint64_t run = seg.block.size() * seg.reps;
    if (run < f.window() || end > w.size()) continue;
    AveragingBoundCheck c;
    c.checkpoint = end;
    c.prefix = end - run;
    c.block_windows = run - f.window() + 1;
    const double total = static_cast<double>(c.prefix + c.block_windows);

    const double x_avg = birkhoff_sum(f, w, c.prefix + c.block_windows) / total;
    StreamingSum y(f);
    y.push_repeated(seg.block, seg.reps);
    const double y_avg = y.average();
    const double x_block = birkhoff_sum(f, w.subspan(c.prefix), c.block_windows);
    const double mismatch = std::abs(x_block - y.sum());

    c.deviation = std::abs(x_avg - y_avg);
    c.bound = (static_cast<double>(c.prefix) / total) * spread + mismatch / total;
    c.holds = c.deviation <= c.bound + tolerance;
    out.push_back(c);
  }
  return out;
}

}  // namespace ergolab
