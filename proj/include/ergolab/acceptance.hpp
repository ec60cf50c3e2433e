#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ergolab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  nlohmann::json data;
  double seconds = 0.0;  // wall time, never written to artifacts
};

struct AcceptanceOptions {
  unsigned threads = 1;
  std::uint64_t seed = 20240611;
  // Rerun criteria 1-10 at a second thread count and compare the artifacts.
  bool check_thread_invariance = true;
  // Run only these ids (all when empty).
  std::vector<int> only;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;

  nlohmann::json to_json() const;
};

using CriterionCallback = std::function<void(const CriterionResult&)>;

AcceptanceReport run_acceptance(const AcceptanceOptions& options, const CriterionCallback& on_result = {});

// One line per criterion: "[PASS] 3 gap-asymptotics (1.2s): ...".
std::string format_criterion_line(const CriterionResult& r);

}  // namespace ergolab
