#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "ergolab/words.hpp"

namespace ergolab {

inline constexpr int kMaxCocycleDim = 8;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxCocycleDim, kMaxCocycleDim>;

enum class NormKind { kSpectral, kFrobenius };

// Locally constant A: X -> GL(d, R), A(x) = table[x_0 .. x_{L-1}].
class CocycleSpec {
 public:
  CocycleSpec(Alphabet alphabet, int dim, std::size_t window, std::vector<Matrix> table);

  // {dim, window, entries: [{word, matrix: row-major}]}; unlisted words get
  // the identity.
  static CocycleSpec from_json(const nlohmann::json& j, const Alphabet& alphabet);
  nlohmann::json to_json() const;

  const Alphabet& alphabet() const { return alphabet_; }
  int dim() const { return dim_; }
  std::size_t window() const { return window_; }
  std::size_t table_size() const { return table_.size(); }
  const Matrix& at(std::size_t index) const { return table_[index]; }
  const Matrix& matrix(WordView window_word) const;

 private:
  Alphabet alphabet_;
  int dim_;
  std::size_t window_;
  std::vector<Matrix> table_;
};

// Largest singular value by power iteration on M^T M from the normalized
// all-ones vector: at most 50 rounds, or until the estimate moves by less
// than 1e-12 relative. Falls back to a symmetric eigensolver when that does
// not converge.
double spectral_norm(const Matrix& m);
double matrix_norm(const Matrix& m, NormKind kind);

// log ||A_n(T^start x)|| with A_n(x) = A(T^{n-1} x) ... A(x), accumulated with
// per-step renormalization by the largest entry.
double log_norm_product(const CocycleSpec& a, WordView w, std::size_t start, std::size_t n,
                        NormKind kind = NormKind::kSpectral);

// (1/n) log ||A_n(x)||.
double lyapunov_estimate(const CocycleSpec& a, WordView w, std::size_t n, NormKind kind = NormKind::kSpectral);

struct TracePoint {
  std::size_t n = 0;
  double chi = 0.0;
};

// chi_n for n in [n0, n1], in one pass over the word.
std::vector<TracePoint> lyapunov_trace(const CocycleSpec& a, WordView w, std::size_t n0, std::size_t n1,
                                       NormKind kind = NormKind::kSpectral);

Interval lyapunov_irregularity_gap(const CocycleSpec& a, WordView w, std::size_t n0, std::size_t n1,
                                   NormKind kind = NormKind::kSpectral);

// A^f(v) = exp(f(v)) I_d.
CocycleSpec scalar_cocycle(const CylinderFunction& f, int dim);

// A_(k)(v) = exp(f(v) / k) A(v), on the larger of the two windows.
CocycleSpec perturb(const CocycleSpec& a, const CylinderFunction& f, double k);

// Largest entry difference between two cocycles on a common window.
double max_entry_delta(const CocycleSpec& a, const CocycleSpec& b);

}  // namespace ergolab
