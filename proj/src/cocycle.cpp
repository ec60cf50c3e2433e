#include "ergolab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ergolab {

namespace {

constexpr std::size_t kMaxCocycleTable = std::size_t{1} << 20;
constexpr double kMinDeterminant = 1e-9;

Matrix identity(int d) { return Matrix::Identity(d, d); }

}  // namespace

CocycleSpec::CocycleSpec(Alphabet alphabet, int dim, std::size_t window, std::vector<Matrix> table)
    : alphabet_(std::move(alphabet)), dim_(dim), window_(window), table_(std::move(table)) {
  if (dim_ < 1 || dim_ > kMaxCocycleDim) {
    throw Error(ErrorKind::kValidation, "cocycle dimension must be in [1, " + std::to_string(kMaxCocycleDim) + "]");
  }
  if (window_ == 0) throw Error(ErrorKind::kValidation, "cocycle window must be positive");
  const std::size_t expected = power_checked(alphabet_.size(), window_, kMaxCocycleTable);
  if (table_.size() != expected) {
    throw Error(ErrorKind::kValidation, "cocycle table must have " + std::to_string(expected) + " entries");
  }
  for (std::size_t i = 0; i < table_.size(); ++i) {
    const Matrix& m = table_[i];
    if (m.rows() != dim_ || m.cols() != dim_) throw Error(ErrorKind::kValidation, "cocycle matrix has the wrong shape");
    if (!m.allFinite()) throw Error(ErrorKind::kValidation, "cocycle matrix has non-finite entries");
    if (std::abs(m.determinant()) < kMinDeterminant) {
      throw Error(ErrorKind::kSingularMatrix,
                  "matrix for word " + to_compact(word_at_index(alphabet_, window_, i)) + " is not invertible");
    }
  }
}

CocycleSpec CocycleSpec::from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  const int dim = j.at("dim").get<int>();
  const auto window = j.at("window").get<std::size_t>();
  if (dim < 1 || dim > kMaxCocycleDim) throw Error(ErrorKind::kValidation, "cocycle dimension out of range");
  if (window == 0) throw Error(ErrorKind::kValidation, "cocycle window must be positive");
  std::vector<Matrix> table(power_checked(alphabet.size(), window, kMaxCocycleTable), identity(dim));
  for (const auto& entry : j.at("entries")) {
    const Word w = word_from_json(entry.at("word"));
    if (w.size() != window) throw Error(ErrorKind::kValidation, "entry word length differs from the window");
    const auto values = entry.at("matrix").get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(dim * dim)) {
      throw Error(ErrorKind::kValidation, "matrix needs dim * dim row-major entries");
    }
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m(r, c) = values[static_cast<std::size_t>(r * dim + c)];
    }
    table[word_index(alphabet, w)] = m;
  }
  return CocycleSpec(alphabet, dim, window, std::move(table));
}

nlohmann::json CocycleSpec::to_json() const {
  auto entries = nlohmann::json::array();
  for (std::size_t i = 0; i < table_.size(); ++i) {
    std::vector<double> values;
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) values.push_back(table_[i](r, c));
    }
    entries.push_back({{"word", to_compact(word_at_index(alphabet_, window_, i))}, {"matrix", values}});
  }
  return {{"dim", dim_}, {"window", window_}, {"entries", entries}};
}

const Matrix& CocycleSpec::matrix(WordView window_word) const {
  if (window_word.size() != window_) throw Error(ErrorKind::kWindowOverrun, "word length differs from the cocycle window");
  return table_[word_index(alphabet_, window_word)];
}

double spectral_norm(const Matrix& m) {
  const Matrix gram = m.transpose() * m;
  const auto d = gram.rows();
  using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxCocycleDim, 1>;
  Vector v = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  double estimate = v.dot(gram * v);
  bool converged = false;
  for (int iter = 0; iter < 50 && !converged; ++iter) {
    Vector u = gram * v;
    const double len = u.norm();
    if (len == 0.0) break;
    v = u / len;
    const double next = v.dot(gram * v);
    converged = std::abs(next - estimate) <= 1e-12 * std::abs(next);
    estimate = next;
  }
  // Slow convergence (close top singular values) or a start vector orthogonal
  // to the top direction: solve the small symmetric problem directly.
  if (!converged || !(estimate > 0.0)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    estimate = solver.eigenvalues().maxCoeff();
  }
  return std::sqrt(std::max(estimate, 0.0));
}

double matrix_norm(const Matrix& m, NormKind kind) {
  return kind == NormKind::kSpectral ? spectral_norm(m) : m.norm();
}

namespace {

void check_range(const CocycleSpec& a, WordView w, std::size_t start, std::size_t n) {
  if (start + n + a.window() - 1 > w.size()) {
    throw Error(ErrorKind::kWindowOverrun, "need " + std::to_string(start + n + a.window() - 1) +
                                               " symbols, word has " + std::to_string(w.size()));
  }
}

// Running product with the scale factored out: A_n = exp(log_scale) * product.
class ProductAccumulator {
 public:
  explicit ProductAccumulator(int dim) : product_(identity(dim)) {}

  void step(const Matrix& m) {
    product_ = m * product_;
    const double scale = product_.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorKind::kSingularMatrix, "cocycle product degenerated");
    }
    product_ /= scale;
    log_scale_ += std::log(scale);
  }

  double log_norm(NormKind kind) const { return log_scale_ + std::log(matrix_norm(product_, kind)); }

 private:
  Matrix product_;
  double log_scale_ = 0.0;
};

}  // namespace

double log_norm_product(const CocycleSpec& a, WordView w, std::size_t start, std::size_t n, NormKind kind) {
  check_range(a, w, start, n);
  ProductAccumulator acc(a.dim());
  for (std::size_t i = start; i < start + n; ++i) acc.step(a.matrix(w.subspan(i, a.window())));
  return acc.log_norm(kind);
}

double lyapunov_estimate(const CocycleSpec& a, WordView w, std::size_t n, NormKind kind) {
  if (n == 0) throw Error(ErrorKind::kValidation, "Lyapunov estimate needs n >= 1");
  return log_norm_product(a, w, 0, n, kind) / static_cast<double>(n);
}

std::vector<TracePoint> lyapunov_trace(const CocycleSpec& a, WordView w, std::size_t n0, std::size_t n1,
                                       NormKind kind) {
  if (n0 == 0 || n1 < n0) throw Error(ErrorKind::kValidation, "need 1 <= N0 <= N1");
  check_range(a, w, 0, n1);
  std::vector<TracePoint> out;
  out.reserve(n1 - n0 + 1);
  ProductAccumulator acc(a.dim());
  for (std::size_t i = 0; i < n1; ++i) {
    acc.step(a.matrix(w.subspan(i, a.window())));
    const std::size_t n = i + 1;
    if (n >= n0) out.push_back({n, acc.log_norm(kind) / static_cast<double>(n)});
  }
  return out;
}

Interval lyapunov_irregularity_gap(const CocycleSpec& a, WordView w, std::size_t n0, std::size_t n1,
                                   NormKind kind) {
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : lyapunov_trace(a, w, n0, n1, kind)) {
    out.lo = std::min(out.lo, p.chi);
    out.hi = std::max(out.hi, p.chi);
  }
  return out;
}

CocycleSpec scalar_cocycle(const CylinderFunction& f, int dim) {
  std::vector<Matrix> table;
  table.reserve(f.table_size());
  for (std::size_t i = 0; i < f.table_size(); ++i) table.push_back(std::exp(f.value_at(i)) * identity(dim));
  return CocycleSpec(f.alphabet(), dim, f.window(), std::move(table));
}

namespace {

// Re-indexes a cocycle on a longer window; A still reads the first symbols.
std::vector<Matrix> expanded_table(const CocycleSpec& a, std::size_t window) {
  const std::size_t size = power_checked(a.alphabet().size(), window, kMaxCocycleTable);
  std::vector<Matrix> table;
  table.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const Word w = word_at_index(a.alphabet(), window, i);
    table.push_back(a.matrix(w.view().first(a.window())));
  }
  return table;
}

}  // namespace

CocycleSpec perturb(const CocycleSpec& a, const CylinderFunction& f, double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::kValidation, "perturbation divisor k must be positive");
  if (!(a.alphabet() == f.alphabet())) throw Error(ErrorKind::kAlphabetMismatch, "cocycle and function alphabets differ");
  const std::size_t window = std::max(a.window(), f.window());
  std::vector<Matrix> table = expanded_table(a, window);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Word w = word_at_index(a.alphabet(), window, i);
    table[i] *= std::exp(f.value(w.view().first(f.window())) / k);
  }
  return CocycleSpec(a.alphabet(), a.dim(), window, std::move(table));
}

double max_entry_delta(const CocycleSpec& a, const CocycleSpec& b) {
  if (!(a.alphabet() == b.alphabet()) || a.dim() != b.dim()) {
    throw Error(ErrorKind::kValidation, "cocycles differ in alphabet or dimension");
  }
  const std::size_t window = std::max(a.window(), b.window());
  const auto ta = expanded_table(a, window);
  const auto tb = expanded_table(b, window);
  double worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) worst = std::max(worst, (ta[i] - tb[i]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace ergolab
