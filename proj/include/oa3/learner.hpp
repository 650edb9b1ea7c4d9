#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "oa3/data.hpp"
#include "oa3/linalg.hpp"

namespace oa3 {

enum class Algo { OA3, OA3Diag, SOA3, SSOA3 };

std::string_view to_string(Algo algo);
Algo parse_algo(std::string_view name);

/// What a queried round did to the learner.
struct LearnStep {
  double loss = 0.0;
  bool updated = false;  // any state changed (μ, Σ or sketch)
};

/// Common surface of the four learners, as seen by the streaming loop.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual Algo algo() const = 0;
  virtual std::size_t dim() const = 0;

  /// p = μᵀx with the current state.
  virtual double margin(const SparseVector& x) const = 0;
  /// v = xᵀΣx, or its sketched approximation, with the current state.
  virtual double variance(const SparseVector& x) const = 0;
  /// Absorbs a labeled sample; called only on queried rounds.
  virtual LearnStep learn(const SparseVector& x, Label y) = 0;

  /// The (implied) mean weight vector μ.
  virtual DenseVector weights() const = 0;
  /// State dump. `full` adds the dense covariance or sketch matrices.
  virtual nlohmann::json snapshot(bool full) const = 0;
};

struct LearnerParams {
  double eta = 1.0;
  double gamma = 1.0;
  double rho = 1.0;
  std::size_t sketch_m = 5;
  /// When set, sketched learners start from a seeded random orthonormal
  /// basis instead of the first m standard basis rows.
  std::optional<std::uint64_t> sketch_init_seed;
};

std::unique_ptr<Learner> make_learner(Algo algo, std::size_t dim,
                                      const LearnerParams& params);

}  // namespace oa3
