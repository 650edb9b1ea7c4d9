#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "oa3/linalg.hpp"

namespace oa3 {

enum class Label : int { Negative = -1, Positive = 1 };

constexpr double label_value(Label y) { return static_cast<double>(y); }

struct LabeledSample {
  SparseVector x;
  Label y = Label::Negative;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

/// Immutable labeled stream with per-class counts.
class Dataset {
 public:
  Dataset() = default;
  /// Every sample must already live in dimension `dim`.
  Dataset(std::vector<LabeledSample> samples, std::size_t dim);

  std::span<const LabeledSample> samples() const noexcept { return samples_; }
  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t t_pos() const noexcept { return t_pos_; }
  std::size_t t_neg() const noexcept { return t_neg_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledSample> samples_;
  std::size_t dim_ = 0;
  std::size_t t_pos_ = 0;
  std::size_t t_neg_ = 0;
};

/// Reads LIBSVM text: `<label> <idx>:<val> ...`, 1-based strictly increasing
/// indices, `#` starts a comment, LF or CRLF. Labels 0 and -1 map to
/// Negative, +1 and 1 to Positive. `dim_override`, when given, pads the
/// dimensionality and must cover every index seen.
Dataset parse_libsvm(std::istream& in,
                     std::optional<std::size_t> dim_override = std::nullopt);

/// Writes LIBSVM text with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// x / ‖x‖₂. Zero vectors pass through and bump `zero_norm_count`;
/// vectors already within a few ulps of unit norm are returned unchanged.
SparseVector normalize(const SparseVector& x, std::size_t& zero_norm_count);
SparseVector normalize(const SparseVector& x);

struct NormalizedDataset {
  Dataset data;
  std::size_t zero_norm_count = 0;
};
NormalizedDataset normalize(const Dataset& ds);

/// Fisher–Yates shuffle driven by `seed`.
Dataset permute(const Dataset& ds, std::uint64_t seed);

struct SynthConfig {
  std::size_t dim = 20;
  std::size_t n_samples = 1000;
  double imbalance_ratio = 10.0;  // T_n / T_p
  double separation = 2.0;        // distance between class means
  double sparsity = 1.0;          // fraction of coordinates kept per sample
  /// Distance of the shared center from the origin, along a unit direction
  /// orthogonal to the class axis. Zero gives means at ±separation/2·u.
  double offset = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Two unit-variance spherical Gaussians at c ± (separation/2)·u with
/// u = 1/√d·(1,…,1), sparsified and normalized. T_p = round(n/(ratio+1)).
Dataset generate_synthetic(const SynthConfig& cfg);

}  // namespace oa3
