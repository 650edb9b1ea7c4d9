#include "oa3/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "oa3/errors.hpp"
#include "oa3/random.hpp"

namespace oa3 {

Dataset::Dataset(std::vector<LabeledSample> samples, std::size_t dim)
    : samples_(std::move(samples)), dim_(dim) {
  for (const auto& s : samples_) {
    if (s.x.dim() != dim_) {
      throw DimensionError("sample dimension " + std::to_string(s.x.dim()) +
                           " differs from dataset dimension " +
                           std::to_string(dim_));
    }
    if (s.y == Label::Positive) {
      ++t_pos_;
    } else {
      ++t_neg_;
    }
  }
}

namespace {

constexpr std::string_view kSpace = " \t\v\f";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && p == end && std::isfinite(out);
}

Label parse_label(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!parse_double(tok, v)) {
    throw ParseError(line, "malformed label '" + std::string(tok) + "'");
  }
  if (v == 1.0) return Label::Positive;
  if (v == -1.0 || v == 0.0) return Label::Negative;
  throw ParseError(line, "label must be -1, 0 or +1, got '" +
                             std::string(tok) + "'");
}

struct RawSample {
  Label y;
  std::vector<SparseVector::Entry> entries;
};

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim_override) {
  std::vector<RawSample> raw;
  std::size_t max_index = 0;  // 1-based
  std::string buf;
  std::size_t line_no = 0;

  while (std::getline(in, buf)) {
    ++line_no;
    std::string_view line(buf);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    RawSample s{};
    std::size_t pos = 0;
    bool first = true;
    std::uint64_t last_index = 0;
    while (pos < line.size()) {
      const auto start = line.find_first_not_of(kSpace, pos);
      if (start == std::string_view::npos) break;
      auto stop = line.find_first_of(kSpace, start);
      if (stop == std::string_view::npos) stop = line.size();
      const auto tok = line.substr(start, stop - start);
      pos = stop;

      if (first) {
        s.y = parse_label(tok, line_no);
        first = false;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      }
      const auto idx_tok = tok.substr(0, colon);
      const auto val_tok = tok.substr(colon + 1);
      std::uint64_t idx = 0;
      auto [p, ec] = std::from_chars(idx_tok.data(),
                                     idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc{} || p != idx_tok.data() + idx_tok.size()) {
        throw ParseError(line_no, "malformed index '" + std::string(idx_tok) + "'");
      }
      if (idx < 1) throw ParseError(line_no, "feature index must be >= 1");
      if (idx > std::numeric_limits<SparseVector::Index>::max()) {
        throw ParseError(line_no, "feature index too large");
      }
      if (idx <= last_index) {
        throw ParseError(line_no, "feature indices must be strictly increasing");
      }
      last_index = idx;
      double val = 0.0;
      if (!parse_double(val_tok, val)) {
        throw ParseError(line_no, "malformed value '" + std::string(val_tok) + "'");
      }
      max_index = std::max<std::size_t>(max_index, idx);
      if (val != 0.0) {
        s.entries.push_back({static_cast<SparseVector::Index>(idx - 1), val});
      }
    }
    raw.push_back(std::move(s));
  }
  if (in.bad()) throw DataError("read error while parsing LIBSVM input");

  std::size_t dim = max_index;
  if (dim_override) {
    if (*dim_override < max_index) {
      throw DataError("dimension override " + std::to_string(*dim_override) +
                      " is smaller than the largest index " +
                      std::to_string(max_index));
    }
    dim = *dim_override;
  }
  std::vector<LabeledSample> samples;
  samples.reserve(raw.size());
  for (auto& r : raw) {
    samples.push_back({SparseVector(dim, std::move(r.entries)), r.y});
  }
  return Dataset(std::move(samples), dim);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  char buf[64];
  for (const auto& s : ds.samples()) {
    out << (s.y == Label::Positive ? "+1" : "-1");
    for (const auto& e : s.x) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
      out << ' ' << (e.index + 1) << ':' << std::string_view(buf, p - buf);
    }
    out << '\n';
  }
  if (!out) throw DataError("write error while emitting LIBSVM output");
}

SparseVector normalize(const SparseVector& x, std::size_t& zero_norm_count) {
  const double sq = x.squared_norm();
  if (sq == 0.0) {
    ++zero_norm_count;
    return x;
  }
  const double norm = std::sqrt(sq);
  if (std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    return x;
  }
  std::vector<SparseVector::Entry> entries(x.begin(), x.end());
  for (auto& e : entries) e.value /= norm;
  std::erase_if(entries, [](const auto& e) { return e.value == 0.0; });
  return SparseVector(x.dim(), std::move(entries));
}

SparseVector normalize(const SparseVector& x) {
  std::size_t ignored = 0;
  return normalize(x, ignored);
}

NormalizedDataset normalize(const Dataset& ds) {
  std::size_t zeros = 0;
  std::vector<LabeledSample> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples()) out.push_back({normalize(s.x, zeros), s.y});
  return {Dataset(std::move(out), ds.dim()), zeros};
}

Dataset permute(const Dataset& ds, std::uint64_t seed) {
  std::vector<LabeledSample> samples(ds.samples().begin(), ds.samples().end());
  Rng rng(seed);
  for (std::size_t i = samples.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(samples[i - 1], samples[j]);
  }
  return Dataset(std::move(samples), ds.dim());
}

void SynthConfig::validate() const {
  if (dim < 1) throw ConfigError("synth: dim must be >= 1");
  if (n_samples < 1) throw ConfigError("synth: n must be >= 1");
  if (!(imbalance_ratio >= 1.0) || !std::isfinite(imbalance_ratio)) {
    throw ConfigError("synth: ratio must be >= 1");
  }
  if (!(sparsity > 0.0 && sparsity <= 1.0)) {
    throw ConfigError("synth: sparsity must lie in (0, 1]");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw ConfigError("synth: separation must be >= 0");
  }
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw ConfigError("synth: offset must be >= 0");
  }
  if (offset > 0.0 && dim < 2) throw ConfigError("synth: offset needs dim >= 2");
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.dim;
  const std::size_t n = cfg.n_samples;
  const auto t_pos = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) / (cfg.imbalance_ratio + 1.0)));

  Rng rng(cfg.seed);
  std::vector<Label> labels(n, Label::Negative);
  std::fill_n(labels.begin(), std::min(t_pos, n), Label::Positive);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(labels[i - 1], labels[rng.below(i)]);
  }

  const double u = 1.0 / std::sqrt(static_cast<double>(d));
  // Offset direction: e_0 with its u-component removed, normalized.
  DenseVector shift(d, 0.0);
  if (cfg.offset > 0.0) {
    const double wn = std::sqrt(1.0 - 1.0 / static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) {
      shift[j] = ((j == 0 ? 1.0 : 0.0) - u * u) / wn * cfg.offset;
    }
  }
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.sparsity * static_cast<double>(d))));

  std::vector<SparseVector::Index> coords(d);
  std::vector<LabeledSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double half = 0.5 * cfg.separation * label_value(labels[i]);
    std::iota(coords.begin(), coords.end(), SparseVector::Index{0});
    for (std::size_t k = 0; k < keep && k + 1 < d; ++k) {
      std::swap(coords[k], coords[k + rng.below(d - k)]);
    }
    std::vector<SparseVector::Entry> entries;
    entries.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      const auto j = coords[k];
      entries.push_back({j, rng.normal() + half * u + shift[j]});
    }
    auto x = SparseVector::from_unsorted(d, std::move(entries));
    samples.push_back({normalize(x), labels[i]});
  }
  return Dataset(std::move(samples), d);
}

}  // namespace oa3
