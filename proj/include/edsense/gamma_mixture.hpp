#pragma once
// ============================================================================
// gamma_mixture.hpp -- offset sums of independent gamma variates
//
// The conditional per-dimension variance of the received signal is
//   sigma^2 = c + sum_i G_i,   G_i ~ Gamma(shape a_i, scale b_i),
// whose density is expanded in partial fractions over the distinct scales:
//   f(y) = sum_i sum_k Xi(i,k) (y-c)^(k-1) e^{-(y-c)/b_i} / (b_i^k (k-1)!).
// ============================================================================
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/numeric.hpp"

namespace edsense {

struct GammaComponent {
  int shape = 1;       ///< integer shape a_i (Nakagami m of the link)
  double scale = 1.0;  ///< scale b_i, energy units

  friend bool operator==(const GammaComponent&, const GammaComponent&) = default;
};

/// Relative tolerance under which two scales are treated as one pole.
inline constexpr double kScaleMergeTolerance = 1e-9;
/// Below this relative scale gap the expansion is flagged as ill-conditioned.
inline constexpr double kCloseScaleWarning = 1e-3;

/// Components whose scales agree within kScaleMergeTolerance collapse into a
/// single component with the summed shape. First-seen order is preserved.
inline std::vector<GammaComponent> merge_equal_scales(const std::vector<GammaComponent>& components) {
  std::vector<GammaComponent> out;
  out.reserve(components.size());
  for (const auto& c : components) {
    auto same = std::find_if(out.begin(), out.end(), [&](const GammaComponent& o) {
      return std::abs(o.scale - c.scale) <= kScaleMergeTolerance * std::max(o.scale, c.scale);
    });
    if (same != out.end()) {
      same->shape += c.shape;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

class GammaMixture {
 public:
  /// Validates and merges equal scales, so the stored poles are always distinct.
  GammaMixture(const std::vector<GammaComponent>& components, double offset) : offset_(offset) {
    detail::require(!components.empty(), "GammaMixture: at least one component required");
    detail::require(std::isfinite(offset) && offset >= 0.0, "GammaMixture: offset must be finite and >= 0");
    for (const auto& c : components) {
      detail::require(c.shape >= 1, "GammaMixture: shape must be a positive integer");
      detail::require(std::isfinite(c.scale) && c.scale > 0.0, "GammaMixture: scale must be finite and > 0");
    }
    components_ = merge_equal_scales(components);
  }

  [[nodiscard]] const std::vector<GammaComponent>& components() const noexcept { return components_; }
  [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
  [[nodiscard]] double offset() const noexcept { return offset_; }

  [[nodiscard]] double mean() const noexcept {
    double m = offset_;
    for (const auto& c : components_) m += c.shape * c.scale;
    return m;
  }

  [[nodiscard]] double max_scale() const noexcept {
    double m = 0.0;
    for (const auto& c : components_) m = std::max(m, c.scale);
    return m;
  }

  /// min over pairs of |b_i - b_q| / max(b_i, b_q); +inf for a single component.
  [[nodiscard]] double min_relative_gap() const noexcept {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < components_.size(); ++i) {
      for (std::size_t q = i + 1; q < components_.size(); ++q) {
        const double bi = components_[i].scale;
        const double bq = components_[q].scale;
        gap = std::min(gap, std::abs(bi - bq) / std::max(bi, bq));
      }
    }
    return gap;
  }

  [[nodiscard]] bool all_exponential() const noexcept {
    return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c.shape == 1; });
  }

 private:
  std::vector<GammaComponent> components_;
  double offset_;
};

struct MixtureDiagnostic {
  std::string code;  ///< e.g. "close_scales"
  double value;
  std::string message;
};

/// Partial-fraction coefficients Xi(i, k), k = 1..a_i. Immutable once built.
/// Stored in quad precision: clustered scales give coefficients of both
/// signs many orders of magnitude above their sum.
class XiTable {
 public:
  XiTable(std::vector<std::vector<quad>> entries, std::vector<MixtureDiagnostic> diagnostics)
      : entries_(std::move(entries)), diagnostics_(std::move(diagnostics)) {}

  /// Xi(i, k) with 0-based component index i and 1-based order k.
  [[nodiscard]] double operator()(std::size_t i, int k) const { return static_cast<double>(exact(i, k)); }
  [[nodiscard]] quad exact(std::size_t i, int k) const { return entries_.at(i).at(static_cast<std::size_t>(k - 1)); }
  [[nodiscard]] std::size_t components() const noexcept { return entries_.size(); }
  [[nodiscard]] int order(std::size_t i) const { return static_cast<int>(entries_.at(i).size()); }
  [[nodiscard]] const std::vector<MixtureDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

  /// sum |Xi(i, k)|: how far the partial-fraction terms exceed the density.
  [[nodiscard]] double condition() const noexcept {
    quad s = 0;
    for (const auto& row : entries_)
      for (quad v : row) s += fp::abs(v);
    return static_cast<double>(s);
  }

  [[nodiscard]] double sum() const noexcept {
    quad s = quad{0};
    for (const auto& row : entries_)
      for (quad v : row) s += v;
    return static_cast<double>(s);
  }

 private:
  std::vector<std::vector<quad>> entries_;
  std::vector<MixtureDiagnostic> diagnostics_;
};

/// Partial-fraction coefficients of prod_q (1 - b_q s)^(-a_q).
///
/// Leading coefficient per pole: Xi(i, a_i) = prod_{q != i} (1 - b_q/b_i)^(-a_q).
/// Lower orders follow the corrected recursion
///   Xi(i, a_i - k) = (1/k) sum_{q != i} sum_{j=1..k}
///                    a_q / b_i^j (1/b_i - 1/b_q)^(-j) Xi(i, a_i - k + j).
/// Throws ConditioningError if a coefficient does not fit in a double.
inline XiTable xi_coefficients(const GammaMixture& mix) {
  const auto& comps = mix.components();
  const std::size_t n = comps.size();
  std::vector<std::vector<quad>> table(n);
  std::vector<MixtureDiagnostic> diagnostics;

  const double gap = mix.min_relative_gap();
  if (gap < kCloseScaleWarning) {
    diagnostics.push_back({"close_scales", gap,
                           "minimum relative scale gap " + std::to_string(gap) +
                               " is below 1e-3; partial-fraction coefficients may lose precision"});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const int ai = comps[i].shape;
    const quad bi = comps[i].scale;
    auto& row = table[i];
    row.assign(static_cast<std::size_t>(ai), quad{0});

    quad lead = quad{1};
    for (std::size_t q = 0; q < n; ++q) {
      if (q == i) continue;
      lead *= powq(quad{1} - comps[q].scale / bi, -comps[q].shape);
    }
    row[static_cast<std::size_t>(ai - 1)] = lead;

    // b_i^-j (1/b_i - 1/b_q)^-j == (1 - b_i/b_q)^-j
    std::vector<quad> ratio(n, quad{0});
    for (std::size_t q = 0; q < n; ++q) {
      if (q != i) ratio[q] = quad{1} / (quad{1} - bi / comps[q].scale);
    }

    for (int k = 1; k < ai; ++k) {
      detail::BasicCompensatedSum<quad> acc;
      for (std::size_t q = 0; q < n; ++q) {
        if (q == i) continue;
        quad power = quad{1};
        for (int j = 1; j <= k; ++j) {
          power *= ratio[q];
          acc.add(comps[q].shape * power * row[static_cast<std::size_t>(ai - k + j - 1)]);
        }
      }
      row[static_cast<std::size_t>(ai - k - 1)] = acc.value() / k;
    }

    for (quad v : row) {
      if (!std::isfinite(static_cast<double>(v))) {
        throw ConditioningError("xi_coefficients: non-finite coefficient for component " + std::to_string(i) +
                                " (minimum relative scale gap " + std::to_string(gap) + ")");
      }
    }
  }
  return XiTable(std::move(table), std::move(diagnostics));
}

/// Density of c + sum_i Gamma(a_i, b_i) at y; zero below the offset.
inline double mixture_pdf(const GammaMixture& mix, const XiTable& xi, double y) {
  detail::require(std::isfinite(y), "mixture_pdf: y must be finite");
  const quad u = static_cast<quad>(y) - mix.offset();
  if (u < quad{0}) return 0.0;
  detail::BasicCompensatedSum<quad> acc;
  const auto& comps = mix.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const quad b = comps[i].scale;
    // kernel_k = u^(k-1) e^(-u/b) / (b^k (k-1)!)
    quad kernel = fp::exp(-u / b) / b;
    for (int k = 1; k <= comps[i].shape; ++k) {
      if (k > 1) kernel *= u / (b * (k - 1));
      acc.add(xi.exact(i, k) * kernel);
    }
  }
  return std::max(0.0, static_cast<double>(acc.value()));
}

/// E[exp(s sigma^2)] = e^{s c} prod_i (1 - b_i s)^(-a_i), for s < 1 / max b_i.
inline double mixture_mgf(const GammaMixture& mix, double s) {
  detail::require(std::isfinite(s), "mixture_mgf: s must be finite");
  if (!(s < 1.0 / mix.max_scale())) {
    throw DomainError("mixture_mgf: s = " + std::to_string(s) + " is at or beyond the pole 1/max(b)");
  }
  double log_value = s * mix.offset();
  for (const auto& c : mix.components()) log_value -= c.shape * std::log1p(-c.scale * s);
  return std::exp(log_value);
}

}  // namespace edsense
