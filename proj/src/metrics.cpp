#include "hopboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "hopboost/error.hpp"

namespace hopboost {

namespace {

void check_side(std::span<const double> s, const char* which) {
  if (s.empty()) fail(ErrorCode::kEmptyInput, std::string(which) + " scores are empty");
  for (double v : s)
    if (!std::isfinite(v))
      fail(ErrorCode::kNonFinite, std::string(which) + " scores contain NaN or Inf");
}

}  // namespace

void ScoredDataset::validate() const {
  check_side(id_scores, "ID");
  check_side(ood_scores, "OOD");
}

double threshold_at_tpr(std::span<const double> id_scores, double tpr) {
  check_side(id_scores, "ID");
  if (!(tpr > 0.0) || tpr > 1.0) fail(ErrorCode::kRange, "tpr must lie in (0, 1]");
  const std::size_t n = id_scores.size();
  // Required number of accepted ID scores; the epsilon absorbs binary
  // rounding of tpr·n (0.95·100 is not exactly 95).
  auto k = static_cast<std::size_t>(std::ceil(tpr * static_cast<double>(n) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);
  std::vector<double> sorted(id_scores.begin(), id_scores.end());
  // k-th largest score: every γ above it accepts fewer than k scores.
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   sorted.end(), std::greater<>());
  return sorted[k - 1];
}

double fpr_at_tpr(const ScoredDataset& data, double tpr) {
  data.validate();
  const double gamma = threshold_at_tpr(data.id_scores, tpr);
  const auto hits = std::count_if(data.ood_scores.begin(), data.ood_scores.end(),
                                  [gamma](double s) { return s >= gamma; });
  return static_cast<double>(hits) / static_cast<double>(data.ood_scores.size());
}

double auroc(const ScoredDataset& data) {
  data.validate();
  const std::size_t n_id = data.id_scores.size();
  const std::size_t n_ood = data.ood_scores.size();
  struct Item {
    double s;
    bool id;
  };
  std::vector<Item> all;
  all.reserve(n_id + n_ood);
  for (double s : data.id_scores) all.push_back({s, true});
  for (double s : data.ood_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.s < b.s; });

  // Sum of doubled midranks of the ID scores keeps everything integral.
  unsigned long long rank2_sum = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].s == all[i].s) ++j;
    const unsigned long long doubled_mid = static_cast<unsigned long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (all[k].id) rank2_sum += doubled_mid;
    i = j;
  }
  // U = R_id − n_id(n_id+1)/2 counts wins plus half ties.
  const unsigned long long u2 = rank2_sum - static_cast<unsigned long long>(n_id) * (n_id + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(n_id) * static_cast<double>(n_ood));
}

OodMetrics evaluate(const ScoredDataset& data, double tpr) {
  OodMetrics m;
  m.gamma = threshold_at_tpr(data.id_scores, tpr);
  m.fpr95 = fpr_at_tpr(data, tpr);
  m.auroc = auroc(data);
  return m;
}

}  // namespace hopboost
