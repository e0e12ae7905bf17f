#pragma once

// Threshold selection, FPR at a target TPR, and rank-based AUROC.

#include <span>
#include <vector>

namespace hopboost {

struct ScoredDataset {
  std::vector<double> id_scores;
  std::vector<double> ood_scores;

  // Both sides nonempty (kEmptyInput) and finite (kNonFinite).
  void validate() const;
};

struct OodMetrics {
  double fpr95 = 0.0;  // FPR at the requested TPR (0.95 by default)
  double auroc = 0.0;
  double gamma = 0.0;  // threshold used for the FPR
};

// Largest γ with #{s >= γ} >= tpr·n over the ID scores. tpr outside (0, 1]
// -> kRange; empty -> kEmptyInput.
double threshold_at_tpr(std::span<const double> id_scores, double tpr);

// Fraction of OOD scores >= threshold_at_tpr(ID, tpr).
double fpr_at_tpr(const ScoredDataset& data, double tpr = 0.95);

// P(s_id > s_ood) + ½·P(s_id = s_ood), by sorting with midranks.
double auroc(const ScoredDataset& data);

OodMetrics evaluate(const ScoredDataset& data, double tpr = 0.95);

}  // namespace hopboost
