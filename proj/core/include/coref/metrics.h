#ifndef COREF_METRICS_H_
#define COREF_METRICS_H_

#include <optional>
#include <vector>

#include "coref/document.h"

namespace coref {

// Precision/recall/F1 plus the raw numerators and denominators, so
// corpus-level scores can micro-aggregate across documents.
struct MetricResult {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double p_num = 0, p_den = 0;
  double r_num = 0, r_den = 0;

  static MetricResult from_counts(double p_num, double p_den, double r_num,
                                  double r_den);
};

// Sums numerators/denominators over documents and recomputes P/R/F1.
MetricResult aggregate(const std::vector<MetricResult>& per_document);

// Link-based metric: recall credits each gold cluster with |K| minus the
// number of groups it splits into under the prediction (unmatched mentions
// count as their own groups); precision swaps the roles. Duplicate
// mentions within one side are rejected.
MetricResult muc(const Clustering& gold, const Clustering& pred);

// Per-mention overlap metric; mentions absent from the other side
// intersect with their implicit singleton. An empty side scores zero
// (both empty scores one).
MetricResult b_cubed(const Clustering& gold, const Clustering& pred);

// Entity-alignment metric with similarity phi4(R,S) = 2|R∩S|/(|R|+|S|),
// solved exactly by an O(n^3) optimal-assignment method.
MetricResult ceaf_phi4(const Clustering& gold, const Clustering& pred);

double avg_f1(const MetricResult& muc_result, const MetricResult& b3_result,
              const MetricResult& ceaf_result);

// Max-weight one-to-one assignment between rows and columns of `weight`
// (rows x cols, not necessarily square). Returns total weight. Exposed for
// the permutation-oracle test.
double max_assignment(const std::vector<std::vector<double>>& weight);

// Fraction of accepted spans of each width 1..max_width exactly matching a
// gold constituent. Widths with no accepted spans are nullopt; documents
// without constituent data report available=false.
struct ConstituencyPrecision {
  bool available = false;
  std::vector<std::optional<double>> by_width;  // index 0 = width 1
  std::vector<int> accepted_counts;
};
ConstituencyPrecision constituency_precision(
    const std::vector<Span>& accepted, const std::vector<Span>& constituents,
    int max_width);

}  // namespace coref

#endif  // COREF_METRICS_H_
