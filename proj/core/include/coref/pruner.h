#ifndef COREF_PRUNER_H_
#define COREF_PRUNER_H_

#include <vector>

#include "coref/document.h"
#include "coref/tensor.h"

namespace coref {

// Two spans partially overlap: each contains exactly one endpoint of the
// other. Nesting and disjointness are not crossings.
inline bool spans_cross(const Span& a, const Span& b) {
  return (a.start < b.start && b.start <= a.end && a.end < b.end) ||
         (b.start < a.start && a.start <= b.end && b.end < a.end);
}

// All sentence-internal spans of width <= max_width, ordered by start then
// end.
std::vector<Span> enumerate_spans(const Document& doc, int max_width);

// Greedy acceptance in decreasing mention-score order (ties: earlier span
// order first); a candidate crossing any previously accepted span is
// suppressed and does not consume budget. Acceptance stops at
// max(1, floor(ratio * num_tokens)). Returns indices into `spans`,
// re-sorted to span order.
std::vector<int> prune_spans(const std::vector<Span>& spans,
                             const std::vector<real_t>& mention_scores,
                             double ratio, int num_tokens);

// For the accepted span at position p, candidates are positions
// max(0, p-K) .. p-1, nearest-last.
std::vector<std::vector<int>> candidate_antecedents(int num_accepted,
                                                    int max_antecedents);

// Fraction of gold mentions present in the accepted list; 1.0 when the
// gold clustering is empty.
double mention_recall(const std::vector<Span>& accepted,
                      const Clustering& gold_clusters);

}  // namespace coref

#endif  // COREF_PRUNER_H_
