#include "coref/pruner.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace coref {

std::vector<Span> enumerate_spans(const Document& doc, int max_width) {
  if (max_width < 1) throw std::invalid_argument("enumerate_spans: max_width < 1");
  std::vector<Span> spans;
  for (const auto& [lo, hi] : doc.sentences) {
    for (int start = lo; start <= hi; ++start) {
      const int last = std::min(hi, start + max_width - 1);
      for (int end = start; end <= last; ++end) spans.push_back({start, end});
    }
  }
  std::sort(spans.begin(), spans.end());
  return spans;
}

std::vector<int> prune_spans(const std::vector<Span>& spans,
                             const std::vector<real_t>& mention_scores,
                             double ratio, int num_tokens) {
  if (spans.size() != mention_scores.size()) {
    throw std::invalid_argument("prune_spans: scores/spans size mismatch");
  }
  for (real_t s : mention_scores) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("prune_spans: non-finite mention score");
    }
  }
  const int budget =
      std::max(1, static_cast<int>(std::floor(ratio * num_tokens)));

  std::vector<int> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const real_t sa = mention_scores[static_cast<size_t>(a)];
    const real_t sb = mention_scores[static_cast<size_t>(b)];
    if (sa != sb) return sa > sb;
    return spans[static_cast<size_t>(a)] < spans[static_cast<size_t>(b)];
  });

  std::vector<int> accepted;
  for (int idx : order) {
    if (static_cast<int>(accepted.size()) >= budget) break;
    const Span& s = spans[static_cast<size_t>(idx)];
    const bool crossing = std::any_of(
        accepted.begin(), accepted.end(),
        [&](int a) { return spans_cross(s, spans[static_cast<size_t>(a)]); });
    if (!crossing) accepted.push_back(idx);
  }
  std::sort(accepted.begin(), accepted.end(), [&](int a, int b) {
    return spans[static_cast<size_t>(a)] < spans[static_cast<size_t>(b)];
  });
  return accepted;
}

std::vector<std::vector<int>> candidate_antecedents(int num_accepted,
                                                    int max_antecedents) {
  if (max_antecedents < 1) {
    throw std::invalid_argument("candidate_antecedents: K < 1");
  }
  std::vector<std::vector<int>> out(static_cast<size_t>(num_accepted));
  for (int p = 0; p < num_accepted; ++p) {
    const int lo = std::max(0, p - max_antecedents);
    out[static_cast<size_t>(p)].reserve(static_cast<size_t>(p - lo));
    for (int j = lo; j < p; ++j) out[static_cast<size_t>(p)].push_back(j);
  }
  return out;
}

double mention_recall(const std::vector<Span>& accepted,
                      const Clustering& gold_clusters) {
  std::set<Span> gold;
  for (const Cluster& c : gold_clusters) gold.insert(c.begin(), c.end());
  if (gold.empty()) return 1.0;
  const std::set<Span> kept(accepted.begin(), accepted.end());
  int hit = 0;
  for (const Span& s : gold) hit += kept.count(s) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

}  // namespace coref
