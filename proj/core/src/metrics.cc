#include "coref/metrics.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace coref {

namespace {

// Span -> cluster index, rejecting any mention that appears twice on one
// side.
std::map<Span, int> mention_index(const Clustering& side, const char* name) {
  std::map<Span, int> index;
  for (size_t c = 0; c < side.size(); ++c) {
    for (const Span& s : side[c]) {
      if (!index.emplace(s, static_cast<int>(c)).second) {
        throw std::invalid_argument(std::string(name) +
                                    " clustering has overlapping clusters");
      }
    }
  }
  return index;
}

size_t total_mentions(const Clustering& side) {
  size_t n = 0;
  for (const Cluster& c : side) n += c.size();
  return n;
}

bool effectively_empty(const Clustering& side) {
  return total_mentions(side) == 0;
}

// One direction of MUC: sum over `from` clusters of |K| - |partition of K
// under `to`|.
void muc_direction(const Clustering& from, const std::map<Span, int>& to,
                   double* num, double* den) {
  *num = 0;
  *den = 0;
  for (const Cluster& k : from) {
    std::set<int> groups;
    int unmatched = 0;
    for (const Span& s : k) {
      auto it = to.find(s);
      if (it == to.end()) {
        ++unmatched;
      } else {
        groups.insert(it->second);
      }
    }
    const int parts = static_cast<int>(groups.size()) + unmatched;
    *num += static_cast<double>(static_cast<int>(k.size()) - parts);
    *den += static_cast<double>(k.size()) - 1;
  }
}

// One direction of B³: average per-mention overlap of own cluster with the
// other side's cluster (implicit singleton when absent).
void b3_direction(const Clustering& own, const Clustering& other,
                  const std::map<Span, int>& other_index, double* num,
                  double* den) {
  *num = 0;
  *den = static_cast<double>(total_mentions(own));
  for (const Cluster& c : own) {
    const std::set<Span> own_set(c.begin(), c.end());
    for (const Span& m : c) {
      auto it = other_index.find(m);
      size_t overlap;
      if (it == other_index.end()) {
        overlap = 1;  // implicit singleton intersects own cluster at m
      } else {
        const Cluster& o = other[static_cast<size_t>(it->second)];
        overlap = 0;
        for (const Span& s : o) overlap += own_set.count(s);
      }
      *num += static_cast<double>(overlap) / static_cast<double>(c.size());
    }
  }
}

double phi4(const Cluster& a, const Cluster& b) {
  std::set<Span> sa(a.begin(), a.end());
  size_t inter = 0;
  for (const Span& s : b) inter += sa.count(s);
  return 2.0 * static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size());
}

}  // namespace

MetricResult MetricResult::from_counts(double p_num, double p_den,
                                       double r_num, double r_den) {
  MetricResult r;
  r.p_num = p_num;
  r.p_den = p_den;
  r.r_num = r_num;
  r.r_den = r_den;
  r.precision = p_den > 0 ? p_num / p_den : 0;
  r.recall = r_den > 0 ? r_num / r_den : 0;
  r.f1 = (r.precision + r.recall) > 0
             ? 2 * r.precision * r.recall / (r.precision + r.recall)
             : 0;
  return r;
}

MetricResult aggregate(const std::vector<MetricResult>& per_document) {
  double pn = 0, pd = 0, rn = 0, rd = 0;
  for (const MetricResult& m : per_document) {
    pn += m.p_num;
    pd += m.p_den;
    rn += m.r_num;
    rd += m.r_den;
  }
  return MetricResult::from_counts(pn, pd, rn, rd);
}

MetricResult muc(const Clustering& gold, const Clustering& pred) {
  const auto gold_index = mention_index(gold, "gold");
  const auto pred_index = mention_index(pred, "predicted");
  if (effectively_empty(gold) && effectively_empty(pred)) {
    MetricResult r;
    r.precision = r.recall = r.f1 = 1;
    return r;
  }
  double r_num, r_den, p_num, p_den;
  muc_direction(gold, pred_index, &r_num, &r_den);
  muc_direction(pred, gold_index, &p_num, &p_den);
  return MetricResult::from_counts(p_num, p_den, r_num, r_den);
}

MetricResult b_cubed(const Clustering& gold, const Clustering& pred) {
  const auto gold_index = mention_index(gold, "gold");
  const auto pred_index = mention_index(pred, "predicted");
  const bool gold_empty = effectively_empty(gold);
  const bool pred_empty = effectively_empty(pred);
  if (gold_empty && pred_empty) {
    MetricResult r;
    r.precision = r.recall = r.f1 = 1;
    return r;
  }
  if (gold_empty || pred_empty) {
    return MetricResult::from_counts(0, static_cast<double>(total_mentions(pred)),
                                     0, static_cast<double>(total_mentions(gold)));
  }
  double r_num, r_den, p_num, p_den;
  b3_direction(gold, pred, pred_index, &r_num, &r_den);
  b3_direction(pred, gold, gold_index, &p_num, &p_den);
  return MetricResult::from_counts(p_num, p_den, r_num, r_den);
}

double max_assignment(const std::vector<std::vector<double>>& weight) {
  const int rows = static_cast<int>(weight.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(weight[0].size());
  if (cols == 0) return 0;

  // Augmenting-path method with potentials on the (transposed if needed)
  // square-padded cost matrix; cost = -weight so min-cost = max-weight.
  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  auto cost = [&](int i, int j) {
    return transpose ? -weight[static_cast<size_t>(j)][static_cast<size_t>(i)]
                     : -weight[static_cast<size_t>(i)][static_cast<size_t>(j)];
  };

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0);
  std::vector<double> v(static_cast<size_t>(m) + 1, 0);
  std::vector<int> match(static_cast<size_t>(m) + 1, 0);  // column -> row
  std::vector<int> way(static_cast<size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(m) + 1, kInf);
    std::vector<bool> used(static_cast<size_t>(m) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  double total = 0;
  for (int j = 1; j <= m; ++j) {
    const int i = match[static_cast<size_t>(j)];
    if (i != 0) total += -cost(i - 1, j - 1);
  }
  return total;
}

MetricResult ceaf_phi4(const Clustering& gold, const Clustering& pred) {
  mention_index(gold, "gold");
  mention_index(pred, "predicted");
  const bool gold_empty = effectively_empty(gold);
  const bool pred_empty = effectively_empty(pred);
  if (gold_empty && pred_empty) {
    MetricResult r;
    r.precision = r.recall = r.f1 = 1;
    return r;
  }
  if (gold_empty || pred_empty) {
    return MetricResult::from_counts(0, static_cast<double>(pred.size()), 0,
                                     static_cast<double>(gold.size()));
  }
  std::vector<std::vector<double>> weight(gold.size(),
                                          std::vector<double>(pred.size()));
  for (size_t i = 0; i < gold.size(); ++i) {
    for (size_t j = 0; j < pred.size(); ++j) {
      weight[i][j] = phi4(gold[i], pred[j]);
    }
  }
  const double total = max_assignment(weight);
  return MetricResult::from_counts(total, static_cast<double>(pred.size()),
                                   total, static_cast<double>(gold.size()));
}

double avg_f1(const MetricResult& muc_result, const MetricResult& b3_result,
              const MetricResult& ceaf_result) {
  return (muc_result.f1 + b3_result.f1 + ceaf_result.f1) / 3.0;
}

ConstituencyPrecision constituency_precision(
    const std::vector<Span>& accepted, const std::vector<Span>& constituents,
    int max_width) {
  ConstituencyPrecision out;
  out.by_width.assign(static_cast<size_t>(max_width), std::nullopt);
  out.accepted_counts.assign(static_cast<size_t>(max_width), 0);
  if (constituents.empty()) return out;
  out.available = true;
  const std::set<Span> gold(constituents.begin(), constituents.end());
  std::vector<int> matches(static_cast<size_t>(max_width), 0);
  for (const Span& s : accepted) {
    const int w = s.width();
    if (w < 1 || w > max_width) continue;
    out.accepted_counts[static_cast<size_t>(w - 1)]++;
    if (gold.count(s)) matches[static_cast<size_t>(w - 1)]++;
  }
  for (int w = 0; w < max_width; ++w) {
    if (out.accepted_counts[static_cast<size_t>(w)] > 0) {
      out.by_width[static_cast<size_t>(w)] =
          static_cast<double>(matches[static_cast<size_t>(w)]) /
          static_cast<double>(out.accepted_counts[static_cast<size_t>(w)]);
    }
  }
  return out;
}

}  // namespace coref
