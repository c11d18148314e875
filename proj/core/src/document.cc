#include "coref/document.h"

#include <algorithm>
#include <stdexcept>

namespace coref {

Document truncate_document(const Document& doc, int max_sentences, Rng& rng) {
  if (max_sentences < 1) {
    throw std::invalid_argument("truncate_document: max_sentences must be >= 1");
  }
  if (doc.num_sentences() <= max_sentences) return doc;

  const int first =
      static_cast<int>(rng.next_int(doc.num_sentences() - max_sentences + 1));
  const int last = first + max_sentences - 1;
  const int tok_lo = doc.sentences[static_cast<size_t>(first)].first;
  const int tok_hi = doc.sentences[static_cast<size_t>(last)].second;

  Document out;
  out.source_id = doc.source_id;
  out.part = doc.part;
  out.genre = doc.genre;
  out.tokens.reserve(static_cast<size_t>(tok_hi - tok_lo + 1));
  for (int t = tok_lo; t <= tok_hi; ++t) {
    Token tok = doc.tokens[static_cast<size_t>(t)];
    tok.document_index = t - tok_lo;
    tok.sentence_index -= first;
    out.tokens.push_back(std::move(tok));
  }
  out.sentences.reserve(static_cast<size_t>(max_sentences));
  for (int s = first; s <= last; ++s) {
    out.sentences.emplace_back(doc.sentences[static_cast<size_t>(s)].first - tok_lo,
                               doc.sentences[static_cast<size_t>(s)].second - tok_lo);
  }
  for (const Cluster& cluster : doc.gold_clusters) {
    Cluster kept;
    for (const Span& s : cluster) {
      if (s.start >= tok_lo && s.end <= tok_hi) {
        kept.push_back({s.start - tok_lo, s.end - tok_lo});
      }
    }
    if (kept.size() >= 2) out.gold_clusters.push_back(std::move(kept));
  }
  for (const Span& s : doc.gold_constituents) {
    if (s.start >= tok_lo && s.end <= tok_hi) {
      out.gold_constituents.push_back({s.start - tok_lo, s.end - tok_lo});
    }
  }
  return out;
}

}  // namespace coref
