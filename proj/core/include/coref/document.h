#ifndef COREF_DOCUMENT_H_
#define COREF_DOCUMENT_H_

#include <string>
#include <utility>
#include <vector>

#include "coref/rng.h"

namespace coref {

// Inclusive token range. Orders by start, then by end, matching the
// enumeration order used for candidate spans.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool operator==(const Span& o) const {
    return start == o.start && end == o.end;
  }
  bool operator!=(const Span& o) const { return !(*this == o); }
  bool operator<(const Span& o) const {
    if (start != o.start) return start < o.start;
    return end < o.end;
  }
};

using Cluster = std::vector<Span>;
using Clustering = std::vector<Cluster>;

struct Token {
  std::string text;
  int sentence_index = 0;
  std::string speaker;
  int document_index = 0;
};

struct Document {
  std::string source_id;  // column 0 of the source file
  int part = 0;
  std::string genre;  // first path component of source_id
  std::vector<Token> tokens;
  std::vector<std::pair<int, int>> sentences;  // inclusive token ranges
  Clustering gold_clusters;
  std::vector<Span> gold_constituents;  // from the parse column, may be empty

  std::string doc_key() const {
    return source_id + "_" + std::to_string(part);
  }
  int num_tokens() const { return static_cast<int>(tokens.size()); }
  int num_sentences() const { return static_cast<int>(sentences.size()); }
};

// Keeps a uniformly random contiguous window of `max_sentences` sentences
// (documents at or under the limit pass through unchanged). Token indices
// are re-based to 0; gold mentions outside the window are dropped and
// clusters left with fewer than 2 mentions are removed.
Document truncate_document(const Document& doc, int max_sentences, Rng& rng);

}  // namespace coref

#endif  // COREF_DOCUMENT_H_
