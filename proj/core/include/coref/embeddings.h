#ifndef COREF_EMBEDDINGS_H_
#define COREF_EMBEDDINGS_H_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/tensor.h"

namespace coref {

// Fixed pretrained word vectors. Stored vectors are L2-normalized on
// insertion; lookups fall back to the lowercased token (when enabled) and
// then to the zero vector, so lookup is total.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim, bool lowercase_fallback = true)
      : dim_(dim), lowercase_fallback_(lowercase_fallback) {}

  // Text format: one entry per line, token then `dim` whitespace-separated
  // reals. Duplicate tokens keep the first occurrence; a wrong value count
  // is rejected with its line number.
  static EmbeddingTable load(std::istream& in, int expected_dim,
                             bool lowercase_fallback = true);
  static EmbeddingTable load_file(const std::string& path, int expected_dim,
                                  bool lowercase_fallback = true);

  void add(const std::string& token, std::vector<real_t> values);
  // Inserts without renormalizing: for vectors that are already unit
  // length (e.g. read back from a checkpoint), keeping the bytes exact.
  void add_raw(const std::string& token, std::vector<real_t> values);
  std::vector<real_t> lookup(const std::string& token) const;
  bool contains(const std::string& token) const {
    return table_.count(token) > 0;
  }

  int dim() const { return dim_; }
  size_t size() const { return table_.size(); }
  bool lowercase_fallback() const { return lowercase_fallback_; }

  // Deterministic (sorted) iteration for checkpoint serialization.
  std::vector<std::pair<std::string, std::vector<real_t>>> sorted_entries() const;

 private:
  int dim_;
  bool lowercase_fallback_;
  std::unordered_map<std::string, std::vector<real_t>> table_;
};

}  // namespace coref

#endif  // COREF_EMBEDDINGS_H_
