#ifndef COREF_VOCAB_H_
#define COREF_VOCAB_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/document.h"

namespace coref {

// Decodes UTF-8 into codepoints; each byte of an invalid sequence becomes
// its own codepoint so decoding is total.
std::vector<uint32_t> decode_utf8(const std::string& s);

// Character table with id 0 reserved for unknown characters. Ids are
// assigned by first occurrence over the corpus, so rebuilding from the
// same documents reproduces the same table.
class CharVocab {
 public:
  static constexpr int kUnknownId = 0;

  CharVocab() { codepoints_.push_back(0); }  // slot 0 = unknown

  static CharVocab build(const std::vector<Document>& docs);
  static CharVocab from_codepoints(const std::vector<uint32_t>& known);

  int id(uint32_t codepoint) const {
    auto it = index_.find(codepoint);
    return it == index_.end() ? kUnknownId : it->second;
  }
  std::vector<int> encode(const std::string& utf8_token) const;

  // Table size including the unknown slot.
  int size() const { return static_cast<int>(codepoints_.size()); }
  // Known codepoints in id order; entry 0 is the unknown placeholder.
  const std::vector<uint32_t>& codepoints() const { return codepoints_; }

 private:
  void add(uint32_t cp) {
    if (index_.emplace(cp, size()).second) codepoints_.push_back(cp);
  }

  std::vector<uint32_t> codepoints_;
  std::unordered_map<uint32_t, int> index_;
};

}  // namespace coref

#endif  // COREF_VOCAB_H_
