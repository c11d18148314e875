#include "coref/vocab.h"

namespace coref {

std::vector<uint32_t> decode_utf8(const std::string& s) {
  std::vector<uint32_t> out;
  size_t i = 0;
  const size_t n = s.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    int len;
    uint32_t cp;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(b0);  // stray continuation/invalid byte
      ++i;
      continue;
    }
    if (i + static_cast<size_t>(len) > n) {
      out.push_back(b0);
      ++i;
      continue;
    }
    bool valid = true;
    for (int k = 1; k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(s[i + static_cast<size_t>(k)]);
      if ((bk & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!valid) {
      out.push_back(b0);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<size_t>(len);
  }
  return out;
}

CharVocab CharVocab::build(const std::vector<Document>& docs) {
  CharVocab vocab;
  for (const Document& doc : docs) {
    for (const Token& tok : doc.tokens) {
      for (uint32_t cp : decode_utf8(tok.text)) vocab.add(cp);
    }
  }
  return vocab;
}

CharVocab CharVocab::from_codepoints(const std::vector<uint32_t>& known) {
  CharVocab vocab;
  for (uint32_t cp : known) vocab.add(cp);
  return vocab;
}

std::vector<int> CharVocab::encode(const std::string& utf8_token) const {
  std::vector<int> ids;
  const std::vector<uint32_t> cps = decode_utf8(utf8_token);
  ids.reserve(cps.size());
  for (uint32_t cp : cps) ids.push_back(id(cp));
  return ids;
}

}  // namespace coref
