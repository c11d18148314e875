#ifndef COREF_CONLL_H_
#define COREF_CONLL_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "coref/document.h"

namespace coref {

// Malformed input; `line` is the 1-based line number in the stream.
struct ConllError : std::runtime_error {
  int line;
  ConllError(int line_number, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
};

// Reads every `#begin document ... #end document` block from a
// CoNLL-2012-format stream. Decodes the trailing coreference column with a
// per-cluster-id open-bracket stack and reconstructs constituent spans
// from the parse-bit column when one is present.
std::vector<Document> parse_conll(std::istream& in);
std::vector<Document> parse_conll_file(const std::string& path);

// Serializes one document with `predicted` as its coreference layer.
// parse_conll(write_conll(d, c)) reproduces d's tokens, speakers and c
// exactly; cluster ids are densely renumbered from 0. A span occurring in
// two clusters is rejected.
std::string write_conll(const Document& doc, const Clustering& predicted);

void write_conll_file(const std::string& path,
                      const std::vector<Document>& docs,
                      const std::vector<Clustering>& predictions);

}  // namespace coref

#endif  // COREF_CONLL_H_
