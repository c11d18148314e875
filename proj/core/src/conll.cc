#include "coref/conll.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace coref {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string field;
  while (is >> field) out.push_back(field);
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string genre_of(const std::string& source_id) {
  auto slash = source_id.find('/');
  return slash == std::string::npos ? source_id : source_id.substr(0, slash);
}

int parse_cluster_id(const std::string& digits, int line_no) {
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw ConllError(line_no, "malformed coreference field entry '" + digits + "'");
  }
  return std::stoi(digits);
}

// Parser state for one document between #begin and #end.
struct DocBuilder {
  Document doc;
  int begin_line = 0;
  int sentence_start = -1;         // token index, -1 when no open sentence
  int columns_this_sentence = -1;  // enforced consistent per sentence
  std::vector<int> parse_stack;    // constituent open positions
  // cluster id -> open mention starts (LIFO) with the line that opened them
  std::map<int, std::vector<std::pair<int, int>>> open_mentions;
  std::vector<int> cluster_order;            // first-seen cluster ids
  std::map<int, Cluster> clusters_by_id;

  void add_mention(int id, Span span, int line_no) {
    if (doc.tokens[static_cast<size_t>(span.start)].sentence_index !=
        doc.tokens[static_cast<size_t>(span.end)].sentence_index) {
      throw ConllError(line_no, "mention crosses a sentence boundary");
    }
    if (!clusters_by_id.count(id)) cluster_order.push_back(id);
    clusters_by_id[id].push_back(span);
  }

  void end_sentence() {
    if (sentence_start < 0) return;
    doc.sentences.emplace_back(sentence_start, doc.num_tokens() - 1);
    sentence_start = -1;
    columns_this_sentence = -1;
  }

  Document finish(int line_no) {
    end_sentence();
    for (const auto& [id, opens] : open_mentions) {
      if (!opens.empty()) {
        throw ConllError(line_no, "unclosed coreference bracket (" +
                                      std::to_string(id) + " opened at line " +
                                      std::to_string(opens.back().second));
      }
    }
    if (!parse_stack.empty()) {
      throw ConllError(line_no, "unclosed constituent in parse column");
    }
    if (doc.tokens.empty()) {
      throw ConllError(line_no, "document has no tokens");
    }
    for (int id : cluster_order) {
      Cluster& c = clusters_by_id[id];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      doc.gold_clusters.push_back(std::move(c));
    }
    std::sort(doc.gold_constituents.begin(), doc.gold_constituents.end());
    doc.gold_constituents.erase(std::unique(doc.gold_constituents.begin(),
                                            doc.gold_constituents.end()),
                                doc.gold_constituents.end());
    return std::move(doc);
  }
};

void read_parse_bit(const std::string& bit, int token, int line_no,
                    DocBuilder& b) {
  if (bit == "-") return;
  for (size_t i = 0; i < bit.size(); ++i) {
    if (bit[i] == '(') {
      b.parse_stack.push_back(token);
    } else if (bit[i] == ')') {
      if (b.parse_stack.empty()) {
        throw ConllError(line_no, "unbalanced ')' in parse column");
      }
      b.doc.gold_constituents.push_back({b.parse_stack.back(), token});
      b.parse_stack.pop_back();
    }
  }
}

void read_coref_field(const std::string& field, int token, int line_no,
                      DocBuilder& b) {
  if (field == "-") return;
  size_t pos = 0;
  while (pos <= field.size()) {
    size_t bar = field.find('|', pos);
    std::string part = field.substr(
        pos, bar == std::string::npos ? std::string::npos : bar - pos);
    if (part.empty()) throw ConllError(line_no, "empty coreference field entry");
    const bool opens = part.front() == '(';
    const bool closes = part.back() == ')';
    std::string digits = part.substr(opens ? 1 : 0,
                                     part.size() - (opens ? 1 : 0) - (closes ? 1 : 0));
    const int id = parse_cluster_id(digits, line_no);
    if (opens && closes) {
      b.add_mention(id, {token, token}, line_no);
    } else if (opens) {
      b.open_mentions[id].emplace_back(token, line_no);
    } else if (closes) {
      auto& stack = b.open_mentions[id];
      if (stack.empty()) {
        throw ConllError(line_no, "'" + std::to_string(id) +
                                      ")' without a matching '(" +
                                      std::to_string(id) + "'");
      }
      b.add_mention(id, {stack.back().first, token}, line_no);
      stack.pop_back();
    } else {
      throw ConllError(line_no, "malformed coreference field entry '" + part + "'");
    }
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
}

}  // namespace

std::vector<Document> parse_conll(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  std::unique_ptr<DocBuilder> builder;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line.rfind("#begin document", 0) == 0) {
      if (builder) throw ConllError(line_no, "nested '#begin document'");
      auto open = line.find('(');
      auto close = line.find(')', open == std::string::npos ? 0 : open);
      auto part_kw = line.find("part ", close == std::string::npos ? 0 : close);
      if (open == std::string::npos || close == std::string::npos ||
          part_kw == std::string::npos) {
        throw ConllError(line_no, "malformed '#begin document' header");
      }
      builder = std::make_unique<DocBuilder>();
      builder->begin_line = line_no;
      builder->doc.source_id = line.substr(open + 1, close - open - 1);
      builder->doc.genre = genre_of(builder->doc.source_id);
      builder->doc.part = std::stoi(line.substr(part_kw + 5));
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!builder) throw ConllError(line_no, "'#end document' without begin");
      docs.push_back(builder->finish(line_no));
      builder.reset();
      continue;
    }
    if (!builder) {
      if (is_blank(line) || line[0] == '#') continue;
      throw ConllError(line_no, "token row outside any document");
    }
    if (is_blank(line)) {
      builder->end_sentence();
      continue;
    }

    std::vector<std::string> cols = split_ws(line);
    if (cols.size() < 12) {
      throw ConllError(line_no, "expected at least 12 columns, got " +
                                    std::to_string(cols.size()));
    }
    if (builder->columns_this_sentence < 0) {
      builder->columns_this_sentence = static_cast<int>(cols.size());
    } else if (static_cast<int>(cols.size()) != builder->columns_this_sentence) {
      throw ConllError(line_no,
                       "inconsistent column count within a sentence: got " +
                           std::to_string(cols.size()) + ", expected " +
                           std::to_string(builder->columns_this_sentence));
    }

    const int token_index = builder->doc.num_tokens();
    if (builder->sentence_start < 0) builder->sentence_start = token_index;
    Token tok;
    tok.text = cols[3];
    tok.speaker = cols[9];
    tok.document_index = token_index;
    tok.sentence_index = builder->doc.num_sentences();
    builder->doc.tokens.push_back(std::move(tok));

    read_parse_bit(cols[5], token_index, line_no, *builder);
    read_coref_field(cols.back(), token_index, line_no, *builder);
  }
  if (builder) {
    throw ConllError(line_no, "missing '#end document' (document started at line " +
                                  std::to_string(builder->begin_line) + ")");
  }
  return docs;
}

std::vector<Document> parse_conll_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_conll(in);
}

std::string write_conll(const Document& doc, const Clustering& predicted) {
  std::map<Span, int> owner;
  int dense_id = 0;
  // Per-token marker strings, assembled as singles, opens (outermost
  // first), closes (innermost first).
  std::vector<std::vector<std::string>> singles(doc.tokens.size());
  std::vector<std::vector<std::pair<int, int>>> opens(doc.tokens.size());
  std::vector<std::vector<std::pair<int, int>>> closes(doc.tokens.size());
  for (const Cluster& cluster : predicted) {
    if (cluster.empty()) continue;
    for (const Span& s : cluster) {
      if (s.start < 0 || s.end < s.start || s.end >= doc.num_tokens()) {
        throw std::invalid_argument("write_conll: span out of bounds");
      }
      auto [it, inserted] = owner.emplace(s, dense_id);
      if (!inserted && it->second != dense_id) {
        throw std::invalid_argument("write_conll: span in two clusters");
      }
      if (s.start == s.end) {
        singles[static_cast<size_t>(s.start)].push_back(
            "(" + std::to_string(dense_id) + ")");
      } else {
        opens[static_cast<size_t>(s.start)].emplace_back(s.end, dense_id);
        closes[static_cast<size_t>(s.end)].emplace_back(s.start, dense_id);
      }
    }
    ++dense_id;
  }

  std::ostringstream os;
  os << "#begin document (" << doc.source_id << "); part ";
  os.width(3);
  os.fill('0');
  os << doc.part << "\n";
  os.fill(' ');
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    const auto [lo, hi] = doc.sentences[si];
    for (int t = lo; t <= hi; ++t) {
      const Token& tok = doc.tokens[static_cast<size_t>(t)];
      std::vector<std::string> markers = singles[static_cast<size_t>(t)];
      auto& op = opens[static_cast<size_t>(t)];
      std::sort(op.begin(), op.end(),
                [](auto& a, auto& b) { return a.first > b.first; });
      for (auto& [end, id] : op) markers.push_back("(" + std::to_string(id));
      auto& cl = closes[static_cast<size_t>(t)];
      std::sort(cl.begin(), cl.end(),
                [](auto& a, auto& b) { return a.first > b.first; });
      for (auto& [start, id] : cl) markers.push_back(std::to_string(id) + ")");
      std::string coref = "-";
      if (!markers.empty()) {
        coref.clear();
        for (size_t i = 0; i < markers.size(); ++i) {
          if (i) coref += "|";
          coref += markers[i];
        }
      }
      os << doc.source_id << " " << doc.part << " " << (t - lo) << " "
         << tok.text << " - * - - - "
         << (tok.speaker.empty() ? "-" : tok.speaker) << " * " << coref
         << "\n";
    }
    os << "\n";
  }
  os << "#end document\n";
  return os.str();
}

void write_conll_file(const std::string& path,
                      const std::vector<Document>& docs,
                      const std::vector<Clustering>& predictions) {
  if (docs.size() != predictions.size()) {
    throw std::invalid_argument("write_conll_file: docs/predictions size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t i = 0; i < docs.size(); ++i) {
    out << write_conll(docs[i], predictions[i]);
  }
}

}  // namespace coref
