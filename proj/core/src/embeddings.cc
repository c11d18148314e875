#include "coref/embeddings.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coref {

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

void EmbeddingTable::add(const std::string& token, std::vector<real_t> values) {
  if (static_cast<int>(values.size()) != dim_) {
    throw std::invalid_argument("EmbeddingTable: expected " +
                                std::to_string(dim_) + " values, got " +
                                std::to_string(values.size()));
  }
  real_t norm = 0;
  for (real_t v : values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (real_t& v : values) v /= norm;
  }
  table_.emplace(token, std::move(values));  // first occurrence wins
}

void EmbeddingTable::add_raw(const std::string& token,
                             std::vector<real_t> values) {
  if (static_cast<int>(values.size()) != dim_) {
    throw std::invalid_argument("EmbeddingTable: expected " +
                                std::to_string(dim_) + " values, got " +
                                std::to_string(values.size()));
  }
  table_.emplace(token, std::move(values));
}

std::vector<real_t> EmbeddingTable::lookup(const std::string& token) const {
  auto it = table_.find(token);
  if (it != table_.end()) return it->second;
  if (lowercase_fallback_) {
    it = table_.find(to_lower(token));
    if (it != table_.end()) return it->second;
  }
  return std::vector<real_t>(static_cast<size_t>(dim_), real_t(0));
}

EmbeddingTable EmbeddingTable::load(std::istream& in, int expected_dim,
                                    bool lowercase_fallback) {
  EmbeddingTable table(expected_dim, lowercase_fallback);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    is >> token;
    std::vector<real_t> values;
    values.reserve(static_cast<size_t>(expected_dim));
    double v;
    while (is >> v) values.push_back(static_cast<real_t>(v));
    if (static_cast<int>(values.size()) != expected_dim) {
      throw std::runtime_error(
          "embeddings line " + std::to_string(line_no) + ": expected " +
          std::to_string(expected_dim) + " values, got " +
          std::to_string(values.size()));
    }
    table.add(token, std::move(values));
  }
  return table;
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path,
                                         int expected_dim,
                                         bool lowercase_fallback) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in, expected_dim, lowercase_fallback);
}

std::vector<std::pair<std::string, std::vector<real_t>>>
EmbeddingTable::sorted_entries() const {
  std::vector<std::pair<std::string, std::vector<real_t>>> out(table_.begin(),
                                                               table_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace coref
