#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gscl/types.hpp"

namespace gscl {

/// Immutable undirected graph in CSR form with dense node features and
/// optional integer class labels. Adjacency is symmetric, rows are sorted and
/// deduplicated, and no self-loops are stored (the GCN normalization adds its
/// own A+I). Safe to share across threads once built.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list: symmetrizes, deduplicates and strips
  /// self-loops. Node count comes from the feature matrix.
  static Graph from_edges(std::vector<std::pair<Index, Index>> edges, MatrixF features,
                          std::optional<std::vector<int>> labels = std::nullopt) {
    const Index n = features.rows();
    std::vector<std::pair<Index, Index>> sym;
    sym.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(u) + "," +
                                    std::to_string(v) + ") with " + std::to_string(n) + " nodes");
      if (u == v) continue;
      sym.emplace_back(u, v);
      sym.emplace_back(v, u);
    }
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    Graph g;
    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    g.targets_.reserve(sym.size());
    for (auto [u, v] : sym) {
      g.offsets_[static_cast<std::size_t>(u) + 1]++;
      g.targets_.push_back(v);
    }
    for (Index i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    g.validate();
    return g;
  }

  /// Adopts prebuilt CSR arrays (already symmetric/sorted/deduplicated).
  static Graph from_csr(std::vector<Index> offsets, std::vector<Index> targets, MatrixF features,
                        std::optional<std::vector<int>> labels = std::nullopt) {
    Graph g;
    g.offsets_ = std::move(offsets);
    g.targets_ = std::move(targets);
    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    g.validate();
    return g;
  }

  Index num_nodes() const { return features_.rows(); }
  Index num_edges() const { return static_cast<Index>(targets_.size()); }  // directed count
  Index feature_dim() const { return features_.cols(); }

  Index degree(Index u) const { return offsets_[u + 1] - offsets_[u]; }

  std::span<const Index> neighbors(Index u) const {
    return {targets_.data() + offsets_[u], static_cast<std::size_t>(degree(u))};
  }

  const std::vector<Index>& csr_offsets() const { return offsets_; }
  const std::vector<Index>& csr_targets() const { return targets_; }
  const MatrixF& features() const { return features_; }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const {
    if (!labels_) throw std::invalid_argument("graph has no labels");
    return *labels_;
  }
  int num_classes() const {
    const auto& y = labels();
    return y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
  }

 private:
  void validate() const {
    const Index n = num_nodes();
    if (static_cast<Index>(offsets_.size()) != n + 1)
      throw std::invalid_argument("csr_offsets length must be num_nodes+1");
    if (offsets_.front() != 0 || offsets_.back() != static_cast<Index>(targets_.size()))
      throw std::invalid_argument("csr_offsets endpoints invalid");
    for (Index u = 0; u < n; ++u) {
      if (offsets_[u + 1] < offsets_[u]) throw std::invalid_argument("csr_offsets not nondecreasing");
      auto row = neighbors(u);
      for (std::size_t i = 0; i < row.size(); ++i) {
        Index v = row[i];
        if (v < 0 || v >= n) throw std::invalid_argument("csr target out of range");
        if (v == u) throw std::invalid_argument("self-loop stored in CSR");
        if (i > 0 && row[i] <= row[i - 1])
          throw std::invalid_argument("csr row not sorted/deduplicated");
        // symmetry
        auto back = neighbors(v);
        if (!std::binary_search(back.begin(), back.end(), u))
          throw std::invalid_argument("adjacency not symmetric");
      }
    }
    if (labels_) {
      if (static_cast<Index>(labels_->size()) != n)
        throw std::invalid_argument("label count != num_nodes");
      for (int y : *labels_)
        if (y < 0) throw std::invalid_argument("negative class id");
    }
  }

  std::vector<Index> offsets_{0};
  std::vector<Index> targets_;
  MatrixF features_;
  std::optional<std::vector<int>> labels_;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace detail

/// Parses "u v" pairs, one per line; '#' starts a comment; blank lines ignored.
inline std::vector<std::pair<Index, Index>> parse_edge_list(std::istream& in) {
  std::vector<std::pair<Index, Index>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(detail::strip_comment(line));
    Index u, v;
    if (!(ss >> u)) continue;  // blank or comment-only
    std::string rest;
    if (!(ss >> v) || (ss >> rest)) {
      throw std::invalid_argument("edge list parse error at line " + std::to_string(lineno) +
                                  ": expected 'u v'");
    }
    edges.emplace_back(u, v);
  }
  return edges;
}

/// CSV of N rows x D real columns with a header row.
inline MatrixF parse_feature_csv(std::istream& in) {
  std::vector<std::vector<float>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::vector<float> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("feature CSV parse error at line " + std::to_string(lineno) +
                                    ": bad value '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("feature CSV parse error at line " + std::to_string(lineno) +
                                  ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("feature CSV has no data rows");
  MatrixF m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

/// CSV "node_id,class_id" with a header row. Every node must be covered.
inline std::vector<int> parse_label_csv(std::istream& in, Index num_nodes) {
  std::vector<int> labels(static_cast<std::size_t>(num_nodes), -1);
  std::string line;
  std::size_t lineno = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::invalid_argument("label CSV parse error at line " + std::to_string(lineno));
    Index id;
    int cls;
    try {
      id = std::stoll(a);
      cls = std::stoi(b);
    } catch (const std::exception&) {
      throw std::invalid_argument("label CSV parse error at line " + std::to_string(lineno));
    }
    if (id < 0 || id >= num_nodes)
      throw std::invalid_argument("label CSV node id out of range at line " + std::to_string(lineno));
    labels[static_cast<std::size_t>(id)] = cls;
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0)
      throw std::invalid_argument("label CSV missing node " + std::to_string(i));
  return labels;
}

/// Loads a graph from text sources. The feature CSV row count defines N;
/// directed edge lists are symmetrized.
inline Graph load_graph(std::istream& edge_list, std::istream& features,
                        std::istream* labels = nullptr) {
  MatrixF x = parse_feature_csv(features);
  auto edges = parse_edge_list(edge_list);
  std::optional<std::vector<int>> y;
  if (labels) y = parse_label_csv(*labels, x.rows());
  return Graph::from_edges(std::move(edges), std::move(x), std::move(y));
}

inline Graph load_graph_files(const std::string& edges_path, const std::string& features_path,
                              const std::string& labels_path = "") {
  std::ifstream ef(edges_path);
  if (!ef) throw std::invalid_argument("cannot open edge list: " + edges_path);
  std::ifstream ff(features_path);
  if (!ff) throw std::invalid_argument("cannot open feature CSV: " + features_path);
  if (labels_path.empty()) return load_graph(ef, ff);
  std::ifstream lf(labels_path);
  if (!lf) throw std::invalid_argument("cannot open label CSV: " + labels_path);
  return load_graph(ef, ff, &lf);
}

// --- binary graph cache -----------------------------------------------------
// magic "GSCL1", then little-endian: u64 N, u64 nnz, u64 D, u8 has_labels,
// i64 offsets[N+1], i64 targets[nnz], f32 features[N*D] row-major,
// i64 labels[N] if has_labels.

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::invalid_argument("truncated binary stream");
  return v;
}

}  // namespace detail

inline void save_graph_cache(const Graph& g, std::ostream& out) {
  out.write("GSCL1", 5);
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(g.num_nodes()));
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(g.num_edges()));
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(g.feature_dim()));
  detail::write_pod<std::uint8_t>(out, g.has_labels() ? 1 : 0);
  for (Index o : g.csr_offsets()) detail::write_pod<std::int64_t>(out, o);
  for (Index t : g.csr_targets()) detail::write_pod<std::int64_t>(out, t);
  const MatrixF& x = g.features();
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) detail::write_pod<float>(out, x(i, j));
  if (g.has_labels())
    for (int y : g.labels()) detail::write_pod<std::int64_t>(out, y);
}

inline Graph load_graph_cache(std::istream& in) {
  char magic[5];
  in.read(magic, 5);
  if (!in || std::string(magic, 5) != "GSCL1")
    throw std::invalid_argument("bad graph cache magic");
  const auto n = static_cast<Index>(detail::read_pod<std::uint64_t>(in));
  const auto nnz = static_cast<Index>(detail::read_pod<std::uint64_t>(in));
  const auto d = static_cast<Index>(detail::read_pod<std::uint64_t>(in));
  const bool has_labels = detail::read_pod<std::uint8_t>(in) != 0;
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  for (auto& o : offsets) o = detail::read_pod<std::int64_t>(in);
  std::vector<Index> targets(static_cast<std::size_t>(nnz));
  for (auto& t : targets) t = detail::read_pod<std::int64_t>(in);
  MatrixF x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = detail::read_pod<float>(in);
  std::optional<std::vector<int>> labels;
  if (has_labels) {
    labels.emplace(static_cast<std::size_t>(n));
    for (auto& y : *labels) y = static_cast<int>(detail::read_pod<std::int64_t>(in));
  }
  return Graph::from_csr(std::move(offsets), std::move(targets), std::move(x), std::move(labels));
}

}  // namespace gscl
