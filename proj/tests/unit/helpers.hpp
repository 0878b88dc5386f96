#pragma once

#include <filesystem>
#include <string>

#include "lpdgcn/graph_io.hpp"
#include "lpdgcn/rng.hpp"
#include "lpdgcn/tensor.hpp"

namespace test_support {

inline std::filesystem::path tiny_root() { return std::filesystem::path(LPDGCN_TEST_DATA_DIR) / "tiny"; }
inline std::filesystem::path mutag_root() { return std::filesystem::path(LPDGCN_DATA_DIR) / "MUTAG"; }

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("lpdgcn_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename T = double>
lpdgcn::Matrix<T> random_matrix(std::size_t r, std::size_t c, lpdgcn::Rng& rng, double lo = -1.0, double hi = 1.0) {
  lpdgcn::Matrix<T> m(r, c);
  for (auto& v : m.flat()) v = static_cast<T>(rng.uniform(lo, hi));
  return m;
}

/// Random simple undirected graph with `n` nodes and labels below `labels`.
inline lpdgcn::Graph random_graph(std::size_t n, std::size_t labels, double edge_prob, lpdgcn::Rng& rng) {
  lpdgcn::Graph g;
  g.node_count = n;
  for (std::size_t i = 0; i < n; ++i) g.node_labels.push_back(static_cast<std::size_t>(rng.below(labels)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob) g.edges.emplace_back(i, j);
  return g;
}

}  // namespace test_support
