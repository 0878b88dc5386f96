#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "lpdgcn/graph_io.hpp"

using namespace lpdgcn;
using test_support::mutag_root;
using test_support::scratch_dir;
using test_support::tiny_root;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

/// Copies the tiny fixture into `dir` so single files can be corrupted.
void copy_tiny(const std::filesystem::path& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(tiny_root()))
    std::filesystem::copy_file(entry.path(), dir / entry.path().filename());
}

}  // namespace

TEST_SUITE("graph_io") {
  TEST_CASE("tiny fixture parses into a triangle and a single edge") {
    const auto ds = parse_tu_dataset(tiny_root(), "TINY");
    REQUIRE(ds.size() == 2);
    CHECK(ds.graphs[0].node_count == 3);
    CHECK(ds.graphs[1].node_count == 2);
    CHECK(ds.graphs[0].edges.size() == 3);
    CHECK(ds.graphs[1].edges.size() == 1);
    using E = std::pair<std::size_t, std::size_t>;
    CHECK(ds.graphs[0].edges == std::vector<E>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(ds.graphs[1].edges == std::vector<E>{{0, 1}});
    // labels are remapped in order of first appearance
    CHECK(ds.graphs[0].graph_label == 0);
    CHECK(ds.graphs[1].graph_label == 1);
    CHECK(ds.class_values == std::vector<std::int64_t>{1, -1});
    CHECK(ds.graphs[0].node_labels == std::vector<std::size_t>{0, 1, 2});
    CHECK(ds.graphs[1].node_labels == std::vector<std::size_t>{1, 0});
    CHECK(ds.num_classes == 2);
    CHECK(ds.num_node_labels == 3);
  }

  TEST_CASE("missing files are reported") {
    const auto dir = scratch_dir("empty");
    CHECK_THROWS_AS(parse_tu_dataset(dir, "TINY"), ParseError);
    try {
      parse_tu_dataset(dir, "TINY");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("missing file") != std::string::npos);
    }
  }

  TEST_CASE("malformed integers name the file and line") {
    const auto dir = scratch_dir("bad_int");
    copy_tiny(dir);
    write_file(dir / "TINY_node_labels.txt", "0\n1\nx\n1\n0\n");
    try {
      parse_tu_dataset(dir, "TINY");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("TINY_node_labels.txt") != std::string::npos);
      CHECK(msg.find(":3") != std::string::npos);
    }
  }

  TEST_CASE("an edge joining two graphs is rejected") {
    const auto dir = scratch_dir("cross_edge");
    copy_tiny(dir);
    write_file(dir / "TINY_A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n");
    CHECK_THROWS_AS(parse_tu_dataset(dir, "TINY"), ParseError);
  }

  TEST_CASE("row counts must agree") {
    const auto dir = scratch_dir("short_labels");
    copy_tiny(dir);
    write_file(dir / "TINY_node_labels.txt", "0\n1\n2\n");
    CHECK_THROWS_AS(parse_tu_dataset(dir, "TINY"), ParseError);
  }

  TEST_CASE("write then parse round-trips") {
    Rng rng(5);
    Dataset ds;
    ds.name = "RT";
    for (int i = 0; i < 12; ++i) {
      auto g = test_support::random_graph(1 + rng.below(7), 4, 0.4, rng);
      g.graph_label = static_cast<std::size_t>(i % 3);
      ds.graphs.push_back(g);
    }
    // make first appearance order match the index order
    ds.graphs[0].node_labels[0] = 0;
    ds.num_classes = 3;
    ds.class_values = {0, 1, 2};
    const auto dir = scratch_dir("roundtrip");
    write_tu_dataset(ds, dir);
    const auto back = parse_tu_dataset(dir, "RT");
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back.graphs[i].node_count == ds.graphs[i].node_count);
      CHECK(back.graphs[i].edges == ds.graphs[i].edges);
      CHECK(back.graphs[i].graph_label == ds.graphs[i].graph_label);
    }
  }

  TEST_CASE("one-hot features") {
    const auto ds = one_hot_features(parse_tu_dataset(tiny_root(), "TINY"));
    const auto& x = ds.graphs[0].features;
    REQUIRE(x.rows() == 3);
    REQUIRE(x.cols() == 3);
    CHECK(ds.feature_width == 3);
    // node 2 of the triangle has label 2
    CHECK(x(2, 0) == 0.0);
    CHECK(x(2, 1) == 0.0);
    CHECK(x(2, 2) == 1.0);
    for (const auto& g : ds.graphs)
      for (std::size_t r = 0; r < g.features.rows(); ++r) {
        const auto row = g.features.row(r);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 1.0);
      }
  }

  TEST_CASE("label 2 of 7 is the third basis vector") {
    Dataset ds;
    Graph g;
    g.node_count = 1;
    g.node_labels = {2};
    ds.graphs = {g};
    ds.num_node_labels = 7;
    ds.num_classes = 1;
    const auto x = one_hot_features(ds).graphs[0].features;
    CHECK(x == Matrix<double>::from_rows({{0, 0, 1, 0, 0, 0, 0}}));
  }

  TEST_CASE("batching the fixture") {
    const auto ds = one_hot_features(parse_tu_dataset(tiny_root(), "TINY"));
    const std::vector<std::size_t> idx{0, 1};
    const auto b = make_batch(ds, idx);
    CHECK(b.num_nodes == 5);
    CHECK(b.num_graphs == 2);
    CHECK(b.directed_edges.size() == 8);
    CHECK(b.node_graph_id == std::vector<std::size_t>{0, 0, 0, 1, 1});
    CHECK(b.offsets == std::vector<std::size_t>{0, 3, 5});
    CHECK(b.labels == std::vector<std::size_t>{0, 1});
    CHECK(b.node_labels == std::vector<std::size_t>{0, 1, 2, 1, 0});
    CHECK(b.x.rows() == 5);
    CHECK(b.x.cols() == 3);
    // the single edge is shifted by the triangle's three nodes
    std::set<std::pair<std::size_t, std::size_t>> directed;
    for (const auto& e : b.directed_edges) directed.emplace(e.src, e.dst);
    CHECK(directed.count({3, 4}) == 1);
    CHECK(directed.count({4, 3}) == 1);
  }

  TEST_CASE("single graph batch doubles the edge list") {
    const auto ds = one_hot_features(parse_tu_dataset(tiny_root(), "TINY"));
    const std::vector<std::size_t> idx{0};
    const auto b = make_batch(ds, idx);
    CHECK(b.num_nodes == 3);
    CHECK(b.directed_edges.size() == 6);
    CHECK(b.x == ds.graphs[0].features);
  }

  TEST_CASE("batch of identical graphs") {
    const auto ds = one_hot_features(parse_tu_dataset(tiny_root(), "TINY"));
    const std::vector<std::size_t> idx{0, 0, 0, 0};
    const auto b = make_batch(ds, idx);
    CHECK(b.num_nodes == 12);
    CHECK(b.num_graphs == 4);
  }

  TEST_CASE("empty batch is an error") {
    const auto ds = one_hot_features(parse_tu_dataset(tiny_root(), "TINY"));
    CHECK_THROWS(make_batch(ds, std::span<const std::size_t>{}));
  }

  TEST_CASE("stratified folds on the fixture-sized edge cases") {
    const auto ds = parse_tu_dataset(tiny_root(), "TINY");
    CHECK_THROWS(stratified_folds(ds, 1, 0));
    CHECK_THROWS(stratified_folds(ds, 3, 0));
    const auto plan = stratified_folds(ds, 2, 0);
    CHECK(plan.folds.size() == 2);
  }

  TEST_CASE("MUTAG statistics") {
    const auto ds = one_hot_features(parse_tu_dataset(mutag_root(), "MUTAG"));
    const auto s = dataset_stats(ds);
    CHECK(s.graphs == 188);
    CHECK(s.classes == 2);
    CHECK(s.node_labels == 7);
    CHECK(s.avg_nodes == doctest::Approx(17.93).epsilon(0.0005));
    for (const auto& g : ds.graphs) CHECK(g.features.cols() == 7);
  }

  TEST_CASE("MUTAG folds are stratified, disjoint and deterministic") {
    const auto ds = parse_tu_dataset(mutag_root(), "MUTAG");
    const auto plan = stratified_folds(ds, 10, 3);
    REQUIRE(plan.folds.size() == 10);
    std::vector<int> seen(ds.size(), 0);
    std::map<std::size_t, std::vector<std::size_t>> per_class;  // class -> count per fold
    for (std::size_t f = 0; f < 10; ++f) {
      const auto& fold = plan.folds[f];
      CHECK((fold.size() == 18 || fold.size() == 19));
      for (auto i : fold) {
        ++seen[i];
        auto& counts = per_class[ds.graphs[i].graph_label];
        counts.resize(10, 0);
        ++counts[f];
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    for (const auto& [cls, counts] : per_class) {
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
    const auto again = stratified_folds(ds, 10, 3);
    CHECK(again.folds == plan.folds);
    const auto other = stratified_folds(ds, 10, 4);
    CHECK(other.folds != plan.folds);
  }
}
