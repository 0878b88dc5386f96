#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "lpdgcn/gradcheck.hpp"
#include "lpdgcn/ops.hpp"

using namespace lpdgcn;
using test_support::random_matrix;
using M = Matrix<double>;
using V = ad::Var<double>;

namespace {

M naive_product(const M& a, const M& b) {
  M c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

M transpose(const M& a) {
  M t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// Loss = sum(out * weights) with fixed random weights, so every output
/// coordinate feeds a distinct gradient.
V weighted_sum(ad::Tape<double>& tape, const V& out, std::uint64_t seed) {
  Rng rng(seed);
  const auto w = tape.constant(random_matrix(out.rows(), out.cols(), rng));
  // column by column, since there is no elementwise product op
  V acc = ad::sum_all(ad::scale_rows(ad::column(out, 0), ad::column(w, 0)));
  for (std::size_t c = 1; c < out.cols(); ++c)
    acc = ad::add(acc, ad::sum_all(ad::scale_rows(ad::column(out, c), ad::column(w, c))));
  return acc;
}

double check(const LossBuilder& f, std::vector<M> params, double h = 1e-6) {
  return finite_difference_check(f, std::move(params), h).max_rel_error;
}

}  // namespace

TEST_SUITE("tensor_ad") {
  TEST_CASE("gemm matches a naive triple loop for every transpose combination") {
    Rng rng(1);
    const auto a = random_matrix(4, 3, rng);
    const auto b = random_matrix(3, 5, rng);
    CHECK(max_abs_diff(gemm(a, false, b, false), naive_product(a, b)) < 1e-14);
    CHECK(max_abs_diff(gemm(transpose(a), true, b, false), naive_product(a, b)) < 1e-14);
    CHECK(max_abs_diff(gemm(a, false, transpose(b), true), naive_product(a, b)) < 1e-14);
    CHECK(max_abs_diff(gemm(transpose(a), true, transpose(b), true), naive_product(a, b)) < 1e-14);
    CHECK_THROWS(gemm(a, false, a, false));
  }

  TEST_CASE("linear with identity input returns the weights") {
    ad::Tape<double> tape;
    const auto x = tape.constant(Matrix<double>::identity(2));
    const auto w = tape.leaf(M::from_rows({{1, 2}, {3, 4}}));
    const auto b = tape.leaf(M(1, 2));
    const auto y = ad::linear(x, w, b);
    CHECK(y.value() == M::from_rows({{1, 2}, {3, 4}}));
  }

  TEST_CASE("bias gradient of a summed linear layer is the row count") {
    ad::Tape<double> tape;
    Rng rng(2);
    const auto x = tape.constant(random_matrix(5, 3, rng));
    const auto w = tape.leaf(random_matrix(3, 2, rng));
    const auto b = tape.leaf(M(1, 2));
    const auto g = ad::backward(ad::sum_all(ad::linear(x, w, b)));
    CHECK(g.of(b) == M(1, 2, 5.0));
  }

  TEST_CASE("linear gradient matches finite differences") {
    Rng rng(3);
    const LossBuilder f = [](ad::Tape<double>& t, std::span<const V> p) {
      return weighted_sum(t, ad::linear(p[0], p[1], p[2]), 7);
    };
    CHECK(check(f, {random_matrix(3, 4, rng), random_matrix(4, 2, rng), random_matrix(1, 2, rng)}) <= 1e-6);
  }

  TEST_CASE("relu values and gradient mask") {
    ad::Tape<double> tape;
    const auto x = tape.leaf(M::from_rows({{-1, 0, 2}}));
    const auto y = ad::relu(x);
    CHECK(y.value() == M::from_rows({{0, 0, 2}}));
    const auto g = ad::backward(ad::sum_all(y));
    CHECK(g.of(x) == M::from_rows({{0, 0, 1}}));
  }

  TEST_CASE("relu of linear matches finite differences") {
    Rng rng(4);
    const LossBuilder f = [](ad::Tape<double>& t, std::span<const V> p) {
      return weighted_sum(t, ad::relu(ad::linear(p[0], p[1], p[2])), 8);
    };
    CHECK(check(f, {random_matrix(4, 3, rng), random_matrix(3, 5, rng), random_matrix(1, 5, rng)}) <= 1e-6);
  }

  TEST_CASE("neighbor_sum on a path and without edges") {
    ad::Tape<double> tape;
    const auto x = tape.constant(Matrix<double>::identity(3));
    const std::vector<DirectedEdge> path{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    const auto y = ad::neighbor_sum(x, std::span<const DirectedEdge>(path));
    CHECK(y.value() == M::from_rows({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
    const auto z = ad::neighbor_sum(x, std::span<const DirectedEdge>{});
    CHECK(z.value() == M(3, 3));
  }

  TEST_CASE("neighbor_sum equals dense adjacency product on random graphs") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 6;
      M adj(n, n);
      std::vector<DirectedEdge> edges;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (rng.uniform() < 0.4) {
            adj(i, j) = adj(j, i) = 1.0;
            edges.push_back({i, j});
            edges.push_back({j, i});
          }
      ad::Tape<double> tape;
      const auto xm = random_matrix(n, 3, rng);
      const auto y = ad::neighbor_sum(tape.constant(xm), std::span<const DirectedEdge>(edges));
      CHECK(max_abs_diff(y.value(), naive_product(adj, xm)) < 1e-14);
    }
  }

  TEST_CASE("neighbor_sum and segment_sum gradients") {
    Rng rng(6);
    const std::vector<DirectedEdge> edges{{0, 1}, {1, 0}, {1, 2}, {2, 1}, {3, 3}};
    const std::vector<std::size_t> seg{0, 0, 2, 1};
    const LossBuilder f = [&](ad::Tape<double>& t, std::span<const V> p) {
      const auto a = ad::neighbor_sum(p[0], std::span<const DirectedEdge>(edges));
      return weighted_sum(t, ad::segment_sum(a, std::span<const std::size_t>(seg), 3), 9);
    };
    CHECK(check(f, {random_matrix(4, 3, rng)}) <= 1e-6);
  }

  TEST_CASE("segment_sum examples") {
    ad::Tape<double> tape;
    const auto x = tape.constant(M::from_rows({{1}, {2}, {3}}));
    const std::vector<std::size_t> seg{0, 0, 1};
    CHECK(ad::segment_sum(x, std::span<const std::size_t>(seg), 2).value() == M::from_rows({{3}, {3}}));
    CHECK(ad::segment_sum(x, std::span<const std::size_t>(seg), 3).value() == M::from_rows({{3}, {3}, {0}}));
    const std::vector<std::size_t> bad{0, 0, 5};
    CHECK_THROWS(ad::segment_sum(x, std::span<const std::size_t>(bad), 2));
  }

  TEST_CASE("segment_sum equals a naive per-segment loop") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.below(9), b = 1 + rng.below(4), d = 1 + rng.below(4);
      std::vector<std::size_t> seg(n);
      for (auto& s : seg) s = static_cast<std::size_t>(rng.below(b));
      const auto xm = random_matrix(n, d, rng);
      M expected(b, d);
      for (std::size_t s = 0; s < b; ++s)
        for (std::size_t i = 0; i < n; ++i)
          if (seg[i] == s)
            for (std::size_t c = 0; c < d; ++c) expected(s, c) += xm(i, c);
      ad::Tape<double> tape;
      CHECK(ad::segment_sum(tape.constant(xm), std::span<const std::size_t>(seg), b).value() == expected);
    }
  }

  TEST_CASE("concat widths and gradient") {
    ad::Tape<double> tape;
    const auto a = tape.constant(M(4, 64, 1.0));
    const auto b = tape.constant(M(4, 64, 2.0));
    CHECK(ad::concat_features(a, b).cols() == 128);
    const auto empty = tape.constant(M(4, 0));
    const M joined = ad::concat_features(a, empty).value();
    CHECK(joined == a.value());

    Rng rng(8);
    const LossBuilder f = [](ad::Tape<double>& t, std::span<const V> p) {
      return weighted_sum(t, ad::concat_features(p[0], p[1]), 10);
    };
    CHECK(check(f, {random_matrix(3, 2, rng), random_matrix(3, 4, rng)}) <= 1e-6);
  }

  TEST_CASE("gather, scale, softplus and row ops gradients") {
    Rng rng(9);
    const std::vector<std::size_t> index{1, 0, 1, 1};
    const LossBuilder f = [&](ad::Tape<double>& t, std::span<const V> p) {
      const auto g = ad::gather_rows(p[0], std::span<const std::size_t>(index));
      const auto s = ad::scale(g, ad::softplus(p[1]));
      const auto r = ad::row_sum(ad::scale_rows(s, ad::column(p[2], 0)));
      return ad::add(weighted_sum(t, ad::softmax_rows(ad::scale(s, 0.5)), 11), weighted_sum(t, r, 12));
    };
    CHECK(check(f, {random_matrix(2, 3, rng), random_matrix(1, 1, rng), random_matrix(4, 2, rng)}) <= 1e-6);
  }

  TEST_CASE("softmax rows sum to one") {
    ad::Tape<double> tape;
    Rng rng(10);
    const auto y = ad::softmax_rows(tape.constant(random_matrix(5, 4, rng, -30, 30)));
    for (std::size_t r = 0; r < 5; ++r) {
      const auto row = y.value().row(r);
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("cross-entropy of uniform logits") {
    ad::Tape<double> tape;
    const std::vector<std::size_t> t2{1};
    CHECK(ad::softmax_cross_entropy(tape.constant(M(1, 2)), std::span<const std::size_t>(t2)).value().item() ==
          doctest::Approx(std::log(2.0)));
    const std::vector<std::size_t> t7{3, 0, 6};
    CHECK(ad::softmax_cross_entropy(tape.constant(M(3, 7)), std::span<const std::size_t>(t7)).value().item() ==
          doctest::Approx(3 * std::log(7.0)));
    const std::vector<std::size_t> bad{7};
    CHECK_THROWS(ad::softmax_cross_entropy(tape.constant(M(1, 7)), std::span<const std::size_t>(bad)));
  }

  TEST_CASE("cross-entropy gradient") {
    Rng rng(11);
    const std::vector<std::size_t> targets{2, 0, 1, 2};
    const LossBuilder f = [&](ad::Tape<double>&, std::span<const V> p) {
      return ad::softmax_cross_entropy(p[0], std::span<const std::size_t>(targets));
    };
    CHECK(check(f, {random_matrix(4, 3, rng, -3, 3)}) <= 1e-6);
  }

  TEST_CASE("rmse value and gradient") {
    ad::Tape<double> tape;
    const auto pred = tape.leaf(M::from_rows({{3, 4}}));
    CHECK(ad::rmse(pred, M(1, 2)).value().item() == doctest::Approx(5.0));
    Rng rng(12);
    const auto target = random_matrix(5, 3, rng);
    const LossBuilder f = [&](ad::Tape<double>&, std::span<const V> p) { return ad::rmse(p[0], target); };
    CHECK(check(f, {random_matrix(5, 3, rng)}) <= 1e-6);
  }

  TEST_CASE("batch norm in train mode standardises columns") {
    ad::Tape<double> tape;
    Rng rng(13);
    BatchNormStats<double> stats(3);
    const auto x = tape.constant(random_matrix(50, 3, rng, -5, 7));
    const auto y = ad::batch_norm(x, tape.constant(M(1, 3, 1.0)), tape.constant(M(1, 3)), stats, Mode::train);
    for (std::size_t c = 0; c < 3; ++c) {
      double m = 0, v = 0;
      for (std::size_t r = 0; r < 50; ++r) m += y.value()(r, c);
      m /= 50;
      for (std::size_t r = 0; r < 50; ++r) v += (y.value()(r, c) - m) * (y.value()(r, c) - m);
      v /= 50;
      CHECK(std::abs(m) < 1e-5);
      CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
    }
    // running statistics moved towards the batch
    CHECK(stats.running_mean(0, 0) != 0.0);
  }

  TEST_CASE("batch norm in eval mode with unit statistics is affine") {
    ad::Tape<double> tape;
    BatchNormStats<double> stats(2, 0.1, 0.0);
    const auto x = tape.constant(M::from_rows({{1, -2}, {3, 4}}));
    const auto y = ad::batch_norm(x, tape.constant(M::from_rows({{2, 3}})), tape.constant(M::from_rows({{1, -1}})),
                                  stats, Mode::eval);
    CHECK(y.value() == M::from_rows({{3, -7}, {7, 11}}));
  }

  TEST_CASE("batch norm train-mode gradient") {
    Rng rng(14);
    const LossBuilder f = [](ad::Tape<double>& t, std::span<const V> p) {
      BatchNormStats<double> stats(3);
      return weighted_sum(t, ad::batch_norm(p[0], p[1], p[2], stats, Mode::train), 15);
    };
    CHECK(check(f, {random_matrix(6, 3, rng), random_matrix(1, 3, rng, 0.5, 1.5), random_matrix(1, 3, rng)}) <=
          1e-5);
  }

  TEST_CASE("dropout identities and keep rate") {
    ad::Tape<double> tape;
    Rng rng(15);
    const auto x = tape.constant(random_matrix(3, 3, rng));
    Rng drop(1);
    CHECK(ad::dropout(x, 0.0, Mode::train, drop).value() == x.value());
    CHECK(ad::dropout(x, 0.0, Mode::eval, drop).value() == x.value());
    CHECK(ad::dropout(x, 0.7, Mode::eval, drop).value() == x.value());
    CHECK_THROWS(ad::dropout(x, 1.0, Mode::train, drop));

    const auto big = tape.constant(M(1, 100000, 1.0));
    const auto y = ad::dropout(big, 0.5, Mode::train, drop);
    std::size_t kept = 0;
    double total = 0;
    for (double v : y.value().flat()) {
      kept += v != 0.0;
      total += v;
    }
    CHECK(std::abs(static_cast<double>(kept) / 1e5 - 0.5) <= 0.01);
    CHECK(std::abs(total / 1e5 - 1.0) <= 0.02);
  }

  TEST_CASE("backward basics") {
    ad::Tape<double> tape;
    const auto w = tape.leaf(M::from_rows({{1, 2}, {3, 4}}));
    CHECK(ad::backward(ad::sum_all(w)).of(w) == M(2, 2, 1.0));

    ad::Tape<double> tape2;
    const auto w2 = tape2.leaf(M::from_rows({{1, 2}, {3, 4}}));
    const auto loss = ad::scale(ad::sum_all(ad::relu(w2)), 0.0);
    CHECK(ad::backward(loss).of(w2) == M(2, 2));

    ad::Tape<double> tape3;
    const auto v = tape3.leaf(M(2, 2, 1.0));
    CHECK_THROWS(tape3.backward(v));
  }

  TEST_CASE("unreached leaves get zero gradients") {
    ad::Tape<double> tape;
    const auto a = tape.leaf(M(1, 3, 1.0));
    const auto b = tape.leaf(M(2, 2, 1.0));
    const auto g = ad::backward(ad::sum_all(a));
    CHECK(g.of(b) == M(2, 2));
  }

  TEST_CASE("finite-difference checker on known functions") {
    const LossBuilder square = [](ad::Tape<double>&, std::span<const V> p) {
      return ad::sum_all(ad::scale_rows(p[0], ad::column(p[0], 0)));
    };
    CHECK(finite_difference_check(square, {M::scalar(3.0)}, 1e-5).max_rel_error <= 1e-8);
    const LossBuilder affine = [](ad::Tape<double>&, std::span<const V> p) {
      return ad::add(ad::sum_all(ad::scale(p[0], 2.5)), ad::sum_all(p[1]));
    };
    Rng rng(16);
    CHECK(finite_difference_check(affine, {random_matrix(2, 3, rng), random_matrix(1, 1, rng)}, 1e-3).max_rel_error <=
          1e-10);
  }

  TEST_CASE("operations reject mismatched shapes") {
    ad::Tape<double> tape;
    const auto a = tape.constant(M(2, 3));
    const auto b = tape.constant(M(3, 2));
    CHECK_THROWS(ad::add(a, b));
    CHECK_THROWS(ad::matmul(a, a));
    CHECK_THROWS(ad::concat_features(a, b));
    CHECK_THROWS(ad::linear(a, tape.constant(M(3, 4)), tape.constant(M(1, 3))));
  }
}
