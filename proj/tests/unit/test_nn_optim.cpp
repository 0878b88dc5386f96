#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lpdgcn/checkpoint.hpp"
#include "lpdgcn/gradcheck.hpp"
#include "lpdgcn/model.hpp"
#include "lpdgcn/nn.hpp"
#include "lpdgcn/optim.hpp"

using namespace lpdgcn;
using test_support::random_matrix;
using M = Matrix<double>;

namespace {

/// MLP whose weights are identity matrices and biases zero.
Mlp identity_mlp(ParamStore<double>& store, std::vector<BatchNormStats<double>>& stats, std::size_t d) {
  Mlp m = add_mlp(store, stats, "id", d, d, d, false, 0);
  store.values[m.w1] = M::identity(d);
  store.values[m.w2] = M::identity(d);
  return m;
}

}  // namespace

TEST_SUITE("nn_optim") {
  TEST_CASE("parameter store rejects duplicate names") {
    ParamStore<double> store;
    store.add("a", M(1, 1));
    CHECK_THROWS(store.add("a", M(1, 1)));
    CHECK(store.find("a") == 0);
    CHECK_FALSE(store.find("b").has_value());
  }

  TEST_CASE("glorot init is bounded and keyed by name") {
    const auto a = glorot_uniform<double>(7, 64, 3, "x");
    const double r = std::sqrt(6.0 / 71.0);
    for (double v : a.flat()) CHECK(std::abs(v) <= r);
    CHECK(a == glorot_uniform<double>(7, 64, 3, "x"));
    CHECK(a != glorot_uniform<double>(7, 64, 3, "y"));
    CHECK(a != glorot_uniform<double>(7, 64, 4, "x"));
  }

  TEST_CASE("model init is deterministic with zero biases and the expected widths") {
    ModelConfig c;
    c.input_width = 7;
    const auto p1 = init_params<double>(c, 11);
    const auto p2 = init_params<double>(c, 11);
    CHECK(p1.store.values == p2.store.values);
    CHECK(p1.store.names == p2.store.names);
    for (std::size_t i = 0; i < p1.store.size(); ++i) {
      const auto& name = p1.store.names[i];
      if (name.ends_with(".b1") || name.ends_with(".b2") || name.ends_with(".bn.beta") || name.ends_with(".b"))
        for (double v : p1.store.values[i].flat()) CHECK(v == 0.0);
    }
    CHECK(p1.conv[0].in == 7);
    CHECK(p1.conv[0].hidden == 64);
    CHECK(p1.conv[1].in == 128);
    const auto p3 = init_params<double>(c, 12);
    CHECK(p1.store.values != p3.store.values);
  }

  TEST_CASE("mlp on zero input without batch norm gives zero") {
    ParamStore<double> store;
    std::vector<BatchNormStats<double>> stats;
    const auto m = add_mlp(store, stats, "m", 4, 6, 3, false, 1);
    ad::Tape<double> tape;
    const auto bound = lpdgcn::bind(tape, store, stats, Mode::eval);
    const auto y = mlp_forward(m, bound, tape.constant(M(5, 4)));
    CHECK(y.value() == M(5, 3));
  }

  TEST_CASE("identity-configured mlp passes non-negative input through") {
    ParamStore<double> store;
    std::vector<BatchNormStats<double>> stats;
    const auto m = identity_mlp(store, stats, 3);
    ad::Tape<double> tape;
    const auto bound = lpdgcn::bind(tape, store, stats, Mode::eval);
    Rng rng(2);
    const auto x = random_matrix(4, 3, rng, 0.0, 2.0);
    CHECK(mlp_forward(m, bound, tape.constant(x)).value() == x);
    CHECK_THROWS(mlp_forward(m, bound, tape.constant(M(4, 2))));
  }

  TEST_CASE("mlp with batch norm has no second bias and passes a gradient check") {
    ParamStore<double> store;
    std::vector<BatchNormStats<double>> stats;
    const auto m = add_mlp(store, stats, "m", 4, 5, 3, true, 3);
    CHECK_FALSE(m.b2.has_value());
    REQUIRE(m.bn.has_value());
    Rng rng(3);
    store.values[m.b1] = random_matrix(1, 5, rng, -0.3, 0.3);
    const auto x = random_matrix(7, 4, rng);
    const LossBuilder f = [&](ad::Tape<double>& tape, std::span<const ad::Var<double>> vars) {
      auto local = stats;
      const Bound<double> bound{&tape, {vars.begin(), vars.end()}, &local, Mode::train};
      const auto y = mlp_forward(m, bound, tape.constant(x));
      const std::vector<std::size_t> targets{0, 1, 2, 0, 1, 2, 0};
      return ad::softmax_cross_entropy(y, std::span<const std::size_t>(targets));
    };
    CHECK(finite_difference_check(f, store.values, 1e-6).max_rel_error <= 1e-5);
  }

  TEST_CASE("first Adam step moves each coordinate by the learning rate") {
    ParamStore<double> store;
    store.add("p", M::from_rows({{1.0, -2.0, 0.5}}));
    AdamState<double> state(store);
    adam_step(store, {M::from_rows({{0.3, -4.0, 1e-3}})}, state, 0.01);
    CHECK(store.values[0](0, 0) == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(store.values[0](0, 1) == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
    CHECK(store.values[0](0, 2) == doctest::Approx(0.5 - 0.01).epsilon(1e-4));
  }

  TEST_CASE("zero gradient leaves fresh parameters unchanged") {
    ParamStore<double> store;
    store.add("p", M::from_rows({{1.0, -2.0}}));
    AdamState<double> state(store);
    adam_step(store, {M(1, 2)}, state, 0.01);
    CHECK(store.values[0] == M::from_rows({{1.0, -2.0}}));
  }

  TEST_CASE("Adam minimises a quadratic") {
    ParamStore<double> store;
    store.add("theta", M::from_rows({{1.0, 1.0}}));
    AdamState<double> state(store);
    for (int step = 0; step < 100; ++step) {
      const auto& t = store.values[0];
      adam_step(store, {M::from_rows({{2 * t(0, 0), 2 * t(0, 1)}})}, state, 0.1);
    }
    const auto& t = store.values[0];
    CHECK(std::hypot(t(0, 0), t(0, 1)) < 0.05);
  }

  TEST_CASE("Adam rejects mismatched gradients") {
    ParamStore<double> store;
    store.add("p", M(1, 2));
    AdamState<double> state(store);
    CHECK_THROWS(adam_step(store, {M(2, 1)}, state, 0.01));
    CHECK_THROWS(adam_step(store, {}, state, 0.01));
  }

  TEST_CASE("learning rate schedule") {
    Hyper h;
    CHECK(lr_at_epoch(h, 0) == 0.01);
    CHECK(lr_at_epoch(h, 19) == 0.01);
    CHECK(lr_at_epoch(h, 20) == 0.005);
    CHECK(lr_at_epoch(h, 45) == 0.0025);
  }

  TEST_CASE("hyperparameter validation") {
    Hyper h;
    CHECK_NOTHROW(h.validate());
    h.batch_size = 1;
    CHECK_THROWS(h.validate());
    h = {};
    h.dropout_p = 1.0;
    CHECK_THROWS(h.validate());
    h = {};
    h.lambda = -0.1;
    CHECK_THROWS(h.validate());
  }

  TEST_CASE("checkpoints round-trip exactly") {
    ModelConfig c;
    c.hidden = c.readout_dim = c.decoder_hidden = 8;
    auto p = init_params<double>(c, 5);
    p.bn_stats[0].running_mean(0, 1) = 0.123456789012345678;
    const auto j = checkpoint_to_json(p.store, p.bn_stats);
    auto q = init_params<double>(c, 6);
    checkpoint_from_json(j, q.store, q.bn_stats);
    CHECK(q.store.values == p.store.values);
    CHECK(q.bn_stats[0].running_mean == p.bn_stats[0].running_mean);

    const auto dir = test_support::scratch_dir("ckpt");
    save_checkpoint(dir / "p.json", p.store, p.bn_stats);
    auto r = init_params<double>(c, 7);
    load_checkpoint(dir / "p.json", r.store, r.bn_stats);
    CHECK(r.store.values == p.store.values);

    auto bad = j;
    bad["tensors"].erase("classifier.w");
    CHECK_THROWS(checkpoint_from_json(bad, r.store, r.bn_stats));
    auto wrong_shape = j;
    wrong_shape["tensors"]["classifier.w"]["shape"] = {1, 1};
    CHECK_THROWS(checkpoint_from_json(wrong_shape, r.store, r.bn_stats));
  }
}
