#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "coref/rng.h"
#include "coref/tape.h"
#include "doctest.h"
#include "gradient_check.h"

using namespace coref;
using ad::Node;
using ad::ParameterRegistry;
using ad::ShapeError;
using ad::Tape;

TEST_CASE("tensor shape/data invariant") {
  Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK_THROWS_AS(Tensor({2, 3}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor({-1}), std::invalid_argument);
  CHECK(Tensor::scalar(5).is_scalar());
}

TEST_CASE("softmax of zeros is uniform") {
  Tape tape;
  Node* y = tape.softmax(tape.input(Tensor::vector({0, 0, 0})));
  for (int i = 0; i < 3; ++i) CHECK(y->value.at(i) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax is nonnegative and sums to 1 for random inputs") {
  Rng rng(7);
  Tape tape;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng.next_int(8));
    Tensor v({n});
    for (auto& x : v.data) x = rng.uniform(-50, 50);
    Node* y = tape.softmax(tape.input(v));
    real_t total = 0;
    for (int i = 0; i < n; ++i) {
      CHECK(y->value.at(i) >= 0);
      total += y->value.at(i);
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("tanh(0) has value 0 and local derivative 1") {
  ParameterRegistry reg;
  ad::Parameter* p = reg.add("x", Tensor::scalar(0));
  Tape tape;
  Node* y = tape.tanh(tape.param(p));
  CHECK(y->value.at(0) == 0);
  tape.backward(y);
  CHECK(p->grad.at(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-sum-exp of [0, ln 3] is ln 4") {
  Tape tape;
  Node* y = tape.logsumexp(tape.input(Tensor::vector({0, std::log(3.0)})));
  CHECK(y->value.at(0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("dot product gradient is the other operand") {
  ParameterRegistry reg;
  ad::Parameter* w = reg.add("w", Tensor::vector({1, 2}));
  Tape tape;
  Node* loss = tape.dot(tape.param(w), tape.input(Tensor::vector({3, 4})));
  CHECK(loss->value.at(0) == 11);
  tape.backward(loss);
  CHECK(w->grad.at(0) == 3);
  CHECK(w->grad.at(1) == 4);
}

TEST_CASE("sum of softmax has identically zero gradient") {
  ParameterRegistry reg;
  ad::Parameter* z = reg.add("z", Tensor::vector({0.3, -1.2, 2.5, 0.0}));
  Tape tape;
  Node* loss = tape.sum(tape.softmax(tape.param(z)));
  tape.backward(loss);
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(z->grad.at(i)) < 1e-12);
}

TEST_CASE("two-layer network with 17 parameters passes finite differences") {
  Rng rng(42);
  ParameterRegistry reg;
  auto random = [&](std::vector<int> shape) {
    Tensor t(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-1, 1);
    return t;
  };
  reg.add("w1", random({3, 3}));   // 9
  reg.add("b1", random({3}));      // 3
  reg.add("w2", random({3}));      // 3
  reg.add("b2", random({1}));      // 1
  reg.add("gain", random({1}));    // 1 -> total 17
  REQUIRE(reg.total_values() == 17);

  Tensor x = random({3});
  auto eval = [&](bool with_grad) {
    Tape tape;
    Node* h = tape.tanh(tape.add(tape.matvec(tape.param(reg.require("w1")),
                                             tape.input(x)),
                                 tape.param(reg.require("b1"))));
    Node* pre = tape.add(tape.dot(tape.param(reg.require("w2")), h),
                         tape.param(reg.require("b2")));
    Node* loss = tape.mul(tape.param(reg.require("gain")), tape.sigmoid(pre));
    if (with_grad) tape.backward(loss);
    return loss->value.at(0);
  };
  CHECK(max_gradient_error(reg, eval) < 1e-4);
}

TEST_CASE("fan-out accumulates the sum of all consumer contributions") {
  // loss = (a*b) + (a*c) + a: hand expansion gives d/da = b + c + 1.
  ParameterRegistry reg;
  ad::Parameter* a = reg.add("a", Tensor::scalar(1.5));
  Tape tape;
  Node* an = tape.param(a);
  Node* t1 = tape.mul(an, tape.input(Tensor::scalar(2.0)));
  Node* t2 = tape.mul(an, tape.input(Tensor::scalar(-7.0)));
  Node* loss = tape.add(tape.add(t1, t2), an);
  tape.backward(loss);
  CHECK(a->grad.at(0) == doctest::Approx(2.0 - 7.0 + 1.0).epsilon(1e-12));
}

TEST_CASE("parameters not reachable from the loss keep zero gradient") {
  ParameterRegistry reg;
  ad::Parameter* used = reg.add("used", Tensor::scalar(2.0));
  ad::Parameter* unused = reg.add("unused", Tensor::vector({1, 2, 3}));
  Tape tape;
  Node* loss = tape.mul(tape.param(used), tape.param(used));
  tape.backward(loss);
  CHECK(used->grad.at(0) == doctest::Approx(4.0));
  for (int i = 0; i < 3; ++i) CHECK(unused->grad.at(i) == 0);
}

TEST_CASE("shape mismatches are rejected with the op tag") {
  Tape tape;
  Node* a = tape.input(Tensor::vector({1, 2}));
  Node* b = tape.input(Tensor::vector({1, 2, 3}));
  CHECK_THROWS_WITH_AS(tape.add(a, b), doctest::Contains("add"), ShapeError);
  Node* m = tape.input(Tensor({2, 2}));
  CHECK_THROWS_AS(tape.matvec(m, b), ShapeError);
  CHECK_THROWS_AS(tape.matvec_t(m, b), ShapeError);
  CHECK_THROWS_AS(tape.dot(a, b), ShapeError);
}

TEST_CASE("backward rejects non-scalar loss") {
  Tape tape;
  Node* v = tape.input(Tensor::vector({1, 2}));
  CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
}

TEST_CASE("every primitive passes finite differences") {
  Rng rng(11);
  ParameterRegistry reg;
  auto random = [&](std::vector<int> shape) {
    Tensor t(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-1, 1);
    return t;
  };
  ad::Parameter* m = reg.add("m", random({3, 4}));
  ad::Parameter* v4 = reg.add("v4", random({4}));
  ad::Parameter* v3 = reg.add("v3", random({3}));
  Tensor mask = dropout_mask({4}, 0.5, rng);

  auto eval = [&](bool with_grad) {
    Tape tape;
    Node* mn = tape.param(m);
    Node* a = tape.param(v4);
    Node* b = tape.param(v3);
    Node* mv = tape.matvec(mn, a);                       // (3)
    Node* mvt = tape.matvec_t(mn, b);                    // (4)
    Node* drop = tape.dropout(mvt, mask);                // (4)
    Node* gathered = tape.gather_rows(mn, {2, -1, 0});   // (3,4) zero-pad row
    Node* pooled = tape.max_over_rows(gathered);         // (4)
    Node* stacked = tape.stack_rows({a, drop, pooled});  // (3,4)
    Node* flat = tape.flatten(stacked);                  // (12)
    Node* cat = tape.concat({tape.relu(mv), tape.sigmoid(b), flat});
    Node* sm = tape.softmax(cat);
    Node* lse = tape.logsumexp(tape.tanh(flat));
    Node* loss = tape.add(tape.sum(tape.mul(sm, sm)),
                          tape.affine(lse, 0.5, 1.0));
    if (with_grad) tape.backward(loss);
    return loss->value.at(0);
  };
  CHECK(max_gradient_error(reg, eval) < 1e-4);
}

TEST_CASE("orthonormal init produces orthonormal rows or columns") {
  Rng rng(3);
  SUBCASE("1x1 is a unit") {
    Tensor q = init_orthonormal(1, 1, rng);
    CHECK(std::fabs(std::fabs(q.at(0, 0)) - 1.0) < 1e-12);
  }
  SUBCASE("3x3 Gram matrix is the identity") {
    Tensor q = init_orthonormal(3, 3, rng);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        real_t dot = 0;
        for (int k = 0; k < 3; ++k) dot += q.at(i, k) * q.at(j, k);
        CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-6);
      }
    }
  }
  SUBCASE("2x5 rows are orthonormal") {
    Tensor q = init_orthonormal(2, 5, rng);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        real_t dot = 0;
        for (int k = 0; k < 5; ++k) dot += q.at(i, k) * q.at(j, k);
        CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-6);
      }
    }
  }
  SUBCASE("square Q preserves vector norms") {
    Tensor q = init_orthonormal(6, 6, rng);
    for (int trial = 0; trial < 5; ++trial) {
      Tensor v({6});
      for (auto& x : v.data) x = rng.gaussian();
      real_t norm_in = 0, norm_out = 0;
      for (int i = 0; i < 6; ++i) {
        real_t y = 0;
        for (int j = 0; j < 6; ++j) y += q.at(i, j) * v.at(j);
        norm_out += y * y;
        norm_in += v.at(i) * v.at(i);
      }
      CHECK(std::fabs(std::sqrt(norm_out) - std::sqrt(norm_in)) < 1e-5);
    }
  }
  SUBCASE("seeded rng reproduces the same matrix") {
    Rng r1(99), r2(99);
    Tensor a = init_orthonormal(4, 4, r1);
    Tensor b = init_orthonormal(4, 4, r2);
    CHECK(a.data == b.data);
  }
}

TEST_CASE("dropout masks follow the inverted-dropout contract") {
  Rng rng(5);
  SUBCASE("rate 0 gives all ones") {
    Tensor m = dropout_mask({10}, 0.0, rng);
    for (real_t v : m.data) CHECK(v == 1.0);
  }
  SUBCASE("rate 0.5 has mean near 1") {
    Tensor m = dropout_mask({100, 100}, 0.5, rng);
    real_t mean = 0;
    for (real_t v : m.data) mean += v;
    mean /= static_cast<real_t>(m.size());
    CHECK(std::fabs(mean - 1.0) < 0.05);
  }
  SUBCASE("rate 0.2 only emits 0 or 1.25") {
    Tensor m = dropout_mask({1000}, 0.2, rng);
    std::set<real_t> seen(m.data.begin(), m.data.end());
    for (real_t v : seen) CHECK((v == 0.0 || std::fabs(v - 1.25) < 1e-12));
  }
  SUBCASE("rate >= 1 is rejected") {
    CHECK_THROWS_AS(dropout_mask({3}, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(dropout_mask({3}, -0.1, rng), std::invalid_argument);
  }
}

TEST_CASE("rng state round-trips through serialization") {
  Rng a(123);
  a.uniform();
  a.gaussian();
  std::string state = a.serialize();
  Rng b;
  b.deserialize(state);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("registry rejects duplicate names and finds by name") {
  ParameterRegistry reg;
  reg.add("w", Tensor::scalar(1));
  CHECK_THROWS_AS(reg.add("w", Tensor::scalar(2)), std::invalid_argument);
  CHECK(reg.find("w") != nullptr);
  CHECK(reg.find("missing") == nullptr);
  CHECK_THROWS_AS(reg.require("missing"), std::out_of_range);
}
