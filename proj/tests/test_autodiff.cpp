// Copyright 2026 The Ada3D Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <cmath>

#include "ada3d/autodiff.hpp"
#include "ada3d/error.hpp"
#include "ada3d/random.hpp"
#include "oracles.hpp"

using namespace ada3d;

namespace {

constexpr double kElementaryTol = 1e-6;

}  // namespace

TEST_CASE("finite_difference_grad on known derivatives") {
  const Tensor x(Shape{3}, std::vector<double>{0.5, -1.0, 2.0});
  // f = sum x^3  ->  3 x^2
  const Tensor g = finite_difference_grad(
      [](const Tensor& t) {
        double s = 0.0;
        for (double v : t.data()) s += v * v * v;
        return s;
      },
      x, 1e-5);
  CHECK(g[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(g[2] == doctest::Approx(12.0).epsilon(1e-9));
  CHECK_THROWS_AS(finite_difference_grad([](const Tensor&) { return 0.0; }, x, 0.0), ConfigError);
}

TEST_CASE("backward of a hand-derived expression") {
  // f = sum((a * b + a)^2),  df/da = 2 (ab + a)(b + 1),  df/db = 2 (ab + a) a
  Var a(Tensor(Shape{2}, std::vector<double>{1.0, -2.0}), true);
  Var b(Tensor(Shape{2}, std::vector<double>{3.0, 0.5}), true);
  backward(sum(square(add(mul(a, b), a))));
  CHECK(a.grad()[0] == doctest::Approx(2.0 * 4.0 * 4.0));
  CHECK(a.grad()[1] == doctest::Approx(2.0 * -3.0 * 1.5));
  CHECK(b.grad()[0] == doctest::Approx(2.0 * 4.0 * 1.0));
  CHECK(b.grad()[1] == doctest::Approx(2.0 * -3.0 * -2.0));
}

TEST_CASE("leaf gradients accumulate, seed scales, zero_grad clears") {
  Var x(Tensor(Shape{3}, 1.0), true);
  backward(sum(x));
  backward(sum(x), 0.5);
  const Tensor accumulated = x.grad();
  for (double g : accumulated.data()) CHECK(g == 1.5);
  x.zero_grad();
  CHECK_FALSE(x.has_grad());
  const Tensor cleared = x.grad();
  for (double g : cleared.data()) CHECK(g == 0.0);
}

TEST_CASE("shared subexpressions receive summed gradients") {
  Var x(Tensor(Shape{2}, std::vector<double>{2.0, 3.0}), true);
  const Var y = mul(x, x);
  backward(sum(add(y, y)));  // 2 x^2 -> 4x
  CHECK(x.grad()[0] == doctest::Approx(8.0));
  CHECK(x.grad()[1] == doctest::Approx(12.0));
}

TEST_CASE("backward contract and recording rules") {
  Var x(Tensor(Shape{2}, 1.0), true);
  CHECK_THROWS_AS(backward(x), ContractError);
  CHECK_THROWS_AS(add(x, Var(Tensor(Shape{3}))), ShapeError);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    const Var y = sum(x);
    CHECK(y.node()->parents.empty());
  }
  CHECK(grad_enabled());
  const Var c = sum(Var(Tensor(Shape{2}, 1.0)));
  CHECK(c.node()->parents.empty());
  CHECK_THROWS_AS(sum(x).mutable_value(), ContractError);
}

TEST_CASE("elementary ops pass central finite differences") {
  Rng rng(11);
  Var a(oracle::away_from_zero(Shape{3, 4}, rng), true);
  Var b(oracle::away_from_zero(Shape{3, 4}, rng), true);
  const Tensor w = random_uniform(Shape{3, 4}, rng);
  // Weighted sum so every output element gets a distinct cotangent.
  auto weigh = [&w](const Var& v) { return sum(mul(v, Var(w))); };

  SUBCASE("add") { CHECK(oracle::gradient_check([&] { return weigh(add(a, b)); }, {a, b}) < kElementaryTol); }
  SUBCASE("sub") { CHECK(oracle::gradient_check([&] { return weigh(sub(a, b)); }, {a, b}) < kElementaryTol); }
  SUBCASE("mul") { CHECK(oracle::gradient_check([&] { return weigh(mul(a, b)); }, {a, b}) < kElementaryTol); }
  SUBCASE("scale") { CHECK(oracle::gradient_check([&] { return weigh(scale(a, -2.5)); }, {a}) < kElementaryTol); }
  SUBCASE("relu") { CHECK(oracle::gradient_check([&] { return weigh(relu(a)); }, {a}) < kElementaryTol); }
  SUBCASE("abs") { CHECK(oracle::gradient_check([&] { return weigh(abs(a)); }, {a}) < kElementaryTol); }
  SUBCASE("square") { CHECK(oracle::gradient_check([&] { return weigh(square(a)); }, {a}) < kElementaryTol); }
  SUBCASE("sum") { CHECK(oracle::gradient_check([&] { return sum(a); }, {a}) < kElementaryTol); }
  SUBCASE("mean") { CHECK(oracle::gradient_check([&] { return mean(square(a)); }, {a}) < kElementaryTol); }
  SUBCASE("reshape") {
    const Tensor w2 = w.reshaped(Shape{2, 6});
    CHECK(oracle::gradient_check([&] { return sum(mul(reshape(a, Shape{2, 6}), Var(w2))); }, {a}) <
          kElementaryTol);
  }
  SUBCASE("concat_last") {
    const Tensor w3 = random_uniform(Shape{3, 8}, rng);
    CHECK(oracle::gradient_check([&] { return sum(mul(concat_last({a, b}), Var(w3))); }, {a, b}) <
          kElementaryTol);
  }
}

TEST_CASE("abs subgradient at zero is zero") {
  Var x(Tensor(Shape{3}, std::vector<double>{-1.0, 0.0, 2.0}), true);
  backward(sum(abs(x)));
  CHECK(x.grad()[0] == -1.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 1.0);
}

TEST_CASE("concat_last layout") {
  const Var a(Tensor(Shape{2, 1}, std::vector<double>{1, 2}));
  const Var b(Tensor(Shape{2, 2}, std::vector<double>{3, 4, 5, 6}));
  const Tensor c = concat_last({a, b}).value();
  CHECK(c.shape() == Shape{2, 3});
  CHECK(c == Tensor(Shape{2, 3}, std::vector<double>{1, 3, 4, 2, 5, 6}));
  CHECK_THROWS_AS(concat_last({a, Var(Tensor(Shape{3, 1}))}), ShapeError);
}
