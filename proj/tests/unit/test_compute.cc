#include <cmath>
#include <random>

#include "doctest.h"
#include "fsgcn/ops.h"
#include "fsgcn/simd/kernels.h"
#include "oracles.h"

using namespace fsgcn;

namespace {

SparseMatrix random_sparse(std::mt19937_64& gen, int64_t rows, int64_t cols, double density) {
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  std::bernoulli_distribution keep(density);
  std::vector<Triplet> t;
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j)
      if (keep(gen)) t.push_back({i, j, w(gen)});
  return SparseMatrix::from_triplets(rows, cols, t);
}

std::vector<double> random_vector(std::mt19937_64& gen, size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

}  // namespace

TEST_CASE("every supported kernel table matches the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 gen(2);
  for (simd::Isa isa : simd::supported_isas()) {
    CAPTURE(simd::isa_name(isa));
    const auto& k = simd::kernels_for(isa);
    for (size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 64, 129}) {
      CAPTURE(n);
      const auto x = random_vector(gen, n), y = random_vector(gen, n);
      auto y1 = y, y2 = y;
      ref.axpy(n, 0.7, x.data(), y1.data());
      k.axpy(n, 0.7, x.data(), y2.data());
      // Fused multiply-add rounds once, the scalar path twice.
      for (size_t i = 0; i < n; ++i)
        CHECK(std::abs(y1[i] - y2[i]) <= 0x1.0p-51 * (std::abs(0.7 * x[i]) + std::abs(y[i])));

      CHECK(k.dot(n, x.data(), y.data()) == doctest::Approx(ref.dot(n, x.data(), y.data())).epsilon(1e-13));
      CHECK(k.squared_distance(n, x.data(), y.data()) ==
            doctest::Approx(ref.squared_distance(n, x.data(), y.data())).epsilon(1e-13));

      std::vector<double> r1(n), r2(n);
      ref.relu(n, x.data(), r1.data());
      k.relu(n, x.data(), r2.data());
      CHECK(r1 == r2);

      ref.relu_backward(n, y.data(), r1.data(), r1.data());
      k.relu_backward(n, y.data(), r2.data(), r2.data());
      CHECK(r1 == r2);

      std::vector<double> mask(n);
      for (size_t i = 0; i < n; ++i) mask[i] = (i * 7 + 3) % 3 == 0 ? 0.0 : 1.0;
      ref.masked_scale(n, 2.0, x.data(), mask.data(), r1.data());
      k.masked_scale(n, 2.0, x.data(), mask.data(), r2.data());
      CHECK(r1 == r2);

      auto m1 = random_vector(gen, n), v1 = random_vector(gen, n);
      for (double& v : v1) v = std::abs(v);
      auto m2 = m1, v2 = v1;
      ref.update_moments(n, 0.9, 0.999, x.data(), m1.data(), v1.data());
      k.update_moments(n, 0.9, 0.999, x.data(), m2.data(), v2.data());
      for (size_t i = 0; i < n; ++i) {
        CHECK(m2[i] == doctest::Approx(m1[i]).epsilon(1e-15));
        CHECK(v2[i] == doctest::Approx(v1[i]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("isa override is scoped") {
  const auto before = simd::kernels().isa;
  {
    simd::ScopedIsa scoped(simd::Isa::kScalar);
    CHECK(simd::kernels().isa == simd::Isa::kScalar);
  }
  CHECK(simd::kernels().isa == before);
  CHECK_THROWS(simd::parse_isa("sse9"));
  for (simd::Isa isa : {simd::Isa::kAvx2, simd::Isa::kNeon})
    if (!simd::isa_supported(isa)) CHECK_THROWS(simd::set_active_isa(isa));
}

TEST_CASE("operators agree across kernel tables") {
  std::mt19937_64 gen(4);
  const auto a = random_sparse(gen, 9, 9, 0.4);
  const auto x = oracle::random_dense(gen, 9, 13);
  const auto w = oracle::random_dense(gen, 13, 6);
  DenseMatrix y_ref, z_ref;
  {
    simd::ScopedIsa scoped(simd::Isa::kScalar);
    y_ref = spmm(a, x);
    z_ref = relu(affine(y_ref, w));
  }
  for (simd::Isa isa : simd::supported_isas()) {
    simd::ScopedIsa scoped(isa);
    const auto y = spmm(a, x);
    const auto z = relu(affine(y, w));
    for (size_t i = 0; i < z.size(); ++i) CHECK(z.data[i] == doctest::Approx(z_ref.data[i]).epsilon(1e-13));
  }
}

TEST_CASE("spmm hand examples") {
  const auto id = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {1, 1, 1}});
  DenseMatrix x(2, 2);
  x.data = {1, 2, 3, 4};
  CHECK(spmm(id, x) == x);
  const auto half = SparseMatrix::from_triplets(2, 2, {{0, 0, .5}, {0, 1, .5}, {1, 0, .5}, {1, 1, .5}});
  CHECK(spmm(half, DenseMatrix::identity(2)).data == std::vector<double>{.5, .5, .5, .5});
  CHECK_THROWS_AS(spmm(half, DenseMatrix(3, 2)), ShapeError);
}

TEST_CASE("spmm matches the dense oracle and is linear") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_sparse(gen, 6, 6, 0.4);
    const auto x = oracle::random_dense(gen, 6, 4);
    const auto z = oracle::random_dense(gen, 6, 4);
    const auto expected = oracle::matmul(oracle::to_dense(a), oracle::to_dense(x));
    const auto y = spmm(a, x);
    for (int64_t r = 0; r < 6; ++r)
      for (int64_t c = 0; c < 4; ++c) CHECK(std::abs(y(r, c) - expected[r][c]) < 1e-12);

    DenseMatrix combo(6, 4);
    for (size_t i = 0; i < combo.size(); ++i) combo.data[i] = 1.5 * x.data[i] - 0.25 * z.data[i];
    const auto lhs = spmm(a, combo), ya = spmm(a, x), yb = spmm(a, z);
    for (size_t i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs.data[i] - (1.5 * ya.data[i] - 0.25 * yb.data[i])) < 1e-10);

    // <A X, U> = <X, A^T U>
    const auto u = oracle::random_dense(gen, 6, 4);
    CHECK(frobenius_dot(y, u) == doctest::Approx(frobenius_dot(x, spmm_backward(a, u, false))).epsilon(1e-12));
  }
}

TEST_CASE("affine scalar chain rule") {
  DenseMatrix x(1, 1, 2.0), w(1, 1, 3.0), up(1, 1, 1.0), gw(1, 1), gx;
  CHECK(affine(x, w).data[0] == 6.0);
  affine_backward(x, w, up, &gw, &gx);
  CHECK(gw.data[0] == 2.0);
  CHECK(gx.data[0] == 3.0);
  affine_backward(x, w, up, &gw, nullptr);
  CHECK(gw.data[0] == 4.0);  // accumulates
  CHECK(affine(x, DenseMatrix::identity(1)) == x);
  CHECK_THROWS_AS(affine(DenseMatrix(2, 3), DenseMatrix(2, 3)), ShapeError);
}

TEST_CASE("affine and bias gradients match finite differences") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = oracle::random_dense(gen, 5, 4);
    auto w = oracle::random_dense(gen, 4, 3);
    auto b = oracle::random_dense(gen, 1, 3);
    const auto up = oracle::random_dense(gen, 5, 3);
    auto f = [&] {
      auto y = affine(x, w);
      add_row_bias(&y, b);
      return frobenius_dot(y, up);
    };
    DenseMatrix gw(4, 3), gx, gb(1, 3);
    affine_backward(x, w, up, &gw, &gx);
    row_bias_backward(up, &gb);
    CHECK(oracle::max_relative_error(gw.data, oracle::numeric_gradient(f, w.data)) < 1e-6);
    CHECK(oracle::max_relative_error(gx.data, oracle::numeric_gradient(f, x.data)) < 1e-6);
    CHECK(oracle::max_relative_error(gb.data, oracle::numeric_gradient(f, b.data)) < 1e-6);
  }
}

TEST_CASE("relu forward and backward") {
  DenseMatrix x(1, 2);
  x.data = {-1.0, 2.0};
  CHECK(relu(x).data == std::vector<double>{0.0, 2.0});
  DenseMatrix up(1, 2, 5.0);
  CHECK(relu_backward(up, relu(x)).data == std::vector<double>{0.0, 5.0});
}

TEST_CASE("dropout mask, scaling and expectation") {
  Rng rng(3);
  const auto m = make_dropout_mask(400, 250, 0.5, rng);
  double kept = 0.0;
  for (double v : m.mask.data) {
    CHECK((v == 0.0 || v == 1.0));
    kept += v;
  }
  DenseMatrix x(400, 250, 3.0);
  const auto y = apply_dropout(x, m);
  double sum = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    CHECK(y.data[i] == m.mask.data[i] * 6.0);
    sum += y.data[i];
  }
  // Each output is 0 or 6 with mean 3 and standard deviation 3.
  const double n = static_cast<double>(y.size());
  CHECK(std::abs(sum / n - 3.0) < 3.0 * 3.0 / std::sqrt(n));
  const auto g = dropout_backward(DenseMatrix(400, 250, 1.0), m);
  for (size_t i = 0; i < g.size(); ++i) CHECK(g.data[i] == 2.0 * m.mask.data[i]);
  CHECK(kept > 0.0);
}

TEST_CASE("softmax cross-entropy") {
  SUBCASE("uniform logits give ln C") {
    for (int c : {2, 4, 7}) {
      DenseMatrix logits(3, c, 0.25);
      const std::vector<int64_t> rows = {0, 1, 2};
      const std::vector<int> targets = {0, c - 1, 1};
      const std::vector<double> weights(3, 1.0 / 3.0);
      CHECK(softmax_cross_entropy(logits, rows, targets, weights, nullptr) == doctest::Approx(std::log(c)).epsilon(1e-14));
    }
  }
  SUBCASE("stable for large logits") {
    DenseMatrix logits(1, 3);
    logits.data = {1000.0, -1000.0, 999.0};
    const double ce = cross_entropy_row(logits.row(0), 1);
    CHECK(std::isfinite(ce));
    CHECK(ce == doctest::Approx(2000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-12));
    std::vector<double> p(3);
    softmax_row(logits.row(0), p);
    CHECK(std::isfinite(p[0]));
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
  }
  SUBCASE("target out of range") {
    DenseMatrix logits(1, 3);
    CHECK_THROWS_AS(cross_entropy_row(logits.row(0), 3), std::out_of_range);
    CHECK_THROWS_AS(cross_entropy_row(logits.row(0), -1), std::out_of_range);
  }
  SUBCASE("gradient matches finite differences") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
      auto logits = oracle::random_dense(gen, 5, 4, 3.0);
      const std::vector<int64_t> rows = {0, 2, 3, 4};
      const std::vector<int> targets = {1, 0, 3, 3};
      const std::vector<double> weights = {0.5, 0.25, 1.0, 0.1};
      DenseMatrix grad(5, 4);
      softmax_cross_entropy(logits, rows, targets, weights, &grad);
      auto f = [&] { return softmax_cross_entropy(logits, rows, targets, weights, nullptr); };
      CHECK(oracle::max_relative_error(grad.data, oracle::numeric_gradient(f, logits.data)) < 1e-6);
      for (int64_t c = 0; c < 4; ++c) CHECK(grad(1, c) == 0.0);
    }
  }
}

TEST_CASE("distances") {
  const std::vector<double> a = {0.0, 0.0}, b = {3.0, 4.0};
  CHECK(euclidean_distance(a, b) == 5.0);
  CHECK(squared_euclidean_distance(a, b) == 25.0);
  std::vector<double> ga(2), gb(2);
  euclidean_distance_backward(a, a, 1.0, ga, gb);
  CHECK(ga == std::vector<double>{0.0, 0.0});

  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_vector(gen, 6), y = random_vector(gen, 6);
    std::vector<double> gx(6), gy(6), sx(6), sy(6);
    euclidean_distance_backward(x, y, 1.0, gx, gy);
    squared_euclidean_distance_backward(x, y, 1.0, sx, sy);
    auto d = [&] { return euclidean_distance(x, y); };
    auto s = [&] { return squared_euclidean_distance(x, y); };
    CHECK(oracle::max_relative_error(gx, oracle::numeric_gradient(d, x)) < 1e-6);
    CHECK(oracle::max_relative_error(gy, oracle::numeric_gradient(d, y)) < 1e-6);
    CHECK(oracle::max_relative_error(sx, oracle::numeric_gradient(s, x)) < 1e-6);
    CHECK(oracle::max_relative_error(sy, oracle::numeric_gradient(s, y)) < 1e-6);
  }
}
