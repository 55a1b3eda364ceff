#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "ldp/models.hpp"
#include "ldp/channels.hpp"
#include "test_support.hpp"

using namespace ldp;
using ldp::testing::simpson;

TEST_CASE("loss functions and their doubling constants") {
  const LossFn square = loss(LossKind::power, 2.0);
  CHECK(square(3.0) == doctest::Approx(9.0));
  CHECK(square.doubling_a == doctest::Approx(2.25));
  CHECK(square(0.0) == 0.0);

  const LossFn huber = loss("huber", 1.0);
  CHECK(huber(0.5) == doctest::Approx(0.125));
  CHECK(huber(2.0) == doctest::Approx(1.5));
  CHECK(huber.doubling_a == doctest::Approx(4.5));

  for (const LossFn& l : {square, huber, loss(LossKind::power, 0.5)}) {
    double previous = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double t = 0.1 * i;
      CHECK(l(t) >= previous);
      CHECK(l(1.5 * t) <= l.doubling_a * l(t) * (1.0 + 1e-12));
      previous = l(t);
    }
  }

  CHECK_THROWS_AS(loss(LossKind::power, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(loss("nope", 1.0), std::invalid_argument);
}

TEST_CASE("uniform endpoint model") {
  CHECK_THROWS_AS(uniform_model(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_model(1.5, 1.0), std::invalid_argument);

  const auto model = uniform_model(1.0, 1.0);
  CHECK(model->theta() == 1.0);

  SUBCASE("sample mean sits in the CLT band") {
    const RandomStream stream = RandomStream::root(3).derive(0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += model->draw1(stream, i);
    CHECK(std::abs(sum / n - 0.5) < 4.0 / (std::sqrt(12.0) * 1000.0));
  }

  SUBCASE("discretized expectation of the doubled identity is theta") {
    for (double theta : {0.25, 0.6, 1.0}) {
      const auto m = uniform_model(theta, 1.0);
      const DiscreteDist d = m->discretize(2000);
      double mean = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        mean += d.weight(i) * 2.0 * d.atom(i)[0];
      }
      CHECK(std::abs(mean - theta) < 1.0 / 2000.0);
    }
  }

  SUBCASE("quantized distance between nested endpoints") {
    const DiscreteDist a = uniform_model(1.0, 1.0)->discretize(1000);
    const DiscreteDist b = uniform_model(0.9, 1.0)->discretize(1000);
    CHECK(tv_distance(a, b) == doctest::Approx(0.1).epsilon(1e-6));
  }

  SUBCASE("finer quantization converges") {
    const auto m = uniform_model(0.7, 1.0);
    auto expectation = [&](std::size_t r) {
      const DiscreteDist d = m->discretize(r);
      double acc = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d.weight(i) * 2.0 * d.atom(i)[0];
      }
      return acc;
    };
    CHECK(std::abs(expectation(512) - expectation(1024)) < 4.0 / 512.0);
  }
}

TEST_CASE("moment worst-case pair") {
  const double kappa = 2.0, L = 2.0, eps = 0.01, delta = 1e-6;
  const auto model = moment_model(MomentKind::heavy,
                                  MomentFunctional::identity(), kappa, L, eps,
                                  delta);

  SUBCASE("moment budget is respected with the promised split") {
    double m1 = 0.0;
    const DiscreteDist& p1 = model->pair1();
    for (std::size_t i = 0; i < p1.size(); ++i) {
      m1 += p1.weight(i) * std::pow(std::abs(p1.atom(i)[0]), kappa);
    }
    CHECK(m1 == doctest::Approx(delta * delta * (1.0 - eps) + L / 2.0));
    CHECK(m1 <= L);
  }

  SUBCASE("the pair sits at exact TV distance eps") {
    CHECK(tv_distance(model->pair0(), model->pair1()) ==
          doctest::Approx(eps).epsilon(1e-14));
    CHECK(model->tv_exact() == eps);
  }

  SUBCASE("functional gap approaches the rate value") {
    // (L/(2 eps))^(1/kappa) * eps = 0.1 at these parameters.
    CHECK(std::abs(model->theta_gap() - 0.1) < 1e-5);
  }

  SUBCASE("sampler hits the moving atom with frequency eps") {
    const RandomStream stream = RandomStream::root(4).derive(0);
    int hits = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      if (model->draw1(stream, i) > 1.0) ++hits;
    }
    CHECK(std::abs(hits / static_cast<double>(n) - eps) < 0.002);
  }

  SUBCASE("inadmissible parameters are rejected") {
    CHECK_THROWS_AS(moment_model(MomentKind::heavy, MomentFunctional::identity(),
                                 kappa, L, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(moment_model(MomentKind::heavy, MomentFunctional::identity(),
                                 kappa, L, eps, /*delta=*/2.0),
                    std::invalid_argument);
  }

  SUBCASE("bounded variant keeps both atoms inside the moment ball") {
    const auto bounded = moment_model(MomentKind::bounded,
                                      MomentFunctional::identity(), kappa, L,
                                      0.25);
    CHECK(tv_distance(bounded->pair0(), bounded->pair1()) ==
          doctest::Approx(0.25));
    CHECK(bounded->theta_gap() ==
          doctest::Approx(0.25 * std::pow(L, 1.0 / kappa)));
  }
}

TEST_CASE("Hoelder density model") {
  const double beta = 1.0, L = 1.0, x0 = 0.0;
  const auto base = holder_density_model(beta, L, x0);
  const double h = 0.5 * base->max_admissible_h();
  const auto model = holder_density_model(beta, L, x0, 0, h);

  SUBCASE("densities are non-negative and integrate to one") {
    const Interval support = model->support();
    for (bool perturbed : {false, true}) {
      double min_value = 1e300;
      for (int i = 0; i <= 4000; ++i) {
        const double x =
            support.lo + (support.hi - support.lo) * i / 4000.0;
        min_value = std::min(min_value, model->density(x, perturbed));
      }
      CHECK(min_value >= 0.0);
      const double mass = simpson(
          [&](double x) { return model->density(x, perturbed); }, support.lo,
          support.hi, 20000);
      CHECK(std::abs(mass - 1.0) < 1e-8);
    }
  }

  SUBCASE("perturbation integrates to zero") {
    const Interval support = model->support();
    const double mass = simpson(
        [&](double x) {
          return model->density(x, true) - model->density(x, false);
        },
        support.lo, support.hi, 20000);
    CHECK(std::abs(mass) < 1e-10);
  }

  SUBCASE("functional gap matches the closed form and a numerical derivative") {
    const double gap = std::abs(model->theta_of(true) - model->theta_of(false));
    CHECK(gap == doctest::Approx(model->functional_gap_closed_form())
                     .epsilon(1e-12));
    // Independent check: the densities themselves at x0 (m = 0).
    const double direct =
        std::abs(model->density(x0, true) - model->density(x0, false));
    CHECK(direct == doctest::Approx(gap).epsilon(1e-12));
  }

  SUBCASE("TV distance of the pair matches the closed form") {
    const Interval support = model->support();
    const double tv = 0.5 * simpson(
                                [&](double x) {
                                  return std::abs(model->density(x, true) -
                                                  model->density(x, false));
                                },
                                support.lo, support.hi, 20000);
    CHECK(tv == doctest::Approx(model->tv_closed_form()).epsilon(1e-7));
  }

  SUBCASE("Hoelder constant holds on a grid") {
    const Interval support = model->support();
    const int points = 400;
    std::vector<double> xs(points), v0(points), v1(points);
    for (int i = 0; i < points; ++i) {
      xs[i] = support.lo + (support.hi - support.lo) * i / (points - 1.0);
      v0[i] = model->density(xs[i], false);
      v1[i] = model->density(xs[i], true);
    }
    double worst0 = 0.0, worst1 = 0.0;
    for (int i = 0; i < points; ++i) {
      for (int j = i + 1; j < points; ++j) {
        const double gap = std::pow(xs[j] - xs[i], beta);
        worst0 = std::max(worst0, std::abs(v0[j] - v0[i]) / gap);
        worst1 = std::max(worst1, std::abs(v1[j] - v1[i]) / gap);
      }
    }
    CHECK(worst0 <= 0.5 * L * (1.0 + 1e-6));
    CHECK(worst1 <= L * (1.0 + 1e-6));
  }

  SUBCASE("sampler matches the discretized expectation") {
    const RandomStream stream = RandomStream::root(5).derive(0);
    auto probe = [](double x) { return std::cos(3.0 * x); };
    double mc = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) mc += probe(model->draw1(stream, i));
    mc /= n;
    const DiscreteDist d = model->discretize(8000);
    double exact = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      exact += d.weight(i) * probe(d.atom(i)[0]);
    }
    CHECK(std::abs(mc - exact) < 0.005);
  }

  SUBCASE("inadmissible bump widths are rejected") {
    CHECK_THROWS_AS(
        holder_density_model(beta, L, x0, 0, 10.0 * base->max_admissible_h()),
        std::invalid_argument);
    CHECK_THROWS_AS(holder_density_model(beta, L, x0, 1, h),
                    std::invalid_argument);  // m >= beta
  }

  SUBCASE("finer quantization converges") {
    auto expectation = [&](std::size_t r) {
      const DiscreteDist d = model->discretize(r);
      double acc = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d.weight(i) * std::cos(2.0 * d.atom(i)[0]);
      }
      return acc;
    };
    CHECK(std::abs(expectation(400) - expectation(800)) < 8.0 / 400.0);
  }
}

TEST_CASE("anisotropic density model") {
  const auto model = anisotropic_model({1.0, 0.5}, {1.0, 1.0}, {0.0, 0.0});

  SUBCASE("dimension guard") {
    CHECK_THROWS_AS(anisotropic_model({1.0, 1.0, 1.0, 1.0},
                                      {1.0, 1.0, 1.0, 1.0},
                                      {0.0, 0.0, 0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(anisotropic_model({2.0}, {1.0}, {0.0}),
                    std::invalid_argument);
  }

  SUBCASE("worst-case pair solves the two-equation system") {
    const double eps = 1e-4;
    const auto pair = model->worst_case_pair(eps);

    // Independent bisection on c2 h prod_j (h/c0)^(1/beta_j) = eps.
    auto excess = [&](double h) {
      double acc = model->c2() * h;
      acc *= std::pow(h / model->c0(), 1.0 / 1.0);
      acc *= std::pow(h / model->c0(), 1.0 / 0.5);
      return acc - eps;
    };
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(pair.h == doctest::Approx(lo).epsilon(1e-9));
    CHECK(pair.h_axes[0] == doctest::Approx(pair.h / model->c0()).epsilon(1e-12));
    CHECK(pair.h_axes[1] ==
          doctest::Approx(std::pow(pair.h / model->c0(), 2.0)).epsilon(1e-12));
    CHECK(pair.tv == doctest::Approx(eps).epsilon(1e-9));
  }

  SUBCASE("functional gap matches the density difference at the centre") {
    const auto pair = model->worst_case_pair(1e-4);
    const double x[2] = {0.0, 0.0};
    const double diff = std::abs(model->density1({x, 2}, pair) -
                                 model->density0({x, 2}));
    CHECK(diff == doctest::Approx(pair.theta_gap).epsilon(1e-10));
  }

  SUBCASE("TV closed form against the factorized quadrature oracle") {
    // The perturbation is separable, so half its L1 mass factorizes into the
    // centre gap times per-axis ratios integral(|g|)/|g(0)|, each computable
    // to high precision in one dimension (the axis scalings cancel).
    const auto pair = model->worst_case_pair(1e-4);
    const double x0v[2] = {0.0, 0.0};
    const double centre_gap = std::abs(model->density1({x0v, 2}, pair) -
                                       model->density0({x0v, 2}));
    const double kappa_ratio =
        simpson([&](double y) {
          return std::abs(bump::kappa0(y + 1.0) - bump::kappa0(y));
        }, -1.6, 0.6, 20000) / bump::kappa0(0.0);
    const double oracle_tv = 0.5 * centre_gap * pair.h_axes[0] *
                             pair.h_axes[1] * kappa_ratio * kappa_ratio;
    CHECK(oracle_tv == doctest::Approx(pair.tv).epsilon(1e-8));
  }

  SUBCASE("TV closed form against a direct bivariate quadrature") {
    const auto pair = model->worst_case_pair(1e-4);
    const double ax = -1.5 * pair.h_axes[0], bx = 0.5 * pair.h_axes[0];
    const double ay = -1.5 * pair.h_axes[1], by = 0.5 * pair.h_axes[1];
    const int nodes = 400;
    double mass = 0.0;
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        const double p[2] = {ax + (bx - ax) * (i + 0.5) / nodes,
                             ay + (by - ay) * (j + 0.5) / nodes};
        mass += std::abs(model->density1({p, 2}, pair) -
                         model->density0({p, 2}));
      }
    }
    mass *= (bx - ax) * (by - ay) / (nodes * nodes);
    CHECK(0.5 * mass == doctest::Approx(pair.tv).epsilon(1e-4));
  }

  SUBCASE("perturbed density integrates to one") {
    // Each axis perturbation has exactly zero mass, and the Gaussian base
    // integrates to one; both verified with the independent oracle.
    const double zero_mass = simpson(
        [&](double y) { return bump::kappa0(y + 1.0) - bump::kappa0(y); },
        -1.6, 0.6, 20000);
    CHECK(std::abs(zero_mass) < 1e-12);
    const double sigma = model->sigma();
    const double gauss = simpson(
        [&](double t) {
          return std::exp(-0.5 * t * t / (sigma * sigma)) /
                 (sigma * std::sqrt(2.0 * 3.14159265358979323846));
        },
        -12.0 * sigma, 12.0 * sigma, 40000);
    CHECK(gauss == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("perturbed density stays non-negative") {
    const auto pair = model->worst_case_pair(model->max_admissible_h() > 1e-3
                                                 ? 1e-4
                                                 : 1e-6);
    const RandomStream stream = RandomStream::root(6).derive(0);
    std::vector<double> x(2);
    for (int i = 0; i < 2000; ++i) {
      model->draw(stream, i, x);
      CHECK(model->density1(x, pair) >= 0.0);
    }
  }

  SUBCASE("base sampler matches the product Gaussian moments") {
    const RandomStream stream = RandomStream::root(7).derive(0);
    std::vector<double> x(2);
    double m1 = 0.0, m2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      model->draw(stream, i, x);
      m1 += x[0];
      m2 += x[0] * x[0];
    }
    m1 /= n;
    m2 /= n;
    const double sigma = model->sigma();
    CHECK(std::abs(m1) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(m2 - sigma * sigma) <
          6.0 * sigma * sigma / std::sqrt(static_cast<double>(n)));
  }

  SUBCASE("finer quantization converges") {
    auto expectation = [&](std::size_t r) {
      const DiscreteDist d = model->discretize(r);
      double acc = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d.weight(i) * std::cos(d.atom(i)[0] + d.atom(i)[1]);
      }
      return acc;
    };
    CHECK(std::abs(expectation(40) - expectation(80)) < 1.0 / 40.0);
  }

  SUBCASE("rejection sampler tracks the perturbed density") {
    const auto pair = model->worst_case_pair(1e-3);
    const RandomStream stream = RandomStream::root(8).derive(0);
    std::vector<double> x(2);
    double inside = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      model->draw_perturbed(stream, i, pair, x);
      if (std::abs(x[0]) < 1.0 && std::abs(x[1]) < 1.0) inside += 1.0;
    }
    inside /= n;
    // Compare with the quadrature mass of p1 over the same box.
    const int nodes = 150;
    double mass = 0.0;
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        const double p[2] = {-1.0 + 2.0 * (i + 0.5) / nodes,
                             -1.0 + 2.0 * (j + 0.5) / nodes};
        mass += model->density1({p, 2}, pair);
      }
    }
    mass *= 4.0 / (nodes * nodes);
    CHECK(std::abs(inside - mass) < 0.01);
  }
}
