#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "tvflow/errors.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/oracle.hpp"

using namespace tvflow;

namespace {

Field random_field(const GridPtr& g, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Field u(g, dim);
  for (double& v : u.values()) v = n(rng);
  return u;
}

EdgeField random_edge_field(const GridPtr& g, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  EdgeField z(g, dim);
  for (double& v : z.values()) v = n(rng);
  return z;
}

}  // namespace

TEST_CASE("uniform 1-D grid") {
  const auto g = build_uniform_1d(100, 1.0);
  CHECK(g->partition.size() == 100);
  CHECK(g->edges.size() == 99);
  for (const Cell& c : g->partition.cells()) CHECK(c.measure == doctest::Approx(0.01).epsilon(1e-14));
  for (const Edge& e : g->edges.edges()) CHECK(e.measure == 1.0);
  CHECK(g->partition.boundary_mask()[0] == 1);
  CHECK(g->partition.boundary_mask()[99] == 1);
  CHECK(g->partition.boundary_mask()[50] == 0);

  const auto one = build_uniform_1d(1, 1.0);
  CHECK(one->partition.size() == 1);
  CHECK(one->edges.size() == 0);
  CHECK(build_uniform_1d(2, 1.0)->partition.min_cell_measure() == 0.5);
  CHECK_THROWS_AS(build_uniform_1d(0, 1.0), PreconditionError);
  CHECK_THROWS_AS(build_uniform_1d(3, -1.0), PreconditionError);
}

TEST_CASE("uniform 2-D grid") {
  const auto g = build_uniform_2d(25, 25, 1.0, 1.0);
  CHECK(g->partition.size() == 625);
  CHECK(g->edges.size() == 1200);
  for (const Edge& e : g->edges.edges()) {
    CHECK(e.lo < e.hi);
    CHECK(e.measure == doctest::Approx(0.04));
  }
  std::size_t boundary = 0;
  for (auto b : g->partition.boundary_mask()) boundary += b;
  CHECK(boundary == 96);
  CHECK(build_uniform_2d(1, 1, 1.0, 1.0)->edges.size() == 0);
  const auto two = build_uniform_2d(2, 1, 1.0, 1.0);
  REQUIRE(two->edges.size() == 1);
  CHECK(two->edges.edge(0).measure == 1.0);
}

TEST_CASE("incidence lists match the edges") {
  const auto g = build_uniform_2d(4, 3, 1.0, 1.0);
  std::size_t total = 0;
  for (std::size_t a = 0; a < g->partition.size(); ++a) {
    for (const Incidence& inc : g->edges.incident(a)) {
      const Edge& e = g->edges.edge(inc.edge);
      CHECK((e.lo == a || e.hi == a));
      CHECK(inc.neighbor == (e.lo == a ? e.hi : e.lo));
      CHECK(inc.sign == (e.lo == a ? 1.0 : -1.0));
      ++total;
    }
  }
  CHECK(total == 2 * g->edges.size());
}

TEST_CASE("discrete gradient") {
  const auto g = build_uniform_1d(2, 1.0);
  const Field u(g, 3, {0.6, 0.8, 0.0, 0.0, 0.0, 1.0});
  const auto du = discrete_gradient(u);
  CHECK(du.at(0)[0] == 0.6);
  CHECK(du.at(0)[1] == 0.8);
  CHECK(du.at(0)[2] == -1.0);

  const auto g2 = build_uniform_2d(5, 4, 1.0, 1.0);
  Field c(g2, 9);
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t k = 0; k < 9; ++k) c.at(a)[k] = 0.1 * static_cast<double>(k);
  const auto dc = discrete_gradient(c);
  for (double v : dc.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(1);
  const auto f = random_field(g2, 3, rng);
  const auto h = random_field(g2, 3, rng);
  Field lin(g2, 3);
  for (std::size_t i = 0; i < lin.values().size(); ++i) lin.values()[i] = 2.0 * f.values()[i] - 3.0 * h.values()[i];
  const auto dl = discrete_gradient(lin);
  const auto df = discrete_gradient(f);
  const auto dh = discrete_gradient(h);
  for (std::size_t i = 0; i < dl.values().size(); ++i) {
    CHECK(dl.values()[i] == doctest::Approx(2.0 * df.values()[i] - 3.0 * dh.values()[i]).epsilon(1e-14));
  }
}

TEST_CASE("weighted adjoint") {
  const auto g = build_uniform_1d(2, 1.0);
  const EdgeField z(g, 1, {2.0});
  const auto dz = gradient_adjoint(z);
  CHECK(dz.at(0)[0] == doctest::Approx(2.0 / 0.5));
  CHECK(dz.at(1)[0] == doctest::Approx(-2.0 / 0.5));
  const auto dz0 = gradient_adjoint(EdgeField(g, 3));
  for (double v : dz0.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(2);
  for (const auto& grid : {build_uniform_1d(10, 1.0), build_uniform_2d(4, 5, 1.0, 2.0)}) {
    for (int i = 0; i < 100; ++i) {
      const auto u = random_field(grid, 3, rng);
      const auto w = random_edge_field(grid, 3, rng);
      const double lhs = edge_inner(discrete_gradient(u), w);
      const double rhs = h_delta_inner(u, gradient_adjoint(w));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("discrete total variation") {
  const auto g = build_uniform_1d(100, 1.0);
  const auto u0 = build_s2_benchmark_initial(g);
  CHECK(discrete_tv(u0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(discrete_tv(Field(g, 3)) == 0.0);

  std::mt19937_64 rng(3);
  const auto g2 = build_uniform_2d(6, 6, 1.0, 1.0);
  const auto u = random_field(g2, 9, rng);
  Field scaled = u;
  for (double& v : scaled.values()) v *= -2.5;
  CHECK(discrete_tv(scaled) == doctest::Approx(2.5 * discrete_tv(u)).epsilon(1e-13));
}

TEST_CASE("Lipschitz bound of TV") {
  CHECK(lip_tv_upper(*build_uniform_1d(1, 1.0)) == 0.0);
  CHECK(lip_tv_upper(*build_uniform_1d(2, 1.0)) == doctest::Approx(std::sqrt(2.0 / 0.5)));
  CHECK(lip_tv_upper(*build_uniform_1d(100, 1.0)) == doctest::Approx(std::sqrt(99 * 200.0)));

  const auto g = build_uniform_1d(10, 1.0);
  const double lip = lip_tv_upper(*g);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10000; ++i) {
    const auto u = random_field(g, 3, rng);
    const auto v = random_field(g, 3, rng);
    Field d = u;
    for (std::size_t k = 0; k < d.values().size(); ++k) d.values()[k] -= v.values()[k];
    const double n = h_delta_norm(d);
    CHECK(std::abs(discrete_tv(u) - discrete_tv(v)) <= lip * n * (1.0 + 1e-12));
  }
}

TEST_CASE("facets") {
  const auto g = build_uniform_1d(100, 1.0);
  CHECK(facet(Field(g, 3), 0.0).size() == 99);
  const auto u0 = build_s2_benchmark_initial(g);
  const auto f = facet(u0, 1e-9);
  CHECK(f.size() == 97);
  for (std::size_t e : f) CHECK((e != 39 && e != 59));

  Field distinct(g, 1);
  for (std::size_t a = 0; a < distinct.size(); ++a) distinct.at(a)[0] = static_cast<double>(a);
  CHECK(facet(distinct, 0.0).empty());
}

TEST_CASE("weighted norms") {
  const auto g = build_uniform_1d(4, 1.0);
  Field c(g, 3);
  for (std::size_t a = 0; a < c.size(); ++a) {
    c.at(a)[0] = 1.0;
    c.at(a)[1] = 2.0;
    c.at(a)[2] = 2.0;
  }
  CHECK(h_delta_norm(c) == doctest::Approx(3.0).epsilon(1e-15));

  const auto g2 = build_uniform_1d(2, 1.0);
  const Field u(g2, 3, {1, 0, 0, 0, 1, 0});
  CHECK(h_delta_norm(u) * h_delta_norm(u) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  const auto g3 = build_uniform_2d(3, 3, 1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_field(g3, 3, rng);
    const auto b = random_field(g3, 3, rng);
    CHECK(std::abs(h_delta_inner(a, b)) <= h_delta_norm(a) * h_delta_norm(b) * (1 + 1e-14));
  }
  const EdgeField z0(g2, 3, {3, 4, 0});
  const Field z1(g2, 3, {1, 0, 0, 0, 1, 0});
  CHECK(h1_norm(z0, z1) == doctest::Approx(std::sqrt(25.0 + 1.0)));
}

TEST_CASE("compatibility checks") {
  const auto a = build_uniform_1d(4, 1.0);
  const auto b = build_uniform_1d(4, 1.0);
  CHECK_THROWS_AS(h_delta_inner(Field(a, 3), Field(b, 3)), PreconditionError);
  CHECK_THROWS_AS(h_delta_inner(Field(a, 3), Field(a, 9)), PreconditionError);
  CHECK_THROWS_AS(Field(a, 3, {1.0, 2.0}), PreconditionError);
}
