#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "unigraph/errors.hpp"
#include "unigraph/scattering.hpp"

using namespace unigraph;

namespace {

GraphSpec leaded_ring(double length) {
  GraphParts p;
  p.vertices.push_back(make_tjunction("T"));
  p.edges.push_back({"loop", {0, 0}, {0, 1}, length, ""});
  p.leads.push_back({"L", {0, 2}});
  return GraphSpec(std::move(p));
}

TwoPortS synthetic(std::vector<Matrix2c> values, int id = 0) {
  TwoPortS t;
  for (std::size_t i = 0; i < values.size(); ++i) t.grid.push_back(1e9 + 1e6 * static_cast<double>(i));
  t.values = std::move(values);
  t.realization_id = id;
  return t;
}

}  // namespace

TEST_CASE("stub: one bounce off a Neumann end") {
  const double l = 0.37;
  const ScatteringSolver solver(fixtures::stub(l));
  for (const double nu : {1e9, 2.5e9, 7.7e9}) {
    const cplx s = solver.s_matrix(nu, 0.0)(0, 0);
    CHECK(std::abs(s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(s - std::exp(cplx(0.0, 2.0 * wavenumber(nu) * l))) < 1e-12);
  }
}

TEST_CASE("leaded ring against its closed form (z - 1/3)/(1 - z/3)") {
  const double l = 0.81;
  const ScatteringSolver solver(leaded_ring(l));
  for (const double a : {0.0, 0.05, 0.3})
    for (const double nu : {1.1e9, 3.3e9, 6.0e9}) {
      const cplx z = std::exp(cplx(0.0, 1.0) * cplx(wavenumber(nu), a) * l);
      CHECK(std::abs(solver.s_matrix(nu, a)(0, 0) - (z - 1.0 / 3.0) / (1.0 - z / 3.0)) < 1e-12);
    }
}

TEST_CASE("singular resolvent is nudged and reported") {
  const double l = 1.0;
  const std::vector<double> grid{kSpeedOfLight / l, 1.5 * kSpeedOfLight / l};
  // ring through two T-junctions half a loop apart: sin(2 pi x / l) vanishes at both
  // junctions, a bound state at nu = c / l that the leads never see
  GraphParts q;
  q.vertices = {make_tjunction("T1"), make_tjunction("T2")};
  q.edges = {{"a", {0, 0}, {1, 0}, 0.5, ""}, {"b", {1, 1}, {0, 1}, 0.5, ""}};
  q.leads = {{"L1", {0, 2}}, {"L2", {1, 2}}};
  const GraphSpec g(std::move(q));
  const auto sweep = sweep_two_port(g, grid, 0.0);
  for (const auto& s : sweep.values) CHECK(s.allFinite());
  CHECK(sweep.diagnostics.size() == 1);
}

TEST_CASE("gamma S matrix: flux conservation, reciprocity, sub-unitarity") {
  const auto& g = fixtures::gamma();
  const auto grid = frequency_grid({2e9, 8e9}, 10e6);
  CHECK(grid.size() == 601);
  const auto lossless = sweep_two_port(g, grid, 0.0);
  const auto lossy = sweep_two_port(g, grid, 0.08);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Matrix2c& s = lossless.values[i];
    CHECK((s.adjoint() * s - Matrix2c::Identity()).norm() < 1e-10);
    CHECK(std::abs(s(0, 1) - s(1, 0)) < 1e-10);
    const Matrix2c& t = lossy.values[i];
    CHECK(Eigen::JacobiSVD<Matrix2c>(t).singularValues()(0) <= 1.0);
    CHECK(std::abs(t(0, 1) - t(1, 0)) < 1e-10);
  }
  CHECK_THROWS_AS(two_port_s(fixtures::stub(1.0), 1e9, 0.0), ContractError);
  CHECK_THROWS_AS(two_port_s(g, 1e9, -1.0), ParameterError);
}

TEST_CASE("frequency grid") {
  const auto grid = frequency_grid({1.0, 2.0}, 0.25);
  REQUIRE(grid.size() == 5);
  CHECK(grid.back() == 2.0);
  CHECK_THROWS_AS(frequency_grid({1.0, 2.0}, 0.0), ParameterError);
}

TEST_CASE("enhancement factor on synthetic ensembles") {
  // values +-x per realization: variance x^2, zero mean
  auto make = [](double x11, double x22, double x12) {
    std::vector<TwoPortS> ens;
    for (int r = 0; r < 4; ++r) {
      const double sign = r % 2 ? 1.0 : -1.0;
      Matrix2c m;
      m << sign * x11, sign * x12, sign * x12, sign * x22;
      ens.push_back(synthetic({m, m}, r));
    }
    return ens;
  };
  const Band band{1e9, 1.001e9};
  auto w = enhancement_factor(make(0.3, 0.3, 0.3), band, 1e6);
  REQUIRE(w.size() == 1);
  REQUIRE(w[0].w_s.has_value());
  CHECK(*w[0].w_s == doctest::Approx(1.0));
  w = enhancement_factor(make(0.4, 0.2, 0.2), band, 1e6);
  CHECK(*w[0].w_s == doctest::Approx(2.0));
  w = enhancement_factor(make(0.4, 0.2, 0.0), band, 1e6);
  CHECK_FALSE(w[0].w_s.has_value());
  CHECK_THROWS_AS(enhancement_factor({synthetic({Matrix2c::Zero()})}, band, 1e6), ParameterError);
  CHECK_THROWS_AS(enhancement_factor(make(0.3, 0.3, 0.3), band, 2e6), ParameterError);
}

TEST_CASE("direct-process removal") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  SUBCASE("zero-mean ensemble is unchanged") {
    std::vector<TwoPortS> ens;
    for (int r = 0; r < 12; ++r) {
      const double sign = r % 2 ? 1.0 : -1.0;
      Matrix2c m;
      m << sign * cplx(0.2, 0.1), 0.3, 0.3, sign * cplx(-0.1, 0.4);
      ens.push_back(synthetic({m}, r));
    }
    const auto out = remove_direct(ens);
    for (std::size_t r = 0; r < ens.size(); ++r) CHECK((out[r].values[0] - ens[r].values[0]).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("constant ensemble maps to zero") {
    Matrix2c m;
    m << cplx(0.4, -0.2), 0.1, 0.1, 0.5;
    const auto out = remove_direct(std::vector<TwoPortS>(10, synthetic({m})));
    for (const auto& t : out) {
      CHECK(std::abs(t.values[0](0, 0)) < 1e-15);
      CHECK(std::abs(t.values[0](1, 1)) < 1e-15);
      CHECK(t.values[0](0, 1) == m(0, 1));
    }
  }
  SUBCASE("random ensemble has zero mean afterwards") {
    std::vector<TwoPortS> ens;
    for (int r = 0; r < 30; ++r) {
      Matrix2c m;
      m << cplx(0.3 + u(rng), u(rng)), 0.0, 0.0, cplx(-0.2 + u(rng), 0.2 + u(rng));
      ens.push_back(synthetic({m, m * 0.5}, r));
    }
    const auto out = remove_direct(ens);
    for (std::size_t f = 0; f < 2; ++f)
      for (int p = 0; p < 2; ++p) {
        cplx mean(0.0);
        for (const auto& t : out) mean += t.values[f](p, p);
        CHECK(std::abs(mean) / 30.0 < 1e-10);
      }
    // the transform is a disc automorphism: |S'| < 1 whenever |S| < 1
    for (const auto& t : out) CHECK(std::abs(t.values[0](0, 0)) < 1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(remove_direct(std::vector<TwoPortS>(5, synthetic({Matrix2c::Zero()}))), ParameterError);
    CHECK_THROWS_AS(remove_direct(std::vector<TwoPortS>(10, synthetic({Matrix2c::Identity()}))), DataError);
  }
}

TEST_CASE("scattering statistics on a lossy gamma ensemble") {
  const auto& g = fixtures::gamma();
  const auto grid = frequency_grid({4e9, 4.4e9}, 4e6);
  std::vector<TwoPortS> ens;
  const auto ps = g.phase_shifter_edges();
  for (int r = 0; r < 12; ++r) {
    auto lengths = g.edge_lengths();
    lengths[ps[0]] += 0.02 * r;
    lengths[ps[1]] -= 0.02 * r;
    ens.push_back(sweep_two_port(g.with_edge_lengths(lengths), grid, 0.08, r));
  }
  const auto reduced = remove_direct(ens);
  const auto st = scattering_stats(reduced, {4e9, 4.4e9});
  for (const auto& port : st.port) {
    CHECK(port.r_samples.size() == 12 * grid.size());
    for (const double r : port.r_samples) CHECK((r >= 0.0 && r <= 1.0));
    for (const double v : port.v_samples) CHECK(v > 0.0);
    CHECK(port.gamma > 0.0);
  }
  CHECK(st.gamma_fit == doctest::Approx(0.5 * (st.port[0].gamma + st.port[1].gamma)));
}
