#include <doctest.h>

#include <cmath>

#include "unigraph/doublets.hpp"
#include "unigraph/errors.hpp"

using namespace unigraph;

namespace {

SpectrumResult spectrum_of(std::vector<double> nu) {
  SpectrumResult s;
  for (const double v : nu) s.resonances.push_back({v, 0.0});
  if (!nu.empty()) s.band = {nu.front(), nu.back()};
  return s;
}

}  // namespace

TEST_CASE("pairing a constructed spectrum") {
  SolverConfig cfg;
  const auto d = pair_doublets(spectrum_of({1.000e9, 1.001e9, 2.000e9, 2.003e9}), cfg);
  REQUIRE(d.doublets.size() == 2);
  CHECK(d.doublets[0].splitting_hz == doctest::Approx(1e6));
  CHECK(d.doublets[1].splitting_hz == doctest::Approx(3e6));
  CHECK(d.unpaired.empty());
  CHECK(d.mean_splitting_hz == doctest::Approx(2e6));
  double mean = 0.0;
  for (const double x : d.normalized_splittings()) mean += x;
  CHECK(std::abs(mean / 2.0 - 1.0) < 1e-12);
}

TEST_CASE("triples pair the smallest gap and flag the rest") {
  SolverConfig cfg;
  const auto d = pair_doublets(spectrum_of({1.000e9, 1.004e9, 1.005e9, 3e9}), cfg);
  REQUIRE(d.doublets.size() == 1);
  CHECK(d.doublets[0].nu_low_hz == 1.004e9);
  CHECK(d.unpaired.size() == 2);
  REQUIRE(d.flagged.size() == 1);
  CHECK(d.flagged[0] == 1.000e9);
}

TEST_CASE("pairing edge cases") {
  SolverConfig cfg;
  CHECK(pair_doublets(spectrum_of({}), cfg).doublets.empty());
  CHECK(pair_doublets(spectrum_of({1e9}), cfg).unpaired.size() == 1);
  CHECK_THROWS_AS(pair_doublets(spectrum_of({2e9, 1e9}), cfg), ContractError);
  // every resonance lands in at most one doublet
  const auto d = pair_doublets(spectrum_of({1e9, 1.002e9, 1.004e9, 1.006e9, 1.008e9}), cfg);
  CHECK(2 * d.doublets.size() + d.unpaired.size() == 5);
}

TEST_CASE("pooled doublets") {
  SolverConfig cfg;
  const auto a = pair_doublets(spectrum_of({1.000e9, 1.001e9}), cfg);
  const auto b = pair_doublets(spectrum_of({1.000e9, 1.003e9, 5e9}), cfg);
  const auto p = pool_doublets({a, b});
  CHECK(p.doublets.size() == 2);
  CHECK(p.unpaired.size() == 1);
  CHECK(p.mean_splitting_hz == doctest::Approx(2e6));
}

TEST_CASE("merging unresolved doublets") {
  const auto s = spectrum_of({1.000e9, 1.005e9, 1.020e9, 1.040e9, 1.050e9, 1.058e9});
  const auto m = merge_unresolved(s, 15e6);
  REQUIRE(m.resonances.size() == 3);
  CHECK(m.resonances[0].frequency_hz == doctest::Approx(1.0025e9));
  CHECK(m.resonances[1].frequency_hz == 1.020e9);
  CHECK(m.resonances[2].frequency_hz == doctest::Approx((1.040e9 + 1.050e9 + 1.058e9) / 3.0));
  const auto again = merge_unresolved(m, 15e6);
  REQUIRE(again.resonances.size() == m.resonances.size());
  for (std::size_t i = 0; i < m.resonances.size(); ++i)
    CHECK(again.resonances[i].frequency_hz == m.resonances[i].frequency_hz);

  const auto same = merge_unresolved(s, 0.0);
  REQUIRE(same.resonances.size() == s.resonances.size());
  for (std::size_t i = 0; i < s.resonances.size(); ++i)
    CHECK(same.resonances[i].frequency_hz == s.resonances[i].frequency_hz);

  CHECK(merge_unresolved(spectrum_of({1.00e9, 1.02e9}), 15e6).resonances.size() == 2);
}
