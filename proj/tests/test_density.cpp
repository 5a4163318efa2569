#include <catch2/catch_amalgamated.hpp>

#include "covsim/density.hpp"

using namespace covsim;
using Catch::Approx;

namespace {

DensityField appendix_field() {
  return DensityField::gaussian_mixture(
      {{{2.0, 2.0}, 0.9, 0.0, 0.9, 1.0}, {{4.0, 4.0}, 0.9, 0.0, 0.9, 1.0}}, 0.01);
}

}  // namespace

TEST_CASE("uniform density is exactly one") {
  const DensityField field = DensityField::uniform();
  CHECK(field({0.0, 0.0}) == 1.0);
  CHECK(field({123.4, -9.0}) == 1.0);
}

TEST_CASE("bi-modal field evaluates the unnormalized bumps plus floor") {
  const DensityField field = appendix_field();

  // At a mean: floor + peak of its own bump + tail of the other
  // (the other mean is at squared distance 8, scaled by Sigma = 0.9 I).
  const double expected_peak = 0.01 + 1.0 + std::exp(-0.5 * 8.0 / 0.9);
  CHECK(field({2.0, 2.0}) == Approx(expected_peak).epsilon(1e-12));
  CHECK(field({4.0, 4.0}) == Approx(expected_peak).epsilon(1e-12));

  // Symmetric midpoint: both exponent terms are equal.
  const double expected_mid = 0.01 + 2.0 * std::exp(-0.5 * 2.0 / 0.9);
  CHECK(field({3.0, 3.0}) == Approx(expected_mid).epsilon(1e-12));
}

TEST_CASE("component order does not change the value") {
  const DensityField forward = appendix_field();
  const DensityField reversed = DensityField::gaussian_mixture(
      {{{4.0, 4.0}, 0.9, 0.0, 0.9, 1.0}, {{2.0, 2.0}, 0.9, 0.0, 0.9, 1.0}}, 0.01);
  for (double x = 0.0; x <= 6.0; x += 0.37) {
    for (double y = 0.0; y <= 6.0; y += 0.41) {
      CHECK(forward({x, y}) == reversed({x, y}));  // bit-identical
    }
  }
}

TEST_CASE("density stays strictly positive") {
  const DensityField field = appendix_field();
  for (double x = -2.0; x <= 8.0; x += 0.23) {
    for (double y = -2.0; y <= 8.0; y += 0.29) {
      CHECK(field({x, y}) > 0.0);
    }
  }
}

TEST_CASE("non-SPD covariance is rejected at construction") {
  CHECK_THROWS_AS(
      DensityField::gaussian_mixture({{{0, 0}, -1.0, 0.0, 1.0, 1.0}}, 0.01),
      std::invalid_argument);
  CHECK_THROWS_AS(
      DensityField::gaussian_mixture({{{0, 0}, 1.0, 2.0, 1.0, 1.0}}, 0.01),
      std::invalid_argument);
  CHECK_THROWS_AS(DensityField::gaussian_mixture({{{0, 0}, 1.0, 0.0, 1.0, 1.0}}, 0.0),
                  std::invalid_argument);
}
