#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "covsim/controllers.hpp"

using namespace covsim;
using Catch::Approx;

TEST_CASE("EAC weight law") {
  SECTION("identical robots are a fixed point") {
    const NeighborReport self{0, 1.0, 100.0, 1.4};
    const std::vector<NeighborReport> nbs{{1, 1.0, 100.0, 1.4}, {2, 1.0, 100.0, 1.4}};
    CHECK(eac_weight_delta(self, nbs, 6.0, 0.6) == Approx(0.0).margin(1e-15));
  }
  SECTION("the high-depletion robot loses weight, the peer gains") {
    const NeighborReport fast{0, 1.0, 100.0, 5.4};
    const NeighborReport slow{1, 1.0, 100.0, 1.4};
    const double wdot_fast = eac_weight_delta(fast, std::vector{slow}, 6.0, 0.6);
    const double wdot_slow = eac_weight_delta(slow, std::vector{fast}, 6.0, 0.6);
    CHECK(wdot_fast < 0.0);
    CHECK(wdot_slow > 0.0);
  }
  SECTION("the pairwise fixed point sits at the inverse rate ratio") {
    // w1/w2 = Edot2/Edot1 = 1.4/5.4; check the bracket vanishes there.
    const double ratio = 1.4 / 5.4;
    const NeighborReport fast{0, ratio, 100.0, 5.4};
    const NeighborReport slow{1, 1.0, 100.0, 1.4};
    CHECK(eac_weight_delta(fast, std::vector{slow}, 6.0, 0.6) ==
          Approx(0.0).margin(1e-12));
    CHECK(eac_weight_delta(slow, std::vector{fast}, 6.0, 0.6) ==
          Approx(0.0).margin(1e-12));
    // The paper's converged Scenario-1 ratio 0.4/1.5 is within 3% of it.
    CHECK(0.4 / 1.5 == Approx(ratio).epsilon(0.03));
  }
  SECTION("heterogeneous capacity fixed point (Corollary 2 form)") {
    // w_i/w_j = (Einit_i * Edot_j) / (Einit_j * Edot_i)
    const double ratio = (100.0 * 1.4) / (25.0 * 4.4);
    const NeighborReport big{0, ratio, 100.0, 4.4};
    const NeighborReport small{1, 1.0, 25.0, 1.4};
    CHECK(eac_weight_delta(big, std::vector{small}, 6.0, 0.6) ==
          Approx(0.0).margin(1e-12));
  }
  SECTION("invalid neighbor state is rejected") {
    const NeighborReport self{0, 1.0, 100.0, 1.4};
    const std::vector<NeighborReport> bad{{1, -0.2, 100.0, 1.4}};
    CHECK_THROWS_AS(eac_weight_delta(self, bad, 6.0, 0.6), std::logic_error);
    CHECK_THROWS_AS(eac_weight_delta(self, std::vector<NeighborReport>{}, 0.0, 0.6),
                    std::invalid_argument);
  }
}

TEST_CASE("ATC weight law") {
  SECTION("identical robots are a fixed point") {
    const NeighborReport self{0, 1.0, 100.0, 1.4};
    const std::vector<NeighborReport> nbs{{1, 1.0, 100.0, 1.4}};
    CHECK(atc_weight_delta(self, nbs, 6.0, 0.6, 1.0, 1.0) == Approx(0.0).margin(1e-15));
  }
  SECTION("equilibrium offsets follow the trust difference") {
    // w_i - e_i = w_j - e_j with e = (k_e/Edot)^2.
    const double k_e = 1.0;
    const double e_fast = std::pow(k_e / 5.4, 2);
    const double e_slow = std::pow(k_e / 1.4, 2);
    const NeighborReport fast{0, 1.0 + e_fast, 100.0, 5.4};
    const NeighborReport slow{1, 1.0 + e_slow, 100.0, 1.4};
    CHECK(atc_weight_delta(fast, std::vector{slow}, 6.0, 0.6, k_e, 1.0) ==
          Approx(0.0).margin(1e-12));
    // Table-style equilibrium: offsets (1.1 - 0.6) = 0.5 reflect e-differences.
    CHECK(e_slow - e_fast == Approx(0.5).epsilon(0.05));
  }
  SECTION("the high-depletion robot is pushed down") {
    const NeighborReport fast{0, 1.0, 100.0, 5.4};
    const NeighborReport slow{1, 1.0, 100.0, 1.4};
    CHECK(atc_weight_delta(fast, std::vector{slow}, 6.0, 0.6, 1.0, 1.0) < 0.0);
    CHECK(atc_weight_delta(slow, std::vector{fast}, 6.0, 0.6, 1.0, 1.0) > 0.0);
  }
}

TEST_CASE("PBC weight is the battery fraction minus one") {
  CHECK(pbc_weight(100.0, 100.0) == Approx(0.0));
  CHECK(pbc_weight(10.0, 100.0) == Approx(-0.9));
  CHECK(pbc_weight(0.0, 100.0) == Approx(-1.0));
}

TEST_CASE("PBC velocity") {
  SECTION("zero at the centroid") {
    const Point2 v = pbc_velocity({1, 1}, {1, 1}, 80.0, 100.0, 0.4);
    CHECK(norm(v) == 0.0);
  }
  SECTION("saturated branch moves at the full-energy gain") {
    const Point2 v = pbc_velocity({0, 0}, {5, 0}, 100.0, 100.0, 0.4);
    CHECK(norm(v) == Approx(0.4));
    CHECK(v.x > 0.0);
  }
  SECTION("speed vanishes with the battery") {
    const Point2 v = pbc_velocity({0, 0}, {5, 0}, 1e-6, 100.0, 0.4);
    CHECK(norm(v) < 1e-8);
  }
  SECTION("proportional branch inside unit distance") {
    const Point2 v = pbc_velocity({0, 0}, {0.5, 0}, 50.0, 100.0, 0.4);
    CHECK(norm(v) == Approx(0.4 * 0.5 * 0.5));
  }
}

TEST_CASE("position_step") {
  const ConvexPolygon domain = ConvexPolygon::rectangle(0, 0, 6, 6);
  Gains gains;
  gains.k_p = 1.0;
  gains.v_max = 0.4;
  gains.dt = 1.0;

  SECTION("equilibrium at the centroid") {
    const Point2 p = position_step({2, 2}, {2, 2}, gains, domain);
    CHECK(distance(p, {2, 2}) == 0.0);
  }
  SECTION("far targets clamp to v_max") {
    const Point2 p = position_step({0, 0}, {3, 0}, gains, domain);
    CHECK(p.x == Approx(0.4));
    CHECK(p.y == Approx(0.0).margin(1e-15));
  }
  SECTION("near targets are reached in one step") {
    const Point2 p = position_step({0, 0}, {0.1, 0}, gains, domain);
    CHECK(p.x == Approx(0.1));
  }
  SECTION("result stays inside the domain") {
    Gains fast = gains;
    fast.k_p = 10.0;
    fast.v_max = 100.0;
    const Point2 p = position_step({5.9, 3.0}, {6.5, 3.0}, fast, domain);
    CHECK(domain.contains(p));
    CHECK(p.x == Approx(6.0));
  }
  SECTION("contraction when k_p * dt < 1 and no speed cap") {
    Gains free = gains;
    free.k_p = 0.7;
    free.v_max = 1e9;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 200; ++i) {
      const Point2 p{u(rng), u(rng)};
      const Point2 c{u(rng), u(rng)};
      if (distance(p, c) < 1e-12) continue;
      const Point2 next = position_step(p, c, free, domain);
      CHECK(distance(next, c) < distance(p, c));
    }
  }
}

TEST_CASE("WMTC weight is constant") {
  CHECK(wmtc_weight() == 1.0);
  for (int i = 0; i < 100; ++i) CHECK(wmtc_weight() == 1.0);
}
