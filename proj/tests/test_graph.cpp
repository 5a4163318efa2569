#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "covsim/graph.hpp"

using namespace covsim;
using Catch::Approx;

namespace {

// Independent spectral oracle for the tests.
std::vector<double> eigen_oracle(const std::vector<double>& lap, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = lap[static_cast<std::size_t>(i) * n + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = solver.eigenvalues()[i];
  return eig;
}

}  // namespace

TEST_CASE("graph construction") {
  SECTION("complete graph has n-1 neighbors each") {
    const CommGraph g = complete_graph(6);
    for (int i = 0; i < 6; ++i) CHECK(g.degree(i) == 5);
    CHECK_FALSE(g.has_edge(2, 2));
  }
  SECTION("disk policy forms a path for collinear robots") {
    const std::vector<Point2> positions{{0, 0}, {1, 0}, {2, 0}};
    const CommGraph g = build_graph(positions, {GraphPolicy::Kind::Disk, 1.0});
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(0, 2));
  }
  SECTION("a disconnected disk graph rejects the scenario") {
    const std::vector<Point2> positions{{0, 0}, {1, 0}, {2, 0}};
    CHECK_THROWS_AS(build_graph(positions, {GraphPolicy::Kind::Disk, 0.5}), ScenarioError);
  }
}

TEST_CASE("laplacian textbook cases") {
  SECTION("K2") {
    CommGraph g(2);
    g.add_edge(0, 1);
    const auto lap = laplacian(g);
    const std::vector<double> expected{1, -1, -1, 1};
    CHECK(lap == expected);
  }
  SECTION("path P3") {
    CommGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    const auto lap = laplacian(g);
    const std::vector<double> expected{1, -1, 0, -1, 2, -1, 0, -1, 1};
    CHECK(lap == expected);
  }
  SECTION("K6 diagonal and row sums") {
    const CommGraph g = complete_graph(6);
    const auto lap = laplacian(g);
    for (int i = 0; i < 6; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < 6; ++j) {
        const double v = lap[static_cast<std::size_t>(i) * 6 + j];
        row_sum += v;
        if (i == j) {
          CHECK(v == 5.0);
        } else {
          CHECK(v == -1.0);
        }
      }
      CHECK(row_sum == 0.0);
    }
  }
}

TEST_CASE("algebraic connectivity") {
  SECTION("two components give zero") {
    CommGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    CHECK(algebraic_connectivity(g) == Approx(0.0).margin(1e-9));
  }
  SECTION("path P3 has spectrum {0, 1, 3}") {
    CommGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    const auto eig = jacobi_eigenvalues(laplacian(g), 3);
    CHECK(eig[0] == Approx(0.0).margin(1e-9));
    CHECK(eig[1] == Approx(1.0).margin(1e-9));
    CHECK(eig[2] == Approx(3.0).margin(1e-9));
  }
  SECTION("complete K6 has lambda2 = 6") {
    CHECK(algebraic_connectivity(complete_graph(6)) == Approx(6.0).margin(1e-9));
  }
}

TEST_CASE("laplacian spectrum properties on random graphs") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> un(3, 12);
    const int n = un(rng);
    CommGraph g(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // random spanning chain keeps most samples connected
    for (int i = 1; i < n; ++i) g.add_edge(i - 1, i);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (u(rng) < 0.3) g.add_edge(i, j);
      }
    }

    const auto eig = jacobi_eigenvalues(laplacian(g), n);
    const auto oracle = eigen_oracle(laplacian(g), n);
    for (int i = 0; i < n; ++i) {
      CHECK(eig[i] == Approx(oracle[i]).margin(1e-8));
      CHECK(eig[i] >= -1e-9);  // positive semidefinite
    }

    // Adding any edge never decreases lambda2.
    const double before = algebraic_connectivity(g);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (g.has_edge(i, j)) continue;
        CommGraph h = g;
        h.add_edge(i, j);
        CHECK(algebraic_connectivity(h) >= before - 1e-9);
      }
    }

    // lambda2 > 0 iff BFS finds one component.
    CHECK((algebraic_connectivity(g) > 1e-9) == g.connected());
  }
}
