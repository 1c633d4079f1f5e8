#include "doctest.h"
#include "support.hpp"

#include "ringbec/errors.hpp"
#include "ringbec/harness.hpp"

using namespace ringbec;

TEST_CASE("slope of an exact line") {
  CHECK(fit_slope({1.0, 2.0, 4.0}, {3.0, 5.0, 9.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit_slope({0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.0, -0.5}) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_THROWS(fit_slope({1.0}, {2.0}));
}

TEST_CASE("space convergence residuals shrink with h") {
  RunConfig c;
  c.harness.space_h = {0.2, 0.1, 0.05};
  c.harness.space_beta = {1};
  const SpaceConvergenceResult r = run_space_convergence(c);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[2].residual < r.rows[0].residual);
  CHECK(r.rows[0].n_triangles < r.rows[2].n_triangles);
  REQUIRE(r.slopes.count(1) == 1);
  CHECK(r.slopes.at(1) > 0.5);
  c.harness.space_h = {0.1, 0.1, 0.05};
  CHECK_THROWS_AS(run_space_convergence(c), ConfigError);
}

TEST_CASE("time convergence on a coarse mesh is second order") {
  RunConfig c;
  c.mesh.h = 0.1;
  c.harness.time_k = {6, 7};
  const auto rows = run_time_convergence(c);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.steps == (1 << row.k));
    CHECK(row.tau == doctest::Approx(0.1 / row.steps));
    CHECK(row.diff_fine < row.diff_coarse);
    CHECK(row.m_phi == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("initial state selection") {
  RunConfig c;
  c.mesh.h = 0.1;
  const RingMesh mesh = make_mesh(c);
  const LaplacianOperator op = assemble_laplacian(mesh, c.physics.bc);
  const Field gs = make_ground_state(c, mesh, op).state;
  CHECK((make_initial_state(c, mesh, gs) - gs).cwiseAbs().maxCoeff() == 0.0);
  c.split.initial = InitialState::Unstable;
  CHECK((make_initial_state(c, mesh, gs) - make_unstable_state(mesh, gs)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("detect_all reports the three methods in order") {
  const RingMesh& mesh = testing::desk_mesh();
  const Field u = testing::planted_field(mesh, {{Vec2(0.0, 1.0), 1}, {Vec2(0.0, -1.0), -1}});
  const auto recs = detect_all(mesh, u, DetectionParams{});
  REQUIRE(recs.size() == 6);
  CHECK(recs[0].method == DetectionMethod::Density);
  CHECK(recs[2].method == DetectionMethod::RegularizedVorticity);
  CHECK(recs[4].method == DetectionMethod::PseudoVorticity);
}
