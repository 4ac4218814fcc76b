#include "ddlqr/certificates.hpp"
#include "ddlqr/data.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/synthesis.hpp"
#include "ddlqr/system.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ddlqr;
using testing::max_abs;

namespace {
const LtiSystem kPlant = LtiSystem::laplacian3();
const LqrWeights kWeights = LqrWeights::cheap_control(3, 3);
}  // namespace

TEST_CASE("certificate matrices match their definitions") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.1, 21);
  const LqrSolution s = synthesize(ds, kWeights, Method::indirect());
  const Certificates c = certificates(s, ds);
  const Matrix m = s.G * s.P * s.G.transpose();
  const Matrix& d = *ds.D0;
  CHECK(max_abs(c.M - m) < 1e-9 * (1.0 + max_abs(m)));
  CHECK(max_abs(c.Theta - (ds.X1 * m * ds.X1.transpose() - s.P)) < 1e-8);
  CHECK(max_abs(c.Psi - (d * m * d.transpose() - ds.X1 * m * d.transpose() - d * m * ds.X1.transpose())) < 1e-8);
  CHECK(c.m_norm == doctest::Approx(linalg::norm2(m)));
  // a synthesized (P, G) satisfies the Lyapunov inequality for the data
  CHECK(c.theta_slack <= kThetaTolerance);
}

TEST_CASE("the noise condition certifies the true closed loop") {
  int certified = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset ds = generate_dataset(kPlant, 20, 0.05, seed);
    const LqrSolution s = synthesize(ds, kWeights, Method::indirect());
    const Certificates c = certificates(s, ds);
    const bool stable = linalg::is_schur(closed_loop(kPlant, s.K));
    for (double eta : eta_scan()) {
      if (c.lemma1_holds(eta)) {
        ++certified;
        CHECK(stable);
      }
      // the norm-bound test is the more conservative one
      if (c.delta_test(linalg::norm2(*ds.D0), eta)) CHECK(c.lemma1_holds(eta));
    }
  }
  CHECK(certified > 0);
}

TEST_CASE("feasibility condition at the optimal gain") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.01, 3);
  const LqrSolution s = synthesize(ds, kWeights, Method::indirect());
  const Certificates c = certificates(s, ds, &kPlant, &kWeights);
  REQUIRE(c.feasibility);
  CHECK(c.feasibility->margin > 0.0);
  REQUIRE(c.feasibility->eta2);
  CHECK(c.feasibility->holds(*c.feasibility->eta2));
}

TEST_CASE("stability test from a noise bound") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.01, 5);
  const LqrSolution s = synthesize(ds, kWeights, Method::indirect());
  const double d = linalg::norm2(*ds.D0);
  CHECK(stability_test(s, ds, d, 2.0));
  CHECK_FALSE(stability_test(s, ds, 1e3, 2.0));
  CHECK_THROWS_AS(stability_test(s, ds, 0.5 * d, 2.0), InvalidInput);
  CHECK_THROWS_AS(stability_test(s, ds, d, 0.5), InvalidInput);
  CHECK_THROWS_AS(stability_test(s, ds, -1.0, 2.0), InvalidInput);

  Dataset blind = ds;
  blind.D0.reset();
  CHECK(stability_test(s, blind, d, 2.0));
  CHECK_THROWS_AS(certificates(s, blind), OracleRequired);
}
