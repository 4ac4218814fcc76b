#include <cmath>

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

std::vector<Method> all_methods() {
  return {Method::indirect(),
          Method::of(Variant::compact),
          Method::of(Variant::direct_plain),
          Method::of(Variant::direct_orthogonal),
          Method::regularized(0.1),
          Method::regularized(0.1, 0.0, NormKind::spectral),
          Method::of(Variant::direct_ideal)};
}

}  // namespace

TEST_CASE("noise-free data: every formulation returns the Riccati gain") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.0, 1);
  const LqrSolution opt = model_lqr(kPlant, kWeights);
  for (const Method& m : all_methods()) {
    CAPTURE(to_string(m.variant));
    const LqrSolution s = synthesize(ds, kWeights, m);
    REQUIRE(s.status == LqrStatus::optimal);
    CHECK(relative_gain_gap(s.K, opt.K) <= 1e-4);
    CHECK(h2_norm_sq(kPlant, kWeights, s.K) == doctest::Approx(opt.objective).epsilon(1e-6));
  }
}

TEST_CASE("indirect, compact and orthogonal agree on noisy data") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.1, 4);
  const LqrSolution ce = synthesize(ds, kWeights, Method::indirect());
  const LqrSolution cp = synthesize(ds, kWeights, Method::of(Variant::compact));
  const LqrSolution orth = synthesize(ds, kWeights, Method::of(Variant::direct_orthogonal));
  CHECK(relative_gain_gap(cp.K, ce.K) <= 1e-4);
  CHECK(relative_gain_gap(orth.K, ce.K) <= 1e-4);
  REQUIRE(cp.route_discrepancy);
  CHECK(*cp.route_discrepancy <= 1e-4);
  // identified closed-loop cost equals the SDP objective
  const LtiSystem id = least_squares_id(ds);
  CHECK(orth.objective == doctest::Approx(h2_norm_sq(id, kWeights, orth.K)).epsilon(1e-6));
}

TEST_CASE("orthogonal solution carries the least-norm G") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.1, 6);
  const LqrSolution s = synthesize(ds, kWeights, Method::of(Variant::direct_orthogonal));
  const DerivedData d = derive(ds);
  Matrix kI(6, 3);
  kI << s.K, Matrix::Identity(3, 3);
  CHECK(max_abs(s.G - d.W0_pinv * kI) < 1e-6);
  CHECK(max_abs(d.Pi * s.G) < 1e-6);
  CHECK(max_abs(d.W0 * s.G - kI) < 1e-6);
  // X1 G = A_hat + B_hat K for the identified pair
  const LtiSystem id = least_squares_id(ds);
  CHECK(max_abs(ds.X1 * s.G - (id.A() + id.B() * s.K)) < 1e-6);
  CHECK(max_abs(s.P - ds.X0 * s.Y) < 1e-9);
}

TEST_CASE("ideal formulation recovers the true optimum from noisy data") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.3, 8);
  const LqrSolution opt = model_lqr(kPlant, kWeights);
  const LqrSolution s = synthesize(ds, kWeights, Method::of(Variant::direct_ideal));
  CHECK(relative_gain_gap(s.K, opt.K) <= 1e-4);
}

TEST_CASE("large lambda makes the penalty exact") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.1, 10);
  const LqrSolution orth = synthesize(ds, kWeights, Method::of(Variant::direct_orthogonal));
  for (NormKind nk : {NormKind::frobenius, NormKind::spectral}) {
    const LqrSolution s = synthesize(ds, kWeights, Method::regularized(1.0, 0.0, nk));
    CHECK(relative_gain_gap(s.K, orth.K) <= 1e-4);
    CHECK(s.objective == doctest::Approx(orth.objective).epsilon(1e-6));
  }
  const double star = detect_lambda_star(ds, kWeights);
  CHECK(std::isfinite(star));
  CHECK(star <= 1.0);
}

TEST_CASE("regularized objective never exceeds the orthogonal one") {
  const Dataset ds = generate_dataset(kPlant, 20, 0.3, 12);
  const LqrSolution orth = synthesize(ds, kWeights, Method::of(Variant::direct_orthogonal));
  for (double lam : {1e-4, 1e-3, 1e-2}) {
    const LqrSolution s = synthesize(ds, kWeights, Method::regularized(lam));
    CHECK(s.objective <= orth.objective + 1e-6);
  }
}

TEST_CASE("zero_gain certifies a stable plant open loop") {
  Matrix a(2, 2), b(2, 1);
  a << 0.5, 0.1, 0.0, 0.4;
  b << 0.0, 1.0;
  const LtiSystem stable(a, b);
  const Dataset ds = generate_dataset(stable, 10, 0.0, 2);
  Method m = Method::of(Variant::direct_orthogonal);
  m.zero_gain = true;
  const LqrSolution s = synthesize(ds, LqrWeights::cheap_control(2, 1), m);
  CHECK(s.K.norm() < 1e-6);
}

TEST_CASE("synthesis error paths") {
  const Dataset short_ds = generate_dataset(kPlant, 5, 0.1, 1);
  CHECK_THROWS_AS(synthesize(short_ds, kWeights, Method::indirect()), NotIdentifiable);
  CHECK_THROWS_AS(synthesize(short_ds, kWeights, Method::of(Variant::direct_orthogonal)), NotIdentifiable);

  Dataset no_oracle = generate_dataset(kPlant, 20, 0.1, 1);
  no_oracle.D0.reset();
  CHECK_THROWS_AS(synthesize(no_oracle, kWeights, Method::of(Variant::direct_ideal)), OracleRequired);

  const Dataset ds = generate_dataset(kPlant, 20, 0.1, 1);
  CHECK_THROWS_AS(synthesize(ds, LqrWeights::cheap_control(2, 2), Method::indirect()), InvalidInput);
  CHECK_THROWS_AS(synthesize(ds, kWeights, Method::regularized(-1.0)), InvalidInput);
  Method bad = Method::indirect();
  bad.lambda = 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  CHECK_THROWS_AS(detect_lambda_star(ds, kWeights, {0.1, 0.01}), InvalidInput);
}

TEST_CASE("an unreachable state leaves the data unidentifiable") {
  // second state is unstable and unreachable
  Matrix a(2, 2), b(2, 1);
  a << 0.5, 0.0, 0.0, 1.2;
  b << 1.0, 0.0;
  const Dataset ds = generate_dataset(LtiSystem(a, b), 10, 0.0, 3);
  CHECK_THROWS_AS(synthesize(ds, LqrWeights::cheap_control(2, 1), Method::indirect()), NotIdentifiable);
}

TEST_CASE("names round trip") {
  for (Variant v : {Variant::indirect_ce, Variant::compact, Variant::direct_plain, Variant::direct_orthogonal,
                    Variant::direct_regularized, Variant::direct_ideal}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(parse_norm_kind("spectral") == NormKind::spectral);
  CHECK_THROWS_AS(parse_variant("bogus"), InvalidInput);
}

TEST_CASE("lambda grid and gain gap") {
  const std::vector<double> g = default_lambda_grid();
  REQUIRE(g.size() == 40);
  CHECK(g.front() == doctest::Approx(1e-5));
  CHECK(g.back() == doctest::Approx(1.0));
  Matrix k = Matrix::Identity(2, 2);
  CHECK(relative_gain_gap(k * 1.1, k) == doctest::Approx(0.1 * std::sqrt(2.0) / std::sqrt(2.0)));
  CHECK(relative_gain_gap(Matrix::Constant(1, 1, 0.2), Matrix::Zero(1, 1)) == doctest::Approx(0.2));
}
