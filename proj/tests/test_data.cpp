#include <filesystem>

#include "ddlqr/data.hpp"
#include "ddlqr/dataset_io.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/system.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ddlqr;
using testing::max_abs;

TEST_CASE("generated data obey the dynamics") {
  const LtiSystem sys = LtiSystem::laplacian3();
  const Dataset ds = generate_dataset(sys, 20, 0.1, 42);
  REQUIRE(ds.D0);
  CHECK(ds.n() == 3);
  CHECK(ds.m() == 3);
  CHECK(ds.T() == 20);
  CHECK(max_abs(ds.X1 - sys.A() * ds.X0 - sys.B() * ds.U0 - *ds.D0) < 1e-12);
  CHECK(ds.X0.col(0).norm() == 0.0);  // starts at rest
  CHECK(max_abs(ds.X0.rightCols(19) - ds.X1.leftCols(19)) == 0.0);
}

TEST_CASE("generation is a pure function of the seed") {
  const LtiSystem sys = LtiSystem::laplacian3();
  const Dataset a = generate_dataset(sys, 20, 0.3, 7);
  const Dataset b = generate_dataset(sys, 20, 0.3, 7);
  const Dataset c = generate_dataset(sys, 20, 0.3, 8);
  CHECK(a.U0 == b.U0);
  CHECK(*a.D0 == *b.D0);
  CHECK(a.U0 != c.U0);
  // the input stream does not depend on sigma
  CHECK(generate_dataset(sys, 20, 1.0, 7).U0 == a.U0);
}

TEST_CASE("derived data: ordering, projector, SNR") {
  const Dataset ds = generate_dataset(LtiSystem::laplacian3(), 20, 0.1, 3);
  const DerivedData d = derive(ds);
  CHECK(d.W0.topRows(3) == ds.U0);
  CHECK(d.W0.bottomRows(3) == ds.X0);
  CHECK(d.rank == 6);
  CHECK(d.identifiable);
  CHECK(max_abs(d.Pi * d.Pi - d.Pi) < 1e-10);
  CHECK(max_abs(d.Pi - d.Pi.transpose()) < 1e-12);
  CHECK(max_abs(d.W0 * d.Pi) < 1e-10);
  CHECK(d.Pi.trace() == doctest::Approx(14.0).epsilon(1e-10));
  const linalg::SvdResult sw = linalg::svd(d.W0), sd = linalg::svd(*ds.D0);
  REQUIRE(d.snr);
  CHECK(*d.snr == doctest::Approx(sw.min() / sd.max()).epsilon(1e-12));
  CHECK(snr_decibels(100.0) == doctest::Approx(20.0));
}

TEST_CASE("least squares recovers a noise-free plant exactly") {
  const LtiSystem sys = LtiSystem::laplacian3();
  const Dataset ds = generate_dataset(sys, 20, 0.0, 5);
  const LtiSystem id = least_squares_id(ds);
  CHECK(max_abs(id.A() - sys.A()) < 1e-10);
  CHECK(max_abs(id.B() - sys.B()) < 1e-10);
}

TEST_CASE("identification error is bounded by the inverse SNR") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const LtiSystem sys(testing::random_with_radius(2, 0.9, rng), testing::random_matrix(2, 1, rng));
    const Dataset ds = generate_dataset(sys, 15, 0.2, 100 + rep);
    const LtiSystem id = least_squares_id(ds);
    Matrix err(2, 3);
    err << id.B() - sys.B(), id.A() - sys.A();
    CHECK(linalg::norm2(err) <= 1.0 / *derive(ds).snr + 1e-10);
  }
}

TEST_CASE("short experiments are not identifiable") {
  const Dataset ds = generate_dataset(LtiSystem::laplacian3(), 5, 0.1, 1);
  CHECK_FALSE(derive(ds).identifiable);
  CHECK(*derive(ds).snr == 0.0);
  CHECK_THROWS_AS(least_squares_id(ds), NotIdentifiable);
}

TEST_CASE("dataset validation") {
  Dataset ds = generate_dataset(LtiSystem::laplacian3(), 10, 0.1, 1);
  ds.X1 = ds.X1.leftCols(9);
  CHECK_THROWS_AS(ds.validate(), InvalidInput);
}

TEST_CASE("dataset csv round trip is bit exact") {
  const Dataset ds = generate_dataset(LtiSystem::laplacian3(), 12, 0.37, 99);
  const Dataset back = io::dataset_from_csv(io::dataset_to_csv(ds));
  CHECK(back.U0 == ds.U0);
  CHECK(back.X0 == ds.X0);
  CHECK(back.X1 == ds.X1);
  REQUIRE(back.D0);
  CHECK(*back.D0 == *ds.D0);

  const auto dir = std::filesystem::temp_directory_path() / "ddlqr_test_io";
  std::filesystem::create_directories(dir);
  io::write_dataset(ds, dir / "d.csv");
  CHECK(std::filesystem::exists(io::sidecar_path(dir / "d.csv")));
  const Dataset file = io::read_dataset(dir / "d.csv");
  CHECK(file.X1 == ds.X1);
  REQUIRE(file.origin);
  CHECK(*file.origin == *ds.origin);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed csv is rejected") {
  CHECK_THROWS_AS(io::dataset_from_csv("u0\n1,2\nx0\n1\nx1\n1,2\n"), InvalidInput);
  CHECK_THROWS_AS(io::dataset_from_csv("garbage"), InvalidInput);
  CHECK_THROWS_AS(io::read_dataset("/nonexistent/file.csv"), InvalidInput);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
}

TEST_CASE("system and weight validation") {
  CHECK_THROWS_AS(LtiSystem(Matrix::Identity(2, 2), Matrix::Identity(3, 1)), InvalidInput);
  Matrix q(2, 2);
  q << 1, 2, 0, 1;
  CHECK_THROWS_AS(LqrWeights(q, Matrix::Identity(1, 1)), InvalidInput);
  CHECK_THROWS_AS(LqrWeights(Matrix::Identity(2, 2), -Matrix::Identity(1, 1)), InvalidInput);
}

TEST_CASE("H2 cost matches the Gramian trace") {
  const LtiSystem sys = LtiSystem::laplacian3();
  const LqrWeights w = LqrWeights::cheap_control(3, 3);
  const Matrix k = -0.5 * Matrix::Identity(3, 3);
  const Matrix f = sys.A() + k;
  const Matrix p = testing::truncated_gramian(f, Matrix::Identity(3, 3), 2000);
  CHECK(h2_norm_sq(sys, w, k) == doctest::Approx((p + k.transpose() * w.R() * k * p).trace()).epsilon(1e-10));
  CHECK_THROWS_AS(h2_norm_sq(sys, w, Matrix::Zero(3, 3)), NotSchur);
}
