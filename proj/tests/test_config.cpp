#include <string>

#include "ddlqr/config.hpp"
#include "doctest.h"

using namespace ddlqr;
using ddlqr::config::ConfigError;

namespace {
// Line number reported for a config that must be rejected.
int error_line(const std::string& text) {
  try {
    (void)config::parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("empty config gives the laplacian3 defaults") {
  const config::RunConfig c = config::parse("# nothing\n\n");
  CHECK(c.A == LtiSystem::laplacian3().A());
  CHECK(c.Q == Matrix::Identity(3, 3));
  CHECK(c.R == 1e-3 * Matrix::Identity(3, 3));
  CHECK(c.T == 20);
  CHECK(c.trials == 100);
  CHECK(c.method.variant == Variant::indirect_ce);
  CHECK(c.named_methods().size() == 3);
}

TEST_CASE("full config") {
  const config::RunConfig c = config::parse(R"(
A = [[0.5, 1],
     [0, 0.9]]   # continued line
B = [[0], [1]]
Q = 2
R = [[0.1]]
T = 12
sigma = 0.25
sigmas = [0.1, 1]
method = direct_regularized
lambda = 0.05
rho = 0.5
norm = spectral
lambdas = [0.001, 0.01]
methods = [ce, mixed]
mixed_lambda = 0.2
trials = 7
seed = 123
jobs = 2
out = "results"
delta = 0.3
eta1 = 1.5
)");
  CHECK(c.A.rows() == 2);
  CHECK(c.A(0, 1) == 1.0);
  CHECK(c.B(1, 0) == 1.0);
  CHECK(c.Q == 2.0 * Matrix::Identity(2, 2));
  CHECK(c.R(0, 0) == 0.1);
  CHECK(c.T == 12);
  CHECK(c.sigmas.size() == 2);
  CHECK(c.method.variant == Variant::direct_regularized);
  CHECK(c.method.lambda == 0.05);
  CHECK(c.method.rho == 0.5);
  CHECK(c.method.norm == NormKind::spectral);
  CHECK(c.lambdas->size() == 2);
  const auto nm = c.named_methods();
  REQUIRE(nm.size() == 2);
  CHECK(nm[1].label == "mixed");
  CHECK(nm[1].method.lambda == 0.2);
  CHECK(c.seed == 123);
  CHECK(c.out == "results");
  CHECK(*c.delta == 0.3);
  CHECK(c.eta1 == 1.5);
}

TEST_CASE("config errors carry the line number") {
  CHECK(error_line("T = 5\nbogus = 1\n") == 2);
  CHECK(error_line("T = 5\nT = 6\n") == 2);
  CHECK(error_line("\n\nT = -1\n") == 3);
  CHECK(error_line("sigma = abc\n") == 1);
  CHECK(error_line("just words\n") == 1);
  CHECK(error_line("method = indirect_ce\nlambda = 0.1\n") == 2);
  CHECK(error_line("A = [[1, 2]]\n") == 1);
  CHECK(error_line("Q = [[1, 0], [0, 1]]\n") == 1);
  CHECK(error_line("methods = [ce, bogus]\n") == 1);
  CHECK(error_line("eta1 = 0.5\n") == 1);
  CHECK(error_line("lambdas = [0.1, 0.01]\n") == 1);
  CHECK(error_line("system = other\n") == 1);
  CHECK(error_line("T = 3\nsigma = nan\n") == 2);
  CHECK(error_line("zero_gain = maybe\n") == 1);
  CHECK_THROWS_AS(config::load("/nonexistent.cfg"), ConfigError);
}

TEST_CASE("matrix literals") {
  const Matrix m = config::parse_matrix("[[1, 2.5], [-3, 4e-1]]");
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == 0.4);
  CHECK_THROWS(config::parse_matrix("[[1, 2], [3]]"));
  CHECK_THROWS(config::parse_matrix("[1, 2"));
}
