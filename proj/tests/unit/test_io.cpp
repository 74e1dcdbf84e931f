#include "minheat/error.hpp"
#include "minheat/io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace minheat;

TEST_CASE("numbers print with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(std::sqrt(2.0))) == std::sqrt(2.0));
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("profile files round-trip exactly") {
  for (auto kind : {ProfileKind::Gaussian, ProfileKind::CslOptimal, ProfileKind::DpOptimal}) {
    const auto p = make_closed_form({kind, 1.5});
    std::stringstream ss;
    write_profile(ss, p);
    const auto q = read_profile(ss);
    REQUIRE(q.values().size() == p.values().size());
    for (std::size_t i = 0; i < p.values().size(); ++i) {
      CHECK(q.values()[i] == p.values()[i]);
      CHECK(q.grid().nodes()[i] == p.grid().nodes()[i]);
    }
    CHECK(q.grid().basis().order == p.grid().basis().order);
    CHECK(q.support_radius() == p.support_radius());
  }
}

TEST_CASE("piecewise-linear profile without header options") {
  std::stringstream ss("# minheat-profile v1\n0 2\n0.5 1\n1 0\n");
  const auto p = read_profile(ss);
  CHECK(p(0.25) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_FALSE(p.support_radius());
}

TEST_CASE("malformed profile files") {
  auto bad = [](const std::string& text) {
    std::stringstream ss(text);
    CHECK_THROWS_AS(read_profile(ss), FormatError);
  };
  bad("");
  bad("0 1\n1 0\n");
  bad("# minheat-profile v1\n0.1 1\n1 0\n");
  bad("# minheat-profile v1\n0 1\n0 0\n");
  bad("# minheat-profile v1\n0 1 2\n1 0\n");
  bad("# minheat-profile v1\n0 x\n1 0\n");
  bad("# minheat-profile v1\n# panel_order = 3\n0 1\n1 0\n");
}

TEST_CASE("strict option parsing") {
  const auto o = solver_options_from_json(Json::parse(R"({"n_points": 50, "seed": 7})"));
  CHECK(o.n_points == 50);
  CHECK(o.seed == 7u);
  CHECK_THROWS_AS(solver_options_from_json(Json::parse(R"({"npoints": 50})")), FormatError);
  const auto p = model_params_from_json(Json::parse(R"({"G": 2.5})"));
  CHECK(p.G == 2.5);
  CHECK(p.hbar == 1.0);
  CHECK_THROWS_AS(model_params_from_json(Json::parse(R"({"g": 2.5})")), FormatError);
  const auto back = solver_options_from_json(to_json(o));
  CHECK(back.n_points == o.n_points);
  CHECK(back.tol_constraint == o.tol_constraint);
}
