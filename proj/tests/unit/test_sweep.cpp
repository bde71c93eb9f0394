#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chirocool/sweep.hpp"

using namespace chirocool;
using namespace chirocool::sweep;

namespace {

SweepSpec small_fig2a(int p1, int p2) {
  SweepSpec s = figure_preset("fig2a");
  s.axis1.points = p1;
  s.axis2->points = p2;
  return s;
}

std::string csv(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("axis values") {
  Axis a{AxisKind::kGammaROverGamma, 0.0, 1.0, 5, false};
  CHECK(a.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  Axis l{AxisKind::kOmega1, 0.1, 10.0, 3, true};
  const auto v = l.values();
  CHECK(v[0] == doctest::Approx(0.1));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(10.0));
  Axis one{AxisKind::kXi, 2.0, 2.0, 1, false};
  CHECK(one.values() == std::vector<double>{2.0});
}

TEST_CASE("names parse and print") {
  for (auto k : {AxisKind::kGammaROverGamma, AxisKind::kOmega1, AxisKind::kOmega2OverOmega1, AxisKind::kXi,
                 AxisKind::kBeta, AxisKind::kNIons})
    CHECK(parse_axis(axis_name(k)) == k);
  for (const char* n : {"ntilde_2", "n_1", "re_cst", "W_1", "ntilde1_min"}) CHECK(Observable::parse(n).name() == n);
  CHECK(Observable::parse("ntilde_3").ion == 3);
  CHECK_THROWS_AS(Observable::parse("temperature"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("mass"), InvalidArgument);
  CHECK_THROWS_AS(parse_solver("magic"), InvalidArgument);
  CHECK_THROWS_AS(figure_preset("fig9"), InvalidArgument);
}

TEST_CASE("presets are valid and carry the figure parameters") {
  for (const auto& name : preset_names()) {
    INFO(name);
    const SweepSpec s = figure_preset(name);
    CHECK_NOTHROW(validate_spec(s));
    CHECK(s.name == name);
    CHECK(s.base.eta == 0.04);
    CHECK(s.base.total_decay() == doctest::Approx(0.1));
  }
  CHECK(preset_names().size() == 11);
  const SweepSpec a = figure_preset("fig2a");
  CHECK(a.axis1.kind == AxisKind::kGammaROverGamma);
  CHECK(a.axis1.lo == 0.0);
  CHECK(a.axis1.hi == 1.0);
  REQUIRE(a.axis2);
  CHECK(a.axis2->kind == AxisKind::kOmega2OverOmega1);
  CHECK(a.axis2->lo > 0.0);
  CHECK(a.axis2->hi == 1.0);
  CHECK(a.base.omega[0] == 1.0);
  CHECK(a.base.xi == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(a.axis1.points == 41);
  const SweepSpec f3 = figure_preset("fig3a");
  CHECK(f3.solver == SolverKind::kDynamicsFit);
  CHECK(f3.dynamics.n0 == 0.7);
  CHECK(f3.dynamics.n_max == 4);
  CHECK(f3.base.omega[1] == doctest::Approx(0.1));
  CHECK(f3.axis1.points == 9);
  const SweepSpec f5 = figure_preset("fig5b");
  CHECK(f5.solver == SolverKind::kReduced);
  CHECK(f5.axis1.kind == AxisKind::kNIons);
  CHECK(f5.axis1.lo == 2.0);
  CHECK(f5.axis1.hi == 30.0);
}

TEST_CASE("point configuration") {
  SweepSpec s = figure_preset("fig4_n2");
  const ChainConfig c = configure_point(s, 0.3, 0.8);
  CHECK(c.total_decay() == doctest::Approx(0.1));
  CHECK(c.beta() == doctest::Approx(0.8));
  CHECK(c.gamma_r / c.gamma() == doctest::Approx(0.3));
  SweepSpec b = figure_preset("fig2b");
  const ChainConfig d = configure_point(b, 0.5, 0.4);
  CHECK(d.omega[0] == 0.4);
  CHECK(d.omega[1] == doctest::Approx(0.04));
  CHECK(d.gamma_r == doctest::Approx(0.05));
  SweepSpec n = figure_preset("fig5b");
  const ChainConfig e = configure_point(n, 7.0, std::nan(""));
  CHECK(e.n_ions == 7);
  CHECK(e.omega.size() == 7);
}

TEST_CASE("spec validation") {
  SweepSpec s = figure_preset("fig2a");
  s.axis2->kind = AxisKind::kGammaROverGamma;
  CHECK_THROWS_AS(validate_spec(s), InvalidArgument);
  s = figure_preset("fig2a");
  s.observables = {Observable::parse("W_1")};
  CHECK_THROWS_AS(validate_spec(s), InvalidArgument);
  s = figure_preset("fig2a");
  s.axis1.hi = 1.5;
  CHECK_THROWS_AS(validate_spec(s), InvalidArgument);
  s = figure_preset("fig5b");
  s.min_search_grid = 20;
  CHECK_THROWS_AS(validate_spec(s), InvalidArgument);
  s = figure_preset("fig2a");
  s.observables.clear();
  CHECK_THROWS_AS(run_grid(s), InvalidArgument);
}

TEST_CASE("spec json round trip") {
  for (const auto& name : preset_names()) {
    const SweepSpec s = figure_preset(name);
    const SweepSpec back = spec_from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
    CHECK(back.hash() == s.hash());
  }
  Json bad = figure_preset("fig2a").to_json();
  bad["axis1"].erase("lo");
  CHECK_THROWS_AS(spec_from_json(bad), InvalidArgument);
}

TEST_CASE("grid shape, ordering and determinism across workers") {
  const SweepSpec s = small_fig2a(5, 3);
  const SweepResult one = run_grid(s, 1);
  const SweepResult many = run_grid(s, 4);
  CHECK(one.cells.size() == 15);
  CHECK(one.rows() == 5);
  CHECK(one.cols() == 3);
  CHECK(one.at(1, 2).x1 == doctest::Approx(0.25));
  CHECK(one.at(1, 2).x2 == doctest::Approx(s.axis2->values()[2]));
  CHECK(csv(one) == csv(many));
  CHECK(csv(one) == csv(run_grid(s, 1)));
  CHECK(one.spec_hash == s.hash());
  std::istringstream is(csv(one));
  std::string header;
  std::getline(is, header);
  CHECK(header == "axis1,axis2,observable,value,status");
}

TEST_CASE("failed points are explicit cells") {
  // reciprocal coupling with equal drives has a degenerate steady state
  SweepSpec s = figure_preset("fig2a");
  s.axis1 = Axis{AxisKind::kGammaROverGamma, 0.4, 0.5, 2, false};
  s.axis2 = Axis{AxisKind::kOmega2OverOmega1, 0.5, 1.0, 2, false};
  const SweepResult r = run_grid(s, 2);
  const SweepCell& bad = r.at(1, 1);
  for (const auto& v : bad.values) {
    CHECK_FALSE(v.ok());
    CHECK(v.status.rfind("error: ", 0) == 0);
    CHECK(std::isnan(v.value));
  }
  CHECK(r.at(0, 0).values[0].ok());
  CHECK(csv(r).find("error: ") != std::string::npos);
  const Json j = to_json(r);
  CHECK(j["cells"].size() == 4);
}

TEST_CASE("reduced sweep over chain length") {
  SweepSpec s = figure_preset("fig5b");
  s.axis1 = Axis{AxisKind::kNIons, 2.0, 4.0, 3, false};
  const SweepResult r = run_grid(s, 2);
  REQUIRE(r.cells.size() == 3);
  for (const auto& c : r.cells) {
    CHECK(c.values[0].ok());
    CHECK(c.values[0].value < 1.0);
    CHECK(std::isnan(c.x2));
  }
}

TEST_CASE("dynamics sweep produces rates") {
  SweepSpec s = figure_preset("fig3a");
  s.base.n_ions = 1;
  s.base.omega = {2.0};
  s.base.gamma_r = 0.1;
  s.base.gamma_l = 0.0;
  s.observables = {Observable::parse("W_1")};
  s.axis1 = Axis{AxisKind::kOmega1, 1.5, 2.0, 2, false};
  s.dynamics.n_max = 3;
  s.dynamics.samples = 101;
  const SweepResult r = run_grid(s, 1);
  REQUIRE(r.cells.size() == 2);
  for (const auto& c : r.cells) {
    INFO(c.values[0].status);
    CHECK(c.values[0].ok());
    CHECK(c.values[0].value > 0.0);
  }
  CHECK(r.cells[1].values[0].value > r.cells[0].values[0].value);
}

TEST_CASE("svg output") {
  const SweepResult r = run_grid(small_fig2a(3, 3), 2);
  std::ostringstream os;
  write_svg(os, r, 0);
  CHECK(os.str().find("<svg") != std::string::npos);
  CHECK(os.str().find("</svg>") != std::string::npos);
  CHECK_THROWS_AS(write_svg(os, r, 9), InvalidArgument);
  SweepSpec line = figure_preset("fig5b");
  line.axis1 = Axis{AxisKind::kNIons, 2.0, 3.0, 2, false};
  std::ostringstream ls;
  write_svg(ls, run_grid(line, 1), 0);
  CHECK(ls.str().find("<svg") != std::string::npos);
}
