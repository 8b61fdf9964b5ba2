#include <doctest.h>

#include <algorithm>

#include "bifluid/config.hpp"

using namespace bifluid;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("empty config yields the defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.grid.dim == 3);
  CHECK(c.grid.cells[0] == 16);
  CHECK(c.params.gamma == 4.0);
  CHECK(c.params.m == 4.0);
  CHECK(c.output.directory == "output");
  CHECK(c.continuation.eps_schedule.front() == 1.0);
  CHECK(c == RunConfig{});
}

TEST_CASE("parse errors carry a line number") {
  const std::string text = "[grid]\ndim = 2\n\n[params]\ngamm = 4\n";
  try {
    parse_config(text);
    FAIL("expected a parse error");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    CHECK(std::string(e.what()).find("gamm") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[grid]\ndim = 3\ndim = 2\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[grid]\ndim = two\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[grid]\ndim 3\n"), ConfigParseError);
}

TEST_CASE("semantic violations are all reported") {
  const std::string text =
      "[params]\ngamma = 1.2\nm = 1.5\n[viscosity]\nmu12 = 0.5\n[grid]\ncells = 2 2 2\n";
  try {
    parse_config(text);
    FAIL("expected a validation error");
  } catch (const ConfigValidationError& e) {
    CHECK(mentions(e.violations(), "triangularity"));
    CHECK(mentions(e.violations(), "gamma"));
    CHECK(mentions(e.violations(), "cells"));
    CHECK(e.violations().size() >= 3);
  }
}

TEST_CASE("unproven parameters are waivable") {
  const std::string text = "[params]\ngamma = 2\nm = 2.5\n";
  CHECK_THROWS_AS(parse_config(text), ConfigValidationError);
  const RunConfig c = parse_config(text + "allow_unproven = true\n");
  CHECK(c.params.allow_unproven);
}

TEST_CASE("serialization round-trips") {
  const std::string text =
      "# comment\n[grid]\ndim = 2\nextents = 1.5 0.75\ncells = 12 6\n"
      "[params]\ngamma = 4.5\nm = 5\nmass1 = 0.3\nmass2 = 2\nforcing = trig\nforcing_magnitude = 0.1\n"
      "forcing_axis = 1\ntheta_hat = trig\ntheta_hat_value = 2\ntheta_hat_amplitude = 0.25\n"
      "[viscosity]\npreset = nonsymmetric\n"
      "[continuation]\neps_schedule = 1 0.1\nlambda_schedule = 0.5 1\ndamping = 0.3\nfp_tol = 1e-9\n"
      "[output]\ndirectory = out dir\nsnapshot_every = 2\nfield_format = both\n";
  const RunConfig c = parse_config(text);
  CHECK(c.grid.dim == 2);
  CHECK(c.grid.extents[0] == 1.5);
  CHECK(c.output.directory == "out dir");
  CHECK(c.output.field_format == FieldFormat::Both);
  const std::string s = serialize_config(c);
  const RunConfig d = parse_config_unchecked(s);
  CHECK(d == c);
  CHECK(serialize_config(d) == s);
}

TEST_CASE("shortest double formatting") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.1) == "0.1");
}
