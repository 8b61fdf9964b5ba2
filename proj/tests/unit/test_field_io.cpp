#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <random>

#include "bifluid/field_io.hpp"

using namespace bifluid;

namespace {

MixtureState random_state(std::mt19937& gen, int dim) {
  std::uniform_int_distribution<int> n(4, 6);
  std::uniform_real_distribution<double> len(0.5, 2.0);
  std::normal_distribution<double> v(0.0, 1e3);
  std::array<double, 3> e{len(gen), len(gen), len(gen)};
  std::array<int, 3> c{n(gen), n(gen), n(gen)};
  const Grid g = build_grid(dim, std::span<const double>(e.data(), dim), std::span<const int>(c.data(), dim));
  MixtureParams p;
  MixtureState st = equilibrium_state(g, p, std::ldexp(1.0, -static_cast<int>(gen() % 8)), 0.5);
  auto fill = [&](std::vector<double>& xs) {
    for (auto& x : xs) x = v(gen) * std::ldexp(1.0, static_cast<int>(gen() % 40) - 20);
  };
  for (int i = 0; i < 2; ++i) {
    fill(st.rho[i].data());
    for (int a = 0; a < dim; ++a) fill(st.u[i].comp(a));
  }
  fill(st.s.data());
  return st;
}

}  // namespace

TEST_CASE("field dumps round-trip bitwise") {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const MixtureState st = random_state(gen, trial % 2 ? 3 : 2);
    for (FieldFileFormat f : {FieldFileFormat::Text, FieldFileFormat::Csv}) {
      const MixtureState back = parse_fields(format_fields(st, f));
      CHECK(bitwise_equal(st, back));
    }
  }
}

TEST_CASE("csv column layout") {
  CHECK(csv_columns(3).size() == 12);
  CHECK(csv_columns(2).size() == 9);
  CHECK(csv_columns(3).front() == "x");
  CHECK(csv_columns(3).back() == "s");
  std::mt19937 gen(3);
  const std::string csv = format_fields(random_state(gen, 3), FieldFileFormat::Csv);
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line) && line.starts_with("#")) {
  }
  CHECK(std::count(line.begin(), line.end(), ',') == 11);
}

TEST_CASE("truncated and corrupt dumps are rejected with an offset") {
  std::mt19937 gen(5);
  const MixtureState st = random_state(gen, 3);
  for (FieldFileFormat f : {FieldFileFormat::Text, FieldFileFormat::Csv}) {
    const std::string full = format_fields(st, f);
    for (std::size_t cut : {full.size() / 3, full.size() - 1, full.size() - 20}) {
      try {
        parse_fields(full.substr(0, cut));
        FAIL("truncated dump parsed");
      } catch (const FieldFormatError& e) {
        CHECK(e.offset() <= cut);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
      }
    }
    CHECK_THROWS_AS(parse_fields(full + "1 2 3\n"), FieldFormatError);
  }
  CHECK_THROWS_AS(parse_fields("garbage\n"), FieldFormatError);
  CHECK_THROWS_AS(parse_fields(""), FieldFormatError);
}

TEST_CASE("files are written atomically and read back") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bifluid_field_io_test";
  fs::create_directories(dir);
  std::mt19937 gen(9);
  const MixtureState st = random_state(gen, 2);
  write_fields(st, (dir / "a.dat").string(), FieldFileFormat::Text);
  write_fields(st, (dir / "a.csv").string(), FieldFileFormat::Csv);
  CHECK(bitwise_equal(read_fields((dir / "a.dat").string()), st));
  CHECK(bitwise_equal(read_fields((dir / "a.csv").string()), st));
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
  CHECK_THROWS(read_file((dir / "missing").string()));
  fs::remove_all(dir);
}
