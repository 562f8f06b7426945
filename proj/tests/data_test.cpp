/*
* Copyright 2026 The GEAR Authors.
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     https://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* ============================================================================
*/

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "gear/data.hpp"
#include "gear/error.hpp"
#include "testing.hpp"

namespace gear {
namespace {

using testing::TempDir;
using testing::WriteText;

Schema SmallSchema() {
  Schema s;
  s.covariates = {"x1", "x2"};
  s.treatment = "a";
  s.intermediates = {"m1"};
  s.outcome = "y";
  return s;
}

TEST_CASE("experimental CSV loads with the declared roles") {
  TempDir dir("data");
  WriteText(dir / "e.csv", "x1,x2,a,m1\n0.5,1,0,2\n-1,2,1,3\n3,0.25,1,-4\n");
  const ExperimentalSample e = LoadExperimental(dir / "e.csv", SmallSchema());
  CHECK(e.size() == 3);
  CHECK(e.covariate_dim() == 2);
  CHECK(e.intermediate_dim() == 1);
  CHECK(e.covariates()(2, 1) == 0.25);
  CHECK(e.treatments()(1) == 1.0);
  CHECK(e.intermediates()(2, 0) == -4.0);
  CHECK(e.treated_count() == 2);
  CHECK(e.BothArmsPresent());
}

TEST_CASE("column order in the file does not matter") {
  TempDir dir("data");
  WriteText(dir / "e.csv", "m1,a,x2,x1\n2,0,1,0.5\n3,1,2,-1\n");
  const ExperimentalSample e = LoadExperimental(dir / "e.csv", SmallSchema());
  CHECK(e.covariates()(0, 0) == 0.5);
  CHECK(e.covariates()(0, 1) == 1.0);
  CHECK(e.intermediates()(1, 0) == 3.0);
}

TEST_CASE("non-binary treatment names the row") {
  TempDir dir("data");
  WriteText(dir / "e.csv", "x1,x2,a,m1\n0,0,1,0\n0,0,2,0\n");
  try {
    LoadExperimental(dir / "e.csv", SmallSchema());
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("a single-arm sample loads; positivity is checked later") {
  TempDir dir("data");
  WriteText(dir / "e.csv", "x1,x2,a,m1\n0,0,1,0\n1,0,1,0\n");
  const ExperimentalSample e = LoadExperimental(dir / "e.csv", SmallSchema());
  CHECK_FALSE(e.BothArmsPresent());
}

TEST_CASE("non-numeric cells carry row and column") {
  try {
    ParseCsv("x1,x2\n1,2\n3,abc\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == "x2");
  }
  CHECK_THROWS_AS(ParseCsv("x1,x2\n1,2,3\n"), ParseError);
  CHECK_THROWS_AS(ParseCsv("x1,x2\n1,\n"), ParseError);
  CHECK_THROWS_AS(ParseCsv(""), Error);
  CHECK_THROWS_AS(ParseCsv("x1\nnan\n"), DataError);
}

TEST_CASE("CSV tolerates CRLF and surrounding spaces") {
  const CsvTable t = ParseCsv("x1, x2\r\n1, 2.5\r\n");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header[1] == "x2");
  CHECK(t.rows[0][1] == 2.5);
}

TEST_CASE("auxiliary CSV loads and validates its schema") {
  TempDir dir("data");
  WriteText(dir / "u.csv", "x1,x2,m1,y\n0,0,1,2\n1,1,1,3\n2,2,2,4\n3,3,3,5\n");
  const AuxiliarySample u = LoadAuxiliary(dir / "u.csv", SmallSchema());
  CHECK(u.size() == 4);
  CHECK(u.outcomes()(3) == 5.0);

  WriteText(dir / "bad.csv", "x1,x2,m1\n0,0,1\n");
  CHECK_THROWS_AS(LoadAuxiliary(dir / "bad.csv", SmallSchema()), SchemaError);
  CHECK_THROWS_AS(LoadExperimental(dir / "missing.csv", SmallSchema()), Error);
}

TEST_CASE("covariate dimension mismatch between samples") {
  const ExperimentalSample e(Eigen::MatrixXd::Zero(2, 2),
                             Eigen::Vector2d(0, 1), Eigen::MatrixXd::Zero(2, 1));
  const AuxiliarySample u(Eigen::MatrixXd::Zero(3, 3),
                          Eigen::MatrixXd::Zero(3, 1), Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(CheckCompatible(e, u), DimensionError);
}

TEST_CASE("sample ratio is sqrt(N_E / N_U)") {
  auto ratio = [](Eigen::Index ne, Eigen::Index nu) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(ne);
    a(0) = 1.0;
    const ExperimentalSample e(Eigen::MatrixXd::Zero(ne, 1), a,
                               Eigen::MatrixXd::Zero(ne, 1));
    const AuxiliarySample u(Eigen::MatrixXd::Zero(nu, 1),
                            Eigen::MatrixXd::Zero(nu, 1),
                            Eigen::VectorXd::Zero(nu));
    return ComputeSampleRatio(e, u).t;
  };
  CHECK(ratio(400, 400) == 1.0);
  CHECK(ratio(200, 800) == 0.5);
  CHECK(ratio(800, 400) == doctest::Approx(1.41421356).epsilon(1e-8));
}

TEST_CASE("constructors reject malformed containers") {
  CHECK_THROWS_AS(ExperimentalSample(Eigen::MatrixXd::Zero(2, 1),
                                     Eigen::VectorXd::Zero(3),
                                     Eigen::MatrixXd::Zero(2, 1)),
                  DimensionError);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  x(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ExperimentalSample(x, Eigen::Vector2d(0, 1),
                                     Eigen::MatrixXd::Zero(2, 1)),
                  DataError);
  CHECK_THROWS_AS(AuxiliarySample(Eigen::MatrixXd::Zero(0, 1),
                                  Eigen::MatrixXd::Zero(0, 1),
                                  Eigen::VectorXd::Zero(0)),
                  DimensionError);
}

TEST_CASE("write then load reproduces samples bit for bit") {
  TempDir dir("data");
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 3.0);
  const Schema schema = DefaultSchema(3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng() % 40);
    Eigen::MatrixXd x(rows, 3), m(rows, 2);
    Eigen::VectorXd a(rows), y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (int k = 0; k < 3; ++k) x(i, k) = n(rng) * std::pow(10.0, trial % 7 - 3);
      for (int k = 0; k < 2; ++k) m(i, k) = n(rng);
      a(i) = static_cast<double>(rng() % 2);
      y(i) = n(rng) * 1e5;
    }
    const ExperimentalSample e(x, a, m);
    const AuxiliarySample u(x, m, y);
    WriteExperimental(dir / "e.csv", e, schema);
    WriteAuxiliary(dir / "u.csv", u, schema);
    const ExperimentalSample e2 = LoadExperimental(dir / "e.csv", schema);
    const AuxiliarySample u2 = LoadAuxiliary(dir / "u.csv", schema);
    CHECK(e2.covariates() == e.covariates());
    CHECK(e2.treatments() == e.treatments());
    CHECK(e2.intermediates() == e.intermediates());
    CHECK(u2.outcomes() == u.outcomes());
    CHECK(u2.intermediates() == u.intermediates());
  }
}

TEST_CASE("schema JSON round trip and continuous indices") {
  Schema s = SmallSchema();
  s.continuous_covariates = {"x2"};
  const Schema back = Schema::FromJson(s.ToJson());
  CHECK(back.covariates == s.covariates);
  CHECK(back.intermediates == s.intermediates);
  CHECK(back.treatment == "a");
  CHECK(back.outcome == "y");
  CHECK(back.ContinuousCovariateIndices() == std::vector<int>{1});
  s.continuous_covariates = {"nope"};
  CHECK_THROWS_AS(s.ContinuousCovariateIndices(), SchemaError);
  CHECK_THROWS_AS(Schema::FromJson(nlohmann::json{{"covariates", 3}}),
                  SchemaError);
}

TEST_CASE("auxiliary subset keeps the requested rows") {
  const AuxiliarySample u(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 5, 6),
                          Eigen::Vector3d(7, 8, 9));
  const AuxiliarySample s = u.Subset({2, 0});
  CHECK(s.size() == 2);
  CHECK(s.covariates()(0, 0) == 3.0);
  CHECK(s.outcomes()(1) == 7.0);
  CHECK(u.Joint().cols() == 2);
}

}  // namespace
}  // namespace gear
