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
// Two-sample data model: the experimental sample (X, A, M) and the auxiliary
// sample (X, M, Y), plus CSV ingestion driven by a column-role schema.

#ifndef GEAR_DATA_HPP_
#define GEAR_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace gear {

// Column roles. The outcome column is only read from auxiliary files.
struct Schema {
  std::vector<std::string> covariates;
  std::string treatment;
  std::vector<std::string> intermediates;
  std::string outcome;
  // Covariates that receive nonlinear basis expansions. Empty means all.
  std::vector<std::string> continuous_covariates;

  // Indices into `covariates` of the continuous columns.
  std::vector<int> ContinuousCovariateIndices() const;

  static Schema FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

class ExperimentalSample {
 public:
  // Throws DimensionError / DataError if the invariants do not hold.
  ExperimentalSample(Eigen::MatrixXd covariates, Eigen::VectorXd treatments,
                     Eigen::MatrixXd intermediates);

  const Eigen::MatrixXd& covariates() const { return covariates_; }
  // Entries are exactly 0.0 or 1.0.
  const Eigen::VectorXd& treatments() const { return treatments_; }
  const Eigen::MatrixXd& intermediates() const { return intermediates_; }

  Eigen::Index size() const { return covariates_.rows(); }
  Eigen::Index covariate_dim() const { return covariates_.cols(); }
  Eigen::Index intermediate_dim() const { return intermediates_.cols(); }
  Eigen::Index treated_count() const;
  bool BothArmsPresent() const;

  // [X | M], the input of the outcome-mean basis.
  Eigen::MatrixXd Joint() const;

 private:
  Eigen::MatrixXd covariates_;
  Eigen::VectorXd treatments_;
  Eigen::MatrixXd intermediates_;
};

class AuxiliarySample {
 public:
  AuxiliarySample(Eigen::MatrixXd covariates, Eigen::MatrixXd intermediates,
                  Eigen::VectorXd outcomes);

  const Eigen::MatrixXd& covariates() const { return covariates_; }
  const Eigen::MatrixXd& intermediates() const { return intermediates_; }
  const Eigen::VectorXd& outcomes() const { return outcomes_; }

  Eigen::Index size() const { return covariates_.rows(); }
  Eigen::Index covariate_dim() const { return covariates_.cols(); }
  Eigen::Index intermediate_dim() const { return intermediates_.cols(); }

  Eigen::MatrixXd Joint() const;

  // Rows in `rows`, in the given order.
  AuxiliarySample Subset(const std::vector<Eigen::Index>& rows) const;

 private:
  Eigen::MatrixXd covariates_;
  Eigen::MatrixXd intermediates_;
  Eigen::VectorXd outcomes_;
};

// t = sqrt(N_E / N_U).
struct SampleRatio {
  double t = 1.0;
};

SampleRatio ComputeSampleRatio(const ExperimentalSample& experimental,
                               const AuxiliarySample& auxiliary);

// Throws DimensionError when covariate or intermediate widths differ.
void CheckCompatible(const ExperimentalSample& experimental,
                     const AuxiliarySample& auxiliary);

// A parsed CSV file: header plus numeric cells, row-major.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Throws SchemaError if `name` is not a column.
  std::size_t ColumnIndex(const std::string& name) const;
};

// Comma-delimited, header row required. Non-numeric or empty cells raise
// ParseError carrying the row and column.
CsvTable ReadCsv(const std::filesystem::path& path);
CsvTable ParseCsv(const std::string& text);

ExperimentalSample LoadExperimental(const std::filesystem::path& path,
                                    const Schema& schema);
AuxiliarySample LoadAuxiliary(const std::filesystem::path& path,
                              const Schema& schema);

ExperimentalSample ExperimentalFromTable(const CsvTable& table,
                                         const Schema& schema);
AuxiliarySample AuxiliaryFromTable(const CsvTable& table, const Schema& schema);

// Numbers are written in shortest round-trip form, so reloading is exact.
void WriteExperimental(const std::filesystem::path& path,
                       const ExperimentalSample& sample, const Schema& schema);
void WriteAuxiliary(const std::filesystem::path& path,
                    const AuxiliarySample& sample, const Schema& schema);

// x1..xr, a, m1..ms, y.
Schema DefaultSchema(int covariate_dim, int intermediate_dim);

}  // namespace gear

#endif  // GEAR_DATA_HPP_
