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
#include "gear/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "gear/error.hpp"

namespace gear {

namespace {

bool AllFinite(const Eigen::MatrixXd& m) { return m.allFinite(); }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

Eigen::MatrixXd Columns(const CsvTable& table,
                        const std::vector<std::size_t>& columns) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          table.rows[i][columns[j]];
    }
  }
  return out;
}

std::vector<std::size_t> Resolve(const CsvTable& table,
                                 const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(table.ColumnIndex(name));
  return out;
}

void CheckNonEmptyRoles(const Schema& schema) {
  if (schema.covariates.empty()) {
    throw SchemaError("schema declares no covariate columns");
  }
  if (schema.intermediates.empty()) {
    throw SchemaError("schema declares no intermediate columns");
  }
}

void WriteCsv(const std::filesystem::path& path,
              const std::vector<std::string>& header,
              const std::vector<const Eigen::MatrixXd*>& blocks) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << '\n';
  const Eigen::Index n = blocks.front()->rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    bool first = true;
    for (const auto* block : blocks) {
      for (Eigen::Index j = 0; j < block->cols(); ++j) {
        out << (first ? "" : ",") << FormatDouble((*block)(i, j));
        first = false;
      }
    }
    out << '\n';
  }
}

}  // namespace

std::vector<int> Schema::ContinuousCovariateIndices() const {
  std::vector<int> out;
  if (continuous_covariates.empty()) {
    for (std::size_t j = 0; j < covariates.size(); ++j) {
      out.push_back(static_cast<int>(j));
    }
    return out;
  }
  for (const auto& name : continuous_covariates) {
    bool found = false;
    for (std::size_t j = 0; j < covariates.size(); ++j) {
      if (covariates[j] == name) {
        out.push_back(static_cast<int>(j));
        found = true;
      }
    }
    if (!found) {
      throw SchemaError("continuous covariate '" + name +
                        "' is not a declared covariate");
    }
  }
  return out;
}

Schema Schema::FromJson(const nlohmann::json& j) {
  Schema schema;
  try {
    schema.covariates = j.at("covariates").get<std::vector<std::string>>();
    schema.treatment = j.value("treatment", std::string());
    schema.intermediates =
        j.at("intermediates").get<std::vector<std::string>>();
    schema.outcome = j.value("outcome", std::string());
    schema.continuous_covariates = j.value(
        "continuous_covariates", std::vector<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
  return schema;
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json j;
  j["covariates"] = covariates;
  j["treatment"] = treatment;
  j["intermediates"] = intermediates;
  j["outcome"] = outcome;
  if (!continuous_covariates.empty()) {
    j["continuous_covariates"] = continuous_covariates;
  }
  return j;
}

ExperimentalSample::ExperimentalSample(Eigen::MatrixXd covariates,
                                       Eigen::VectorXd treatments,
                                       Eigen::MatrixXd intermediates)
    : covariates_(std::move(covariates)),
      treatments_(std::move(treatments)),
      intermediates_(std::move(intermediates)) {
  const Eigen::Index n = covariates_.rows();
  if (n < 1) throw DimensionError("experimental sample is empty");
  if (treatments_.size() != n || intermediates_.rows() != n) {
    throw DimensionError("experimental containers disagree on row count");
  }
  if (covariates_.cols() < 1 || intermediates_.cols() < 1) {
    throw DimensionError(
        "experimental sample needs at least one covariate and one "
        "intermediate column");
  }
  if (!AllFinite(covariates_) || !AllFinite(intermediates_)) {
    throw DataError("experimental sample contains non-finite values");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = treatments_(i);
    if (a != 0.0 && a != 1.0) {
      throw DataError("treatment in row " + std::to_string(i + 1) +
                      " is not 0 or 1");
    }
  }
}

Eigen::Index ExperimentalSample::treated_count() const {
  return static_cast<Eigen::Index>(treatments_.sum());
}

bool ExperimentalSample::BothArmsPresent() const {
  const Eigen::Index treated = treated_count();
  return treated > 0 && treated < size();
}

Eigen::MatrixXd ExperimentalSample::Joint() const {
  Eigen::MatrixXd joint(size(), covariate_dim() + intermediate_dim());
  joint << covariates_, intermediates_;
  return joint;
}

AuxiliarySample::AuxiliarySample(Eigen::MatrixXd covariates,
                                 Eigen::MatrixXd intermediates,
                                 Eigen::VectorXd outcomes)
    : covariates_(std::move(covariates)),
      intermediates_(std::move(intermediates)),
      outcomes_(std::move(outcomes)) {
  const Eigen::Index n = covariates_.rows();
  if (n < 1) throw DimensionError("auxiliary sample is empty");
  if (outcomes_.size() != n || intermediates_.rows() != n) {
    throw DimensionError("auxiliary containers disagree on row count");
  }
  if (covariates_.cols() < 1 || intermediates_.cols() < 1) {
    throw DimensionError(
        "auxiliary sample needs at least one covariate and one intermediate "
        "column");
  }
  if (!AllFinite(covariates_) || !AllFinite(intermediates_) ||
      !outcomes_.allFinite()) {
    throw DataError("auxiliary sample contains non-finite values");
  }
}

Eigen::MatrixXd AuxiliarySample::Joint() const {
  Eigen::MatrixXd joint(size(), covariate_dim() + intermediate_dim());
  joint << covariates_, intermediates_;
  return joint;
}

AuxiliarySample AuxiliarySample::Subset(
    const std::vector<Eigen::Index>& rows) const {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, covariate_dim());
  Eigen::MatrixXd m(n, intermediate_dim());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = covariates_.row(rows[i]);
    m.row(i) = intermediates_.row(rows[i]);
    y(i) = outcomes_(rows[i]);
  }
  return AuxiliarySample(std::move(x), std::move(m), std::move(y));
}

SampleRatio ComputeSampleRatio(const ExperimentalSample& experimental,
                               const AuxiliarySample& auxiliary) {
  return SampleRatio{std::sqrt(static_cast<double>(experimental.size()) /
                               static_cast<double>(auxiliary.size()))};
}

void CheckCompatible(const ExperimentalSample& experimental,
                     const AuxiliarySample& auxiliary) {
  if (experimental.covariate_dim() != auxiliary.covariate_dim()) {
    throw DimensionError(
        "covariate count differs between samples: " +
        std::to_string(experimental.covariate_dim()) + " vs " +
        std::to_string(auxiliary.covariate_dim()));
  }
  if (experimental.intermediate_dim() != auxiliary.intermediate_dim()) {
    throw DimensionError(
        "intermediate count differs between samples: " +
        std::to_string(experimental.intermediate_dim()) + " vs " +
        std::to_string(auxiliary.intermediate_dim()));
  }
}

std::size_t CsvTable::ColumnIndex(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw SchemaError("column '" + name + "' not found");
}

CsvTable ParseCsv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const auto cells = SplitLine(line);
    if (!have_header) {
      std::unordered_set<std::string> seen;
      for (auto cell : cells) {
        std::string name(cell);
        if (name.empty()) throw SchemaError("empty column name in header");
        if (!seen.insert(name).second) {
          throw SchemaError("duplicate column '" + name + "'");
        }
        table.header.push_back(std::move(name));
      }
      have_header = true;
      continue;
    }
    ++data_row;
    if (cells.size() != table.header.size()) {
      throw ParseError("row " + std::to_string(data_row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(table.header.size()),
                       data_row, "");
    }
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto cell = cells[j];
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (!cell.empty() && *begin == '+') ++begin;
      const auto result = std::from_chars(begin, end, values[j]);
      if (cell.empty() || result.ec != std::errc() || result.ptr != end) {
        throw ParseError("non-numeric cell '" + std::string(cell) +
                             "' at row " + std::to_string(data_row) +
                             ", column '" + table.header[j] + "'",
                         data_row, table.header[j]);
      }
      if (!std::isfinite(values[j])) {
        throw DataError("non-finite value at row " + std::to_string(data_row) +
                        ", column '" + table.header[j] + "'");
      }
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) throw SchemaError("CSV has no header row");
  return table;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open data file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str());
}

ExperimentalSample ExperimentalFromTable(const CsvTable& table,
                                         const Schema& schema) {
  CheckNonEmptyRoles(schema);
  if (schema.treatment.empty()) {
    throw SchemaError("schema declares no treatment column");
  }
  const auto treatment_column = table.ColumnIndex(schema.treatment);
  const auto x_columns = Resolve(table, schema.covariates);
  const auto m_columns = Resolve(table, schema.intermediates);
  Eigen::VectorXd a(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double value = table.rows[i][treatment_column];
    if (value != 0.0 && value != 1.0) {
      throw DataError("treatment value " + FormatDouble(value) + " in row " +
                      std::to_string(i + 1) + " is not 0 or 1");
    }
    a(static_cast<Eigen::Index>(i)) = value;
  }
  return ExperimentalSample(Columns(table, x_columns), std::move(a),
                            Columns(table, m_columns));
}

AuxiliarySample AuxiliaryFromTable(const CsvTable& table,
                                   const Schema& schema) {
  CheckNonEmptyRoles(schema);
  if (schema.outcome.empty()) {
    throw SchemaError("schema declares no outcome column");
  }
  const auto y_column = table.ColumnIndex(schema.outcome);
  const auto x_columns = Resolve(table, schema.covariates);
  const auto m_columns = Resolve(table, schema.intermediates);
  Eigen::VectorXd y(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = table.rows[i][y_column];
  }
  return AuxiliarySample(Columns(table, x_columns), Columns(table, m_columns),
                         std::move(y));
}

ExperimentalSample LoadExperimental(const std::filesystem::path& path,
                                    const Schema& schema) {
  return ExperimentalFromTable(ReadCsv(path), schema);
}

AuxiliarySample LoadAuxiliary(const std::filesystem::path& path,
                              const Schema& schema) {
  return AuxiliaryFromTable(ReadCsv(path), schema);
}

void WriteExperimental(const std::filesystem::path& path,
                       const ExperimentalSample& sample,
                       const Schema& schema) {
  std::vector<std::string> header = schema.covariates;
  header.push_back(schema.treatment);
  header.insert(header.end(), schema.intermediates.begin(),
                schema.intermediates.end());
  const Eigen::MatrixXd a = sample.treatments();
  WriteCsv(path, header,
           {&sample.covariates(), &a, &sample.intermediates()});
}

void WriteAuxiliary(const std::filesystem::path& path,
                    const AuxiliarySample& sample, const Schema& schema) {
  std::vector<std::string> header = schema.covariates;
  header.insert(header.end(), schema.intermediates.begin(),
                schema.intermediates.end());
  header.push_back(schema.outcome);
  const Eigen::MatrixXd y = sample.outcomes();
  WriteCsv(path, header,
           {&sample.covariates(), &sample.intermediates(), &y});
}

Schema DefaultSchema(int covariate_dim, int intermediate_dim) {
  Schema schema;
  for (int j = 1; j <= covariate_dim; ++j) {
    schema.covariates.push_back("x" + std::to_string(j));
  }
  schema.treatment = "a";
  for (int j = 1; j <= intermediate_dim; ++j) {
    schema.intermediates.push_back("m" + std::to_string(j));
  }
  schema.outcome = "y";
  return schema;
}

}  // namespace gear
