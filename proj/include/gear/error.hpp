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
// Error types shared by every gear module.

#ifndef GEAR_ERROR_HPP_
#define GEAR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gear {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column is absent or the column-role map is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell could not be parsed as a number.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t row, std::string column)
      : Error(message), row_(row), column_(std::move(column)) {}

  // 1-based data row (header excluded).
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Values violate a domain constraint (non-binary treatment, non-finite cell).
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Only one treatment arm is present.
class PositivityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gear

#endif  // GEAR_ERROR_HPP_
