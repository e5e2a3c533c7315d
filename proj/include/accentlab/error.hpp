// accentlab/error.hpp

// Copyright 2026  Accentlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTLAB_ERROR_HPP_
#define ACCENTLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace accentlab {

// Failure classes; the CLI maps each class to a distinct exit code
// (config -> 2, data -> 3, numeric -> 4).
enum class ErrorKind { kConfig, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct InvalidConfig : Error {
  explicit InvalidConfig(std::string m) : Error(ErrorKind::kConfig, std::move(m)) {}
};
struct InsufficientAudio : Error {
  explicit InsufficientAudio(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct InsufficientFrames : Error {
  explicit InsufficientFrames(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct UncoveredPhone : Error {
  explicit UncoveredPhone(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct InfeasibleAlignment : Error {
  explicit InfeasibleAlignment(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct UnknownPhone : Error {
  explicit UnknownPhone(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct SilenceNotScorable : Error {
  explicit SilenceNotScorable(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct InsufficientPhones : Error {
  explicit InsufficientPhones(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct DegenerateLabels : Error {
  explicit DegenerateLabels(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};
struct SingularSystem : Error {
  explicit SingularSystem(std::string m) : Error(ErrorKind::kNumeric, std::move(m)) {}
};
struct SchemaError : Error {
  explicit SchemaError(std::string m) : Error(ErrorKind::kConfig, std::move(m)) {}
};
struct IoError : Error {
  explicit IoError(std::string m) : Error(ErrorKind::kData, std::move(m)) {}
};

}  // namespace accentlab

#endif  // ACCENTLAB_ERROR_HPP_
