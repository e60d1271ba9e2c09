// Copyright 2026 The TablutZero Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace tablutzero {

// A precondition of an operation was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidAction : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite gradients or loss during optimization.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotReady : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A rating agent has no path of games to the anchor.
class Unidentifiable : public std::runtime_error {
 public:
  Unidentifiable(const std::string& agent, const std::string& what)
      : std::runtime_error(what), agent_(agent) {}
  const std::string& agent() const noexcept { return agent_; }

 private:
  std::string agent_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tablutzero
