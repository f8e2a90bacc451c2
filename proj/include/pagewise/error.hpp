// Copyright 2026 The Pagewise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAGEWISE_ERROR_HPP_
#define PAGEWISE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pagewise {

enum class ErrorCode {
  kInputFormat,     // malformed text or pre-tokenized record
  kConfig,          // invalid parameter passed to a library routine
  kContract,        // caller violated a precondition (dimension, empty query)
  kIndex,           // token or page index out of range
  kOutOfVocabulary, // id not present in a table-backed provider
  kFormat,          // bad embedding table file
  kGeneration,      // synthetic case cannot be built
  kUsage,           // command-line / option validation
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Process exit status for an error: 1 I/O, 2 usage, 3 data format.
int exit_code_for(ErrorCode code);

}  // namespace pagewise

#endif  // PAGEWISE_ERROR_HPP_
