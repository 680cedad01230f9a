// Copyright 2026 The dynqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dynqubo {

//! Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SelfReferenceError : public Error {
  public:
    using Error::Error;
};

class UnboundVariableError : public Error {
  public:
    using Error::Error;
};

class LengthMismatchError : public Error {
  public:
    using Error::Error;
};

class NonExplicitDynamicsError : public Error {
  public:
    using Error::Error;
};

class MissingSchemeError : public Error {
  public:
    using Error::Error;
};

class NotMultilinearError : public Error {
  public:
    using Error::Error;
};

class DegreeTooHighError : public Error {
  public:
    using Error::Error;
};

class TooLargeError : public Error {
  public:
    using Error::Error;
};

class InvalidEmbeddingError : public Error {
  public:
    using Error::Error;
};

class EmbeddingNotFoundError : public Error {
  public:
    EmbeddingNotFoundError(const std::string &what, int attempts, int best_overlap)
            : Error(what), attempts_(attempts), best_overlap_(best_overlap) {}

    int attempts() const { return attempts_; }
    //! number of over-used qubits in the best (invalid) attempt
    int best_overlap() const { return best_overlap_; }

  private:
    int attempts_;
    int best_overlap_;
};

class ShapeMismatchError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace dynqubo
