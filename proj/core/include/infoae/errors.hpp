/*
   Copyright 2026 The InfoAE Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef INFOAE_ERRORS_HPP_
#define INFOAE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace infoae {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

/// Invalid argument: shape mismatch, non-positive size, unknown key.
class ArgumentError : public Error {
public:
   using Error::Error;
};

/// A file does not follow the expected layout (wrong magic, bad header).
class FormatError : public Error {
public:
   using Error::Error;
};

/// A file has the right layout but its payload is damaged or out of range.
class CorruptionError : public Error {
public:
   using Error::Error;
};

/// Checkpoint written by an incompatible format version.
class VersionError : public FormatError {
public:
   using FormatError::FormatError;
};

/// File system failure; the message always carries the offending path.
class IoError : public Error {
public:
   using Error::Error;
};

/// A loss term evaluated to NaN or infinity during training.
class NonFiniteLossError : public Error {
public:
   NonFiniteLossError(std::string term, double value, long long step)
      : Error("non-finite loss term " + term + " = " + std::to_string(value) + " at step " +
              std::to_string(step)),
        term_(std::move(term))
   {
   }

   const std::string& term() const noexcept { return term_; }

private:
   std::string term_;
};

} // namespace infoae

#endif // INFOAE_ERRORS_HPP_
