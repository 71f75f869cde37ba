// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hd {

// Keep in sync with hd_status in include/hypodecay/hypodecay.h.
enum class ErrorCode : int {
  kOk = 0,
  kDimension = 1,
  kInvalidInput = 2,
  kNoUniqueSolution = 3,
  kConditioning = 4,
  kParameter = 5,
  kInfeasibleCertificate = 6,
  kRange = 7,
  kCapacity = 8,
  kDomain = 9,
  kSingularIntegrand = 10,
  kDivergentMoment = 11,
  kInconsistency = 12,
  kSpectralConsistency = 13,
  kTheoremCheck = 14,
  kPrecondition = 15,
  kUnderResolved = 16,
  kParse = 17,
  kIo = 18,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hd
