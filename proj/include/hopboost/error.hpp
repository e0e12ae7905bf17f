#pragma once

#include <stdexcept>
#include <string>

namespace hopboost {

// Numeric values are shared with the C API (hb_status).
enum class ErrorCode : int {
  kOk = 0,

  // usage errors
  kUsage = 100,
  kEmptyInput = 101,
  kUnknownName = 102,

  // data errors
  kData = 200,
  kDimensionMismatch = 201,
  kNotNormalized = 202,
  kNonFinite = 203,
  kZeroNorm = 204,
  kIo = 205,
  kBadMagic = 206,
  kBadVersion = 207,
  kBadDtype = 208,
  kTruncated = 209,
  kZeroDim = 210,
  kParse = 211,
  kRange = 212,
  kUnknownKey = 213,
  kInvalidSimplex = 214,
  kLowAcceptance = 215,
  kDegenerate = 216,

  // verification
  kVerifyFailed = 300,
};

enum class ErrorClass { kNone, kUsage, kData, kVerify };

constexpr ErrorClass classify(ErrorCode code) noexcept {
  const int v = static_cast<int>(code);
  if (v == 0) return ErrorClass::kNone;
  if (v < 200) return ErrorClass::kUsage;
  if (v < 300) return ErrorClass::kData;
  return ErrorClass::kVerify;
}

// Process exit code for an error: 0 ok, 1 usage, 2 data, 3 verification.
constexpr int exit_code(ErrorCode code) noexcept {
  switch (classify(code)) {
    case ErrorClass::kNone: return 0;
    case ErrorClass::kUsage: return 1;
    case ErrorClass::kData: return 2;
    case ErrorClass::kVerify: return 3;
  }
  return 2;
}

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace hopboost
