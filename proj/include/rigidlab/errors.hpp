#pragma once

#include <stdexcept>
#include <string>

namespace rigidlab {

enum class ErrorCode {
  DimensionMismatch,
  Precondition,
  CapExceeded,
  SearchExhausted,
  UndecidableFromSamples,
  PrecisionInsufficient,
  UnsupportedShape,
  Parse,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorCode::Parse, what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rigidlab
