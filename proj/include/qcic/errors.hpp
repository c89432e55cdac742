#pragma once

#include <stdexcept>
#include <string>

namespace qcic {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownRegister : Error {
  explicit UnknownRegister(const std::string& msg) : Error("unknown register: " + msg) {}
};

struct NotHermitian : Error {
  explicit NotHermitian(const std::string& msg) : Error("matrix not Hermitian: " + msg) {}
};

struct InvalidState : Error {
  explicit InvalidState(const std::string& msg) : Error("invalid state: " + msg) {}
};

struct OverlappingParts : Error {
  explicit OverlappingParts(const std::string& msg) : Error("overlapping parts: " + msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg) : Error("argument out of range: " + msg) {}
};

// Raised when a simulation would exceed the configured dimension or
// coin-space cap; carries the measured size in the message.
struct StateBlowup : Error {
  explicit StateBlowup(const std::string& msg) : Error("state blowup: " + msg) {}
};

struct RequiresBinaryInputs : Error {
  explicit RequiresBinaryInputs(const std::string& msg) : Error("requires binary inputs: " + msg) {}
};

struct RequiresMemoryless : Error {
  explicit RequiresMemoryless(const std::string& msg) : Error("requires memoryless protocol: " + msg) {}
};

struct NotOneShot : Error {
  explicit NotOneShot(const std::string& msg) : Error("requires one-shot coins: " + msg) {}
};

struct KeyLengthMismatch : Error {
  explicit KeyLengthMismatch(const std::string& msg) : Error("key length mismatch: " + msg) {}
};

struct UnsupportedOutput : Error {
  explicit UnsupportedOutput(const std::string& msg) : Error("unsupported output register: " + msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& path, const std::string& msg)
      : Error("parse error at " + path + ": " + msg), json_path(path) {}
  std::string json_path;
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

}  // namespace qcic
