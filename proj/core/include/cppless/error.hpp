#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cppless {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Value does not conform to the schema it is being encoded under.
class EncodeError : public Error {
 public:
  explicit EncodeError(const std::string& what) : Error(what) {}
};

// Malformed bytes under a schema; carries the byte offset of the failure.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Base64-in-JSON carrier violations (missing key, bad alphabet, bad padding).
class CarrierError : public Error {
 public:
  explicit CarrierError(const std::string& what) : Error(what) {}
};

// Envelope frame violations (magic, version, kind).
class EnvelopeError : public Error {
 public:
  explicit EnvelopeError(const std::string& what) : Error(what) {}
};

// JSON codec mismatch; carries the JSON path of the failure.
class JsonCodecError : public Error {
 public:
  JsonCodecError(const std::string& what, const std::string& path)
      : Error(what + " at " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Manifest schema violations; carries the field path.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, const std::string& path)
      : Error(path.empty() ? what : what + " at " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Invalid configuration values (pool size 0, memory below floor, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// API misuse (wait_any with nothing outstanding, ...).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

// Network-level failure talking to a backend.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(what) {}
};

// Control-plane rejection; carries the HTTP-ish status the platform returned.
class PlatformError : public Error {
 public:
  PlatformError(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_ = 0;
};

}  // namespace cppless
