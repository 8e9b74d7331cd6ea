#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thattag {

// Base of every error raised by the toolchain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A caller violated a documented precondition (empty input, bad flag value).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& detail, const std::string& file = "")
      : Error((file.empty() ? "" : file + ": ") + "line " + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail),
        file_(file) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }
  const std::string& file() const { return file_; }

 private:
  std::size_t line_;
  std::string detail_;
  std::string file_;
};

class MissingTag : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class EmptyTraining : public Error {
 public:
  EmptyTraining() : Error("training data contains no tokens") {}
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptModel : public Error {
 public:
  CorruptModel(std::size_t offset, const std::string& what)
      : Error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ServiceError : public Error {
 public:
  ServiceError(int status, std::string body_excerpt)
      : Error("UDPipe API Error: " + std::to_string(status) + ", " + body_excerpt),
        status_(status),
        body_(std::move(body_excerpt)) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace thattag
