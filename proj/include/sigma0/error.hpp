#pragma once

#include <stdexcept>
#include <string>

namespace sigma0 {

enum class ErrorKind {
  invalid_argument,
  not_hermitian,
  dimension_mismatch,
  band_edge,
  spectral_irregularity,
  resolution_insufficient,
  increase_m,
  insufficient_truncation,
  not_certifiable,
  degenerate_limit_set,
  not_unitary,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::not_hermitian: return "not hermitian";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::band_edge: return "band edge";
    case ErrorKind::spectral_irregularity: return "spectral irregularity";
    case ErrorKind::resolution_insufficient: return "resolution insufficient";
    case ErrorKind::increase_m: return "increase M";
    case ErrorKind::insufficient_truncation: return "insufficient truncation";
    case ErrorKind::not_certifiable: return "not certifiable";
    case ErrorKind::degenerate_limit_set: return "degenerate limit set";
    case ErrorKind::not_unitary: return "not unitary";
    case ErrorKind::io: return "i/o";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sigma0
