#pragma once

#include <stdexcept>

namespace mibguard {

// Base type for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input data: malformed files, schema mismatches, bad models.
class DataError : public Error {
 public:
  using Error::Error;
};

// Socket failures, timeouts, malformed or unexpected SNMP traffic.
class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace mibguard
