#pragma once

#include <stdexcept>
#include <string>

namespace tcq {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bad or inconsistent user input (config, physical parameters)
class config_error : public error {
 public:
  using error::error;
};

class capacity_error : public error {
 public:
  using error::error;
};

class convergence_error : public error {
 public:
  using error::error;
};

class bracket_error : public error {
 public:
  using error::error;
};

class unsupported_representation : public error {
 public:
  using error::error;
};

class consistency_error : public error {
 public:
  using error::error;
};

class data_error : public error {
 public:
  using error::error;
};

// a scan without two clear lattice periods
class periodicity_error : public data_error {
 public:
  using data_error::data_error;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace tcq
