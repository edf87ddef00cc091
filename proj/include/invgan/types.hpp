#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace invgan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point cloud stores one point per column.
using Cloud = Eigen::MatrixXd;

// Set-valued tolerance shared by group closure, deduplication and measure merging.
inline constexpr double kMatchTol = 1e-9;

class NotAGroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace invgan
