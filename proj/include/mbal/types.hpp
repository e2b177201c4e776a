#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mbal {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidArgument,
  InvalidMeasure,
  InvalidDirection,
  NumericalDegeneracy,
  ZeroDirection,
  SpanIsFull,
  EmptySpan,
  TooManyAtoms,
  NotSemistable,
  NotStable,
  NotPositiveTarget,
  TargetOutsidePolytope,
  DegenerateHull,
  Parse,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind so the
// CLI can map it onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mbal
