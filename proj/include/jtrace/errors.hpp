#pragma once

#include <stdexcept>
#include <string>

namespace jtrace {

/// Base class for failures of a numerical computation.  Invalid input is
/// reported with std::invalid_argument instead.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Series evaluation lost too many digits to cancellation or lies outside
/// the region where the truncation is certified.
class CancellationFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ConvergenceFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// A computed spectral mass came out non-positive.
class MassNegative : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// The estimated contribution of omitted eigenvalues exceeds the tolerance.
class TailDominates : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class TruncationTooCoarse : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ParameterOutOfRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergentArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace jtrace
