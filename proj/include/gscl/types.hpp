#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gscl {

using Index = std::int64_t;

/// Dense node-representation matrices are row-major: row i is node i.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

using MatrixF = DenseMatrix<float>;
using MatrixD = DenseMatrix<double>;
using VectorF = DenseVector<float>;
using VectorD = DenseVector<double>;

enum class Activation { relu, prelu, rrelu, linear };

/// Fixed negative slopes: prelu uses the usual 0.25 init and rrelu runs in its
/// deterministic mean-slope mode so forward passes are reproducible.
inline constexpr double kPreluSlope = 0.25;
inline constexpr double kRreluSlope = (1.0 / 8.0 + 1.0 / 3.0) / 2.0;

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Raised when a computation produced non-finite or otherwise numerically
/// unusable results (maps to CLI exit code 2).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "prelu") return Activation::prelu;
  if (s == "rrelu") return Activation::rrelu;
  if (s == "linear") return Activation::linear;
  throw std::invalid_argument("unknown activation: " + s);
}

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::prelu: return "prelu";
    case Activation::rrelu: return "rrelu";
    case Activation::linear: return "linear";
  }
  return "?";
}

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gscl
