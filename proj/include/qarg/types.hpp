#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qarg {

using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using MatrixR = Eigen::MatrixXd;
using VectorR = Eigen::VectorXd;
using Complex = std::complex<double>;

using Bytes = std::vector<uint8_t>;

// Dense matrices are never built past this many qubits (4096 x 4096).
inline constexpr int kDenseQubitCap = 12;
// Statevectors may be larger than dense operators.
inline constexpr int kStateQubitCap = 20;

inline constexpr double kTolHermitian = 1e-10;
inline constexpr double kTolNorm = 1e-10;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

inline Eigen::Index dim_for_qubits(int qubits) {
  require(qubits >= 0 && qubits <= 30, "qubit count out of range");
  return Eigen::Index{1} << qubits;
}

inline bool is_hermitian(const MatrixC& a, double tol = kTolHermitian) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const MatrixC& a, double tol = kTolHermitian) {
  MatrixC d = a.adjoint() * a - MatrixC::Identity(a.rows(), a.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

inline int popcount64(uint64_t x) { return __builtin_popcountll(x); }
inline int parity64(uint64_t x) { return popcount64(x) & 1; }

std::string to_hex(const Bytes& b);
std::string to_hex_u64(uint64_t v);

}  // namespace qarg
