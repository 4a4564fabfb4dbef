#pragma once

// Deterministic RNG with explicit seed-splitting. Sweeps derive one child seed
// per population member, so parallel evaluation order cannot change results
// and two runs with the same seed are bit-identical.

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qmet {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
  }

  // Child generator for population member `index`; independent of call order.
  Rng child(std::uint64_t index) const {
    std::uint64_t mix = s_[0] ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(mix);
  }

  std::uint64_t next_u64() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, no cached spare: results depend only on the draw sequence.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  Eigen::VectorXcd unit_vector(int dim) {
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cnormal();
    return v / v.norm();
  }

  Eigen::MatrixXcd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = cnormal();
    return m;
  }

  Eigen::MatrixXcd hermitian(int dim, double scale = 1.0) {
    Eigen::MatrixXcd m = gaussian_matrix(dim, dim);
    return scale * 0.5 * (m + m.adjoint()).eval();
  }

  // Haar-like unitary via Gram-Schmidt of a Gaussian matrix (deterministic).
  Eigen::MatrixXcd unitary(int dim) {
    Eigen::MatrixXcd m = gaussian_matrix(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < j; ++k) m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
      m.col(j).normalize();
    }
    return m;
  }

  // Random density matrix of the given rank.
  Eigen::MatrixXcd density(int dim, int rank) {
    Eigen::MatrixXcd m = gaussian_matrix(dim, rank);
    Eigen::MatrixXcd rho = m * m.adjoint();
    return rho / rho.trace().real();
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace qmet
