#pragma once
// Test-only reference computations, independent of the library code paths
// they check.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "tiham/circuit.hpp"

namespace oracle {

using tiham::cplx;

inline tiham::Gate random_unitary4(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd z;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(z);
  return qr.householderQ() * Eigen::Matrix4cd::Identity();
}

inline tiham::SweepSchedule random_schedule(tiham::ProblemShape shape, std::mt19937_64& rng) {
  tiham::SweepSchedule s(shape);
  for (int m = 1; m <= shape.n_cycles; ++m)
    for (int n = 1; n <= shape.bonds(); ++n) s.set_gate(m, n, random_unitary4(rng));
  return s;
}

inline std::vector<int> random_bits(int n, std::mt19937_64& rng) {
  std::vector<int> b(static_cast<std::size_t>(n));
  for (auto& x : b) x = static_cast<int>(rng() & 1);
  return b;
}

// |x1 x2> -> |1 x1>: a permutation that writes 1 onto qubit 1 whenever the
// ancilla qubit starts at 0.
inline tiham::Gate always_reject_gate() {
  tiham::Gate u = tiham::Gate::Zero();
  u(2, 0) = 1.0;
  u(3, 2) = 1.0;
  u(0, 1) = 1.0;
  u(1, 3) = 1.0;
  return u;
}

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  return x;
}

// Full-register matrix of a bond gate: 1_{2^(n-1)} (x) U (x) 1_{2^(N-n-1)}.
inline Eigen::MatrixXcd full_gate(int n_qubits, int bond, const tiham::Gate& u) {
  const Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(1 << (bond - 1), 1 << (bond - 1));
  const Eigen::MatrixXcd right =
      Eigen::MatrixXcd::Identity(1 << (n_qubits - bond - 1), 1 << (n_qubits - bond - 1));
  const Eigen::MatrixXcd lu = Eigen::kroneckerProduct(left, Eigen::MatrixXcd(u));
  return Eigen::kroneckerProduct(lu, right);
}

// Plain state-vector run of every slot in sweep order (odd cycles left to
// right, even cycles right to left). Returns the probability that qubit 1
// reads 1 at the end.
inline double reject_probability(const tiham::SweepSchedule& s, const std::vector<int>& bits) {
  const int n = s.shape().n_qubits;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1 << n);
  int idx = 0;
  for (int b : bits) idx = 2 * idx + b;
  psi(idx) = 1.0;
  for (int m = 1; m <= s.shape().n_cycles; ++m) {
    for (int k = 1; k <= n - 1; ++k) {
      const int bond = m % 2 == 1 ? k : n - k;
      psi = full_gate(n, bond, s.gate_at(m, bond)) * psi;
    }
  }
  double p = 0.0;
  for (int i = 0; i < (1 << n); ++i)
    if ((i >> (n - 1)) & 1) p += std::norm(psi(i));
  return p;
}

inline double path_eigenvalue(int sites, int j) {
  return 2.0 * (1.0 - std::cos(M_PI * j / sites));
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Dense sum of a two-site term over every ring bond (k, k+1 mod L), built
// from Kronecker products; the wrap bond is obtained by relabelling sites.
inline Eigen::MatrixXcd ring_sum_dense(const Eigen::MatrixXcd& h, int d, int sites) {
  auto power = [](int b, int e) {
    long v = 1;
    for (int i = 0; i < e; ++i) v *= b;
    return v;
  };
  const long dim = power(d, sites);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k + 1 < sites; ++k) {
    const Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(power(d, k), power(d, k));
    const long rest = power(d, sites - k - 2);
    const Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(rest, rest);
    const Eigen::MatrixXcd lh = Eigen::kroneckerProduct(left, h);
    total += Eigen::kroneckerProduct(lh, right);
  }
  // wrap bond: relabel so that site L-1 becomes site 0 and site 0 becomes 1
  const Eigen::MatrixXcd first =
      Eigen::kroneckerProduct(h, Eigen::MatrixXcd::Identity(power(d, sites - 2), power(d, sites - 2)));
  Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(dim, dim);
  const long top = power(d, sites - 1);
  for (long c = 0; c < dim; ++c) {
    const long last = c % d;
    perm(last * top + c / d, c) = 1.0;
  }
  total += perm.adjoint() * first * perm;
  return total;
}

}  // namespace oracle
