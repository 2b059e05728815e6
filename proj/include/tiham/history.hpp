#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tiham/circuit.hpp"
#include "tiham/hamiltonian.hpp"
#include "tiham/spin_basis.hpp"

namespace tiham {

/// Sparse vector over ring configurations, sorted by index, no duplicates.
using SparseState = std::vector<std::pair<ConfigIndex, cplx>>;

/// Computation snapshot at clock step t: the clock pattern plus amplitudes
/// over the 2^N qubit strings (qubit 1 is the most significant bit).
struct Snapshot {
  int step = 0;
  ClockPattern pattern;
  Eigen::VectorXcd amplitudes;
};

struct HistoryState {
  ProblemShape shape;
  int head_site = 0;
  std::vector<Snapshot> snapshots;  // t = 0..T
};

/// Applies a two-qubit gate to qubits (bond, bond+1) of an N-qubit register.
void apply_gate(Eigen::VectorXcd& reg, int n_qubits, int bond, const Gate& u);

HistoryState simulate_history(const SweepSchedule& schedule, const std::vector<int>& bits, int head_site);

SparseState snapshot_state(const HistoryState& h, int step);

/// (1/sqrt(T+1)) sum_t |eta_t>.
SparseState build_history_state(const HistoryState& h);
/// Same from explicit snapshot vectors; throws if they are not orthonormal.
SparseState build_history_state(const std::vector<SparseState>& snapshots, double tol = 1e-10);

/// (1/sqrt(N+1)) sum_k |eta^(k)>; inputs must be mutually orthogonal.
SparseState symmetrize_over_head(const std::vector<SparseState>& per_head, double tol = 1e-10);

cplx inner(const SparseState& a, const SparseState& b);
double norm(const SparseState& a);
SparseState axpy(cplx alpha, const SparseState& x, const SparseState& y);  // alpha x + y

SparseState apply(const LocalTerm& term, const SpinBasis& basis, const SparseState& psi);
SparseState apply(const RingOperator& op, const SparseState& psi);
SparseState apply_shift(const SpinBasis& basis, const SparseState& psi);

Eigen::VectorXcd to_dense(const SparseState& psi, ConfigIndex dim);

struct Expectation {
  std::string name;
  double value = 0.0;
  double imag_residual = 0.0;
};

std::vector<Expectation> expectations(const SparseState& psi, const std::vector<const RingOperator*>& parts);
std::vector<Expectation> expectations(const SparseState& psi, const SpinBasis& basis,
                                      const std::vector<const LocalTerm*>& parts);

/// "<name> <expectation> <imag residual>" per line.
std::string format_expectations(const std::vector<Expectation>& report);

}  // namespace tiham
