#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tiham/error.hpp"

namespace tiham {

using cplx = std::complex<double>;

// Two-qubit gate on (qubit n, qubit n+1). Basis index is 2*x_n + x_{n+1}.
using Gate = Eigen::Matrix4cd;

/// Sizes of a verifier instance: N qubits, the first M carry the input
/// string, R sweep cycles of N-1 nearest-neighbour steps each.
struct ProblemShape {
  int n_qubits = 2;
  int input_len = 1;
  int n_cycles = 1;

  int total_steps() const { return n_cycles * (n_qubits - 1); }
  int bonds() const { return n_qubits - 1; }

  /// Throws tiham::Error if any count is out of range.
  void validate() const;

  friend bool operator==(const ProblemShape&, const ProblemShape&) = default;
};

struct Slot {
  int cycle = 1;  // 1..R
  int bond = 1;   // 1..N-1, acts on qubits (bond, bond+1)

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Odd cycles visit bonds 1..N-1, even cycles N-1..1. Length R(N-1).
std::vector<Slot> sweep_order(const ProblemShape& shape);

/// Max-entry norm of U^dagger U - 1.
double unitarity_deviation(const Gate& u);

Gate embed_left(const Eigen::Matrix2cd& u);   // U (x) 1
Gate embed_right(const Eigen::Matrix2cd& u);  // 1 (x) U

/// The verifier circuit laid out in boustrophedon sweep slots.
/// Unset slots hold the identity. Shape is not validated on construction so
/// that validate_schedule() can report on malformed schedules.
class SweepSchedule {
 public:
  explicit SweepSchedule(ProblemShape shape);

  const ProblemShape& shape() const { return shape_; }

  const Gate& gate_at(int cycle, int bond) const;
  void set_gate(int cycle, int bond, const Gate& gate);
  const Gate& gate_at(const Slot& s) const { return gate_at(s.cycle, s.bond); }

 private:
  std::size_t slot_index(int cycle, int bond) const;

  ProblemShape shape_;
  std::vector<Gate> gates_;
};

struct PlacedGate {
  int bond = 1;
  Gate unitary = Gate::Identity();
};

/// Greedy packing of an ordered nearest-neighbour gate list into the fewest
/// sweep cycles that keep the list order along the visitation sequence.
SweepSchedule schedule_from_gate_list(const std::vector<PlacedGate>& gates,
                                      int n_qubits, int input_len);

struct Diagnostic {
  std::string message;
  Slot slot{0, 0};
  double deviation = 0.0;
};

std::vector<Diagnostic> validate_schedule(const SweepSchedule& schedule,
                                          double tol = 1e-12);

// Circuit text format:
//   shape N M [R]
//   gate <m|*> <n> <re,im> x16      (row-major)
// '#' starts a comment. Without R every gate line must use '*' and the
// gates are packed with schedule_from_gate_list.
SweepSchedule parse_circuit(std::istream& in);
SweepSchedule load_circuit(const std::string& path);
void write_circuit(std::ostream& out, const SweepSchedule& schedule);

}  // namespace tiham
