#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tiham/circuit.hpp"

namespace tiham {

/// One qudit level: the read/write head, or a data triple
/// (qubit bit, clock label 0..max_label, position 1..N).
struct SpinState {
  bool head = false;
  int bit = 0;
  int cycle = 0;
  int position = 1;

  static SpinState Head() { return {true, 0, 0, 0}; }
  static SpinState Data(int bit, int cycle, int position) { return {false, bit, cycle, position}; }

  friend bool operator==(const SpinState&, const SpinState&) = default;
};

std::string to_string(const SpinState& s);

using ConfigIndex = std::uint64_t;

/// Largest clock label: a label counts how often the sweep has touched
/// that spin, so R for N = 2 and 2R otherwise.
int max_label(const ProblemShape& shape);

// Level codec: Head -> 0, Data(x,y,z) -> 1 + x + 2*(y + L*(z-1)), L = max_label+1.
class SpinBasis {
 public:
  explicit SpinBasis(ProblemShape shape);

  const ProblemShape& shape() const { return shape_; }
  int local_dim() const { return dim_; }
  int labels() const { return labels_; }
  int sites() const { return shape_.n_qubits + 1; }

  int encode(const SpinState& s) const;
  SpinState decode(int level) const;

  /// d^(N+1); throws if it does not fit in 63 bits.
  ConfigIndex ring_dim() const;

 private:
  ProblemShape shape_;
  int labels_;
  int dim_;
};

/// Ring of N+1 spins, site 0 first.
using RingConfig = std::vector<SpinState>;

std::string to_string(const RingConfig& c);

/// Site 0 is the most significant digit.
ConfigIndex config_index(const RingConfig& c, const SpinBasis& basis);
RingConfig config_from_index(ConfigIndex idx, const SpinBasis& basis);

/// Head at site k, data (x_j, 0, j) at site k+j mod N+1.
RingConfig initial_config(const std::vector<int>& bits, int head_site, const ProblemShape& shape);

/// Clock label per position (index j holds position j+1).
using ClockPattern = std::vector<int>;

struct ClockDescriptor {
  int step = 0;   // t in 0..T
  int cycle = 0;  // cycle currently being swept, 0 before the first step
  int wall = 0;   // bonds completed in that cycle
  ClockPattern pattern;
};

/// Label of each position after the first t slots of the sweep.
ClockDescriptor clock_descriptor(const ProblemShape& shape, int step);

// Every move advances both spins of its bond by one label.
enum class TransitionFamily {
  Opening,    // the very first slot
  Turnaround, // first slot of a later cycle, same end bond as the last move
  Rightward,
  Leftward,
};

const char* to_string(TransitionFamily f);

/// One local clock move on the bond (position p, position p+1).
struct ClockTransition {
  Slot slot;
  int left_position = 1;
  std::array<int, 2> before{};
  std::array<int, 2> after{};
  TransitionFamily family = TransitionFamily::Opening;
};

/// All local clock moves, one per schedule slot, listed in visitation order.
std::vector<ClockTransition> clock_transitions(const ProblemShape& shape);

/// Breadth-first closure of the clock moves from the all-zero pattern.
/// Throws if the closure is not a path of exactly T+1 patterns or if it
/// disagrees with clock_descriptor().
std::vector<ClockDescriptor> enumerate_legal_orbit(const ProblemShape& shape);

enum class Violation { HeadCount, HeadAdjacency, PositionIncrement, ClockPattern };

struct LegalityViolation {
  Violation kind;
  int site = -1;  // ring site where the offending pair/spin starts
  std::string detail;
};

struct Legality {
  bool legal = true;
  std::vector<LegalityViolation> violations;
};

Legality is_legal(const RingConfig& config, const ProblemShape& shape);

/// Step t whose pattern equals the given one, or -1.
int step_of_pattern(const ProblemShape& shape, const ClockPattern& pattern);

}  // namespace tiham
