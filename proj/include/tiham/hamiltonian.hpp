#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "tiham/circuit.hpp"
#include "tiham/spin_basis.hpp"

namespace tiham {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

/// Hermitian operator on one ordered bond (left site, right site), stored
/// as a d^2 x d^2 sparse matrix with local index left*d + right.
struct LocalTerm {
  std::string name;
  int local_dim = 0;
  SparseMatrix matrix;

  double hermiticity_residual() const;
  /// Exact 2-norm via dense diagonalization of the d^2 x d^2 matrix.
  double norm() const;
};

struct CouplingConstants {
  double j1 = 1.0;
  double j2 = 1.0;
  double alpha = 1.0;
  double w_out = 1.0;  // normally R(N-1)

  void validate() const;
};

/// Sparse operator on the full ring of N+1 qudits.
struct RingOperator {
  ProblemShape shape;
  int local_dim = 0;
  ConfigIndex dim = 0;
  SparseMatrix matrix;
  std::string provenance;

  double hermiticity_residual() const;
};

// Hop families derived from clock_transitions(); each move contributes the
// PSD edge operator P_before + P_after - (W|after><before| + h.c.), W = gate.
LocalTerm build_h_comp_bond(const SweepSchedule& schedule);
// Sum over ancilla positions n > M of |1,0,n><1,0,n| on the left site.
LocalTerm build_h_input_bond(const ProblemShape& shape);
LocalTerm build_h_form_bond(const ProblemShape& shape);
// |1,R,1><1,R,1| on the left site times the projector onto position 2 at
// its final label on the right site.
LocalTerm build_h_output_bond(const ProblemShape& shape);

struct HamiltonianParts {
  LocalTerm comp;
  LocalTerm input;
  LocalTerm form;
  LocalTerm output;
};

HamiltonianParts build_parts(const SweepSchedule& schedule);

/// Weighted sum of local terms with equal dimension.
LocalTerm combine(const std::vector<std::pair<double, const LocalTerm*>>& terms, std::string name);

/// J1 h_in + J2 (alpha h_form + h_comp) + w_out h_out.
LocalTerm total_bond_term(const HamiltonianParts& parts, const CouplingConstants& c);

/// Nonzero entries (row config, value) of column `col` of the ring sum of
/// `term` over all N+1 bonds. Entries for equal rows are merged.
std::vector<std::pair<ConfigIndex, cplx>> ring_column(const LocalTerm& term, const SpinBasis& basis,
                                                      ConfigIndex col);

inline constexpr ConfigIndex kDefaultDimensionCap = ConfigIndex{1} << 24;

RingOperator assemble_ring(const LocalTerm& term, const ProblemShape& shape,
                           ConfigIndex cap = kDefaultDimensionCap);
RingOperator assemble(const HamiltonianParts& parts, const CouplingConstants& c,
                      const ProblemShape& shape, ConfigIndex cap = kDefaultDimensionCap);

/// Permutation moving the spin on site i to site i+1 mod N+1.
RingOperator build_shift_operator(const ProblemShape& shape, ConfigIndex cap = kDefaultDimensionCap);

/// max |(SH - HS)_{ij}|.
double check_translation_invariance(const RingOperator& h, const RingOperator& shift);

// Triplet export: "% dim <D> nnz <K> hermitian" then "row col re im".
void write_triplets(std::ostream& out, const RingOperator& op);
SparseMatrix read_triplets(std::istream& in);

}  // namespace tiham
