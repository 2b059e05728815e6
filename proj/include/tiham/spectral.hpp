#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tiham/hamiltonian.hpp"
#include "tiham/spin_basis.hpp"

namespace tiham {

struct SolverOptions {
  ConfigIndex dense_threshold = 4096;
  int max_matvecs = 10000;
  double tol = 1e-8;         // residual target, relative to max(1, ||H||)
  std::uint64_t seed = 1;    // starting vectors for the iterative path
  int krylov_dim = 80;
  double cluster_tol = -1;   // < 0: 1e-7 * max(1, ||H||)
};

enum class SolverMethod { Dense, Iterative };

struct SpectralReport {
  int k = 0;
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // ||H v - lambda v||
  std::vector<int> clusters;      // cluster id per eigenvalue
  SolverMethod method = SolverMethod::Dense;
  bool restricted = false;
  bool converged = true;
  Eigen::MatrixXcd vectors;       // columns

  int cluster_size(int id) const;
  /// "eig <index> <value> <residual> <cluster>" lines.
  std::string format() const;
};

using MatVec = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

/// Max absolute row sum; an upper bound on the spectral norm.
double norm_bound(const SparseMatrix& h);

SpectralReport low_spectrum(const SparseMatrix& h, int k, const SolverOptions& opts = {});
SpectralReport low_spectrum(const Eigen::MatrixXcd& h, int k, const SolverOptions& opts = {});

/// Lanczos with full reorthogonalization, explicit restarts and locking:
/// eigenpairs are found one at a time against the already-locked ones.
SpectralReport lanczos_lowest(const MatVec& op, Eigen::Index dim, int k, double norm_estimate,
                              const SolverOptions& opts);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;
  SolverMethod method = SolverMethod::Dense;
};

GroundState ground_energy(const SparseMatrix& h, const SolverOptions& opts = {});

struct GapResult {
  double lambda0 = 0.0;
  double gap = 0.0;          // 0 when unresolved
  int degeneracy = 0;        // size of the lowest cluster
  bool resolved = false;     // a second cluster was found
};

GapResult gap(const SparseMatrix& h, const SolverOptions& opts = {});
GapResult gap(const Eigen::MatrixXcd& h, const SolverOptions& opts = {});

/// <b_i|H|b_j> for orthonormal columns b.
Eigen::MatrixXcd restrict(const SparseMatrix& h, const Eigen::MatrixXcd& basis, double tol = 1e-10);
/// Matrix elements between the listed configurations.
Eigen::MatrixXcd restrict(const SparseMatrix& h, const std::vector<ConfigIndex>& configs);
/// Same, generated bond by bond without assembling the ring operator.
/// With require_closed, any amplitude leaving the subspace is an error.
Eigen::MatrixXcd restrict(const LocalTerm& term, const SpinBasis& basis, const std::vector<ConfigIndex>& configs,
                          bool require_closed = true);

/// Legal-orbit configurations for one head site, ordered step-major then by
/// qubit string (qubit 1 most significant): (T+1) * 2^N entries.
std::vector<ConfigIndex> orbit_configs(const ProblemShape& shape, int head_site = 0);
/// The T+1 configurations of a single qubit string.
std::vector<ConfigIndex> orbit_configs(const ProblemShape& shape, int head_site, const std::vector<int>& bits);

/// Single-head, correctly ordered configurations outside the legal orbit on
/// which no clock move acts: exact zero modes of H_comp.
std::vector<ConfigIndex> detect_frozen(const SweepSchedule& schedule);

enum class ChainKind { Uniform, Engineered };

/// Path-graph Laplacian on L sites.
Eigen::MatrixXd path_laplacian(int sites);
/// Uniform: -1 hopping; engineered: -sqrt(n (L-n)) on bond n.
Eigen::MatrixXd chain_model(int sites, ChainKind kind);

std::vector<int> cluster_values(const std::vector<double>& sorted, double tol);

}  // namespace tiham
