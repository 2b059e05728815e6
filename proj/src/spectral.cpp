#include "tiham/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace tiham {

int SpectralReport::cluster_size(int id) const {
  return static_cast<int>(std::count(clusters.begin(), clusters.end(), id));
}

std::string SpectralReport::format() const {
  std::ostringstream out;
  out << "method " << (method == SolverMethod::Dense ? "dense" : "iterative") << " k " << k
      << " restricted " << (restricted ? 1 : 0) << " converged " << (converged ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::abs(values[i]) < 1e-13 ? 0.0 : values[i];
    out << "eig " << i << ' ' << std::setprecision(12) << v << ' ' << std::setprecision(3) << residuals[i]
        << ' ' << clusters[i] << '\n';
  }
  return out.str();
}

double norm_bound(const SparseMatrix& h) {
  // column sums; equal to row sums for Hermitian input
  double worst = 0.0;
  for (std::int64_t k = 0; k < h.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) s += std::abs(it.value());
    worst = std::max(worst, s);
  }
  return worst;
}

std::vector<int> cluster_values(const std::vector<double>& sorted, double tol) {
  std::vector<int> ids(sorted.size(), 0);
  for (std::size_t i = 1; i < sorted.size(); ++i)
    ids[i] = ids[i - 1] + (sorted[i] - sorted[i - 1] > tol ? 1 : 0);
  return ids;
}

namespace {

double cluster_tol_for(const SolverOptions& opts, double scale) {
  return opts.cluster_tol >= 0 ? opts.cluster_tol : 1e-7 * std::max(1.0, scale);
}

void check_hermitian(const Eigen::MatrixXcd& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw Error("operator is not Hermitian");
}

void check_hermitian(const SparseMatrix& h) {
  const SparseMatrix diff = SparseMatrix(h.adjoint()) - h;
  double worst = 0.0;
  for (std::int64_t k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  if (worst > 1e-10 * std::max(1.0, norm_bound(h))) throw Error("operator is not Hermitian");
}

SpectralReport dense_report(const Eigen::MatrixXcd& h, int k, const SolverOptions& opts) {
  check_hermitian(h);
  const Eigen::Index dim = h.rows();
  if (k < 1 || k > dim) throw Error("requested eigenvalue count out of range");
  SpectralReport rep;
  rep.k = k;
  rep.method = SolverMethod::Dense;
  if (dim == 0) return rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.vectors = es.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    rep.values.push_back(es.eigenvalues()(i));
    rep.residuals.push_back((h * rep.vectors.col(i) - rep.values.back() * rep.vectors.col(i)).norm());
  }
  rep.clusters = cluster_values(rep.values, cluster_tol_for(opts, scale));
  rep.converged = true;
  return rep;
}

}  // namespace

SpectralReport low_spectrum(const Eigen::MatrixXcd& h, int k, const SolverOptions& opts) {
  return dense_report(h, k, opts);
}

SpectralReport lanczos_lowest(const MatVec& op, Eigen::Index dim, int k, double norm_estimate,
                              const SolverOptions& opts) {
  if (k < 1 || k > dim) throw Error("requested eigenvalue count out of range");
  const double scale = std::max(1.0, norm_estimate);
  const double target = opts.tol * scale;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd locked(dim, 0);
  std::vector<double> values;
  int matvecs = 0;
  bool all_converged = true;

  auto deflate = [&](Eigen::VectorXcd& v) {
    for (int pass = 0; pass < 2; ++pass)
      if (locked.cols() > 0) v -= locked * (locked.adjoint() * v);
  };

  Eigen::VectorXcd w(dim);
  for (int found = 0; found < k; ++found) {
    Eigen::VectorXcd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = cplx(normal(rng), normal(rng));
    deflate(x);
    x.normalize();

    double theta = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    const Eigen::Index room = dim - locked.cols();
    while (true) {
      const Eigen::Index m = std::min<Eigen::Index>(opts.krylov_dim, room);
      Eigen::MatrixXcd basis(dim, m);
      std::vector<double> alpha, beta;
      basis.col(0) = x;
      Eigen::Index size = m;
      bool invariant = false;
      for (Eigen::Index j = 0; j < m; ++j) {
        op(basis.col(j), w);
        ++matvecs;
        deflate(w);
        const double a = basis.col(j).dot(w).real();
        alpha.push_back(a);
        w -= a * basis.col(j);
        if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
          w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
          deflate(w);
        }
        const double b = w.norm();
        if (j + 1 == m || b < 1e-12 * scale) {
          size = j + 1;
          invariant = b < 1e-12 * scale;
          break;
        }
        beta.push_back(b);
        basis.col(j + 1) = w / b;
      }

      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(size, size);
      for (Eigen::Index i = 0; i < size; ++i) {
        tri(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < size) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      theta = es.eigenvalues()(0);
      x = basis.leftCols(size) * es.eigenvectors().col(0).cast<cplx>();
      deflate(x);
      x.normalize();

      op(x, w);
      ++matvecs;
      residual = (w - theta * x).norm();
      if (residual <= target || invariant) break;
      if (matvecs >= opts.max_matvecs) {
        all_converged = false;
        break;
      }
    }
    if (residual > target) all_converged = false;
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = x;
    values.push_back(theta);
  }

  // order ascending; locking normally already does this
  std::vector<int> perm(values.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return values[a] < values[b]; });

  SpectralReport rep;
  rep.k = k;
  rep.method = SolverMethod::Iterative;
  rep.vectors.resize(dim, k);
  for (int i = 0; i < k; ++i) {
    const int src = perm[static_cast<std::size_t>(i)];
    rep.values.push_back(values[static_cast<std::size_t>(src)]);
    rep.vectors.col(i) = locked.col(src);
    op(rep.vectors.col(i), w);
    rep.residuals.push_back((w - rep.values.back() * rep.vectors.col(i)).norm());
  }
  rep.clusters = cluster_values(rep.values, cluster_tol_for(opts, norm_estimate));
  rep.converged = all_converged;
  return rep;
}

SpectralReport low_spectrum(const SparseMatrix& h, int k, const SolverOptions& opts) {
  const auto dim = static_cast<ConfigIndex>(h.rows());
  if (dim <= opts.dense_threshold) return dense_report(Eigen::MatrixXcd(h), k, opts);
  check_hermitian(h);
  const MatVec op = [&h](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out.noalias() = h * in; };
  SpectralReport rep = lanczos_lowest(op, h.rows(), k, norm_bound(h), opts);
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "iterative eigensolver did not converge; best lambda0 " << rep.values.front() << " residual "
        << rep.residuals.front();
    throw Error(msg.str());
  }
  return rep;
}

GroundState ground_energy(const SparseMatrix& h, const SolverOptions& opts) {
  const SpectralReport rep = low_spectrum(h, 1, opts);
  return {rep.values.front(), rep.vectors.col(0), rep.residuals.front(), rep.method};
}

namespace {

GapResult gap_from(const SpectralReport& rep) {
  GapResult g;
  g.lambda0 = rep.values.front();
  g.degeneracy = rep.cluster_size(0);
  const auto next = std::find(rep.clusters.begin(), rep.clusters.end(), 1);
  if (next != rep.clusters.end()) {
    g.resolved = true;
    g.gap = rep.values[static_cast<std::size_t>(next - rep.clusters.begin())] - g.lambda0;
  }
  return g;
}

}  // namespace

GapResult gap(const Eigen::MatrixXcd& h, const SolverOptions& opts) {
  return gap_from(dense_report(h, static_cast<int>(h.rows()), opts));
}

GapResult gap(const SparseMatrix& h, const SolverOptions& opts) {
  const auto dim = static_cast<int>(std::min<std::int64_t>(h.rows(), std::numeric_limits<int>::max()));
  if (static_cast<ConfigIndex>(dim) <= opts.dense_threshold) return gap(Eigen::MatrixXcd(h), opts);
  constexpr int kCap = 256;
  int k = std::min(dim, 6);
  while (true) {
    const GapResult g = gap_from(low_spectrum(h, k, opts));
    if (g.resolved || k >= dim || k >= kCap) return g;
    k = std::min({dim, 2 * k, kCap});
  }
}

Eigen::MatrixXcd restrict(const SparseMatrix& h, const Eigen::MatrixXcd& basis, double tol) {
  if (basis.rows() != h.rows()) throw Error("basis dimension mismatch");
  const Eigen::MatrixXcd gram = basis.adjoint() * basis;
  if ((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > tol)
    throw Error("restriction basis is not orthonormal");
  return basis.adjoint() * (h * basis);
}

Eigen::MatrixXcd restrict(const SparseMatrix& h, const std::vector<ConfigIndex>& configs) {
  std::unordered_map<ConfigIndex, Eigen::Index> pos;
  for (std::size_t i = 0; i < configs.size(); ++i)
    if (!pos.emplace(configs[i], static_cast<Eigen::Index>(i)).second) throw Error("duplicate configuration in basis");
  const auto n = static_cast<Eigen::Index>(configs.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto col = static_cast<std::int64_t>(configs[static_cast<std::size_t>(j)]);
    if (col >= h.cols()) throw Error("configuration outside operator dimension");
    for (SparseMatrix::InnerIterator it(h, col); it; ++it)
      if (auto f = pos.find(static_cast<ConfigIndex>(it.row())); f != pos.end()) out(f->second, j) = it.value();
  }
  return out;
}

Eigen::MatrixXcd restrict(const LocalTerm& term, const SpinBasis& basis, const std::vector<ConfigIndex>& configs,
                          bool require_closed) {
  std::unordered_map<ConfigIndex, Eigen::Index> pos;
  for (std::size_t i = 0; i < configs.size(); ++i)
    if (!pos.emplace(configs[i], static_cast<Eigen::Index>(i)).second) throw Error("duplicate configuration in basis");
  const auto n = static_cast<Eigen::Index>(configs.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const auto& [row, v] : ring_column(term, basis, configs[static_cast<std::size_t>(j)])) {
      const auto f = pos.find(row);
      if (f == pos.end()) {
        if (require_closed) throw Error("operator " + term.name + " leaves the restriction subspace");
        continue;
      }
      out(f->second, j) = v;
    }
  }
  return out;
}

std::vector<ConfigIndex> orbit_configs(const ProblemShape& shape, int head_site, const std::vector<int>& bits) {
  const SpinBasis basis(shape);
  const int n = shape.n_qubits;
  std::vector<ConfigIndex> out;
  for (int t = 0; t <= shape.total_steps(); ++t) {
    const ClockPattern p = clock_descriptor(shape, t).pattern;
    RingConfig c = initial_config(bits, head_site, shape);
    for (int j = 1; j <= n; ++j) c[static_cast<std::size_t>((head_site + j) % (n + 1))].cycle = p[static_cast<std::size_t>(j - 1)];
    out.push_back(config_index(c, basis));
  }
  return out;
}

std::vector<ConfigIndex> orbit_configs(const ProblemShape& shape, int head_site) {
  const int n = shape.n_qubits;
  std::vector<std::vector<ConfigIndex>> per_bits;
  for (int s = 0; s < (1 << n); ++s) {
    std::vector<int> bits(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (s >> (n - 1 - j)) & 1;
    per_bits.push_back(orbit_configs(shape, head_site, bits));
  }
  std::vector<ConfigIndex> out;
  for (int t = 0; t <= shape.total_steps(); ++t)
    for (const auto& v : per_bits) out.push_back(v[static_cast<std::size_t>(t)]);
  return out;
}

std::vector<ConfigIndex> detect_frozen(const SweepSchedule& schedule) {
  const ProblemShape& shape = schedule.shape();
  const SpinBasis basis(shape);
  const LocalTerm comp = build_h_comp_bond(schedule);
  const int n = shape.n_qubits;
  const int labels = basis.labels();
  long patterns = 1;
  for (int j = 0; j < n; ++j) patterns *= labels;

  std::vector<ConfigIndex> out;
  for (int head = 0; head <= n; ++head) {
    for (long code = 0; code < patterns; ++code) {
      ClockPattern p(static_cast<std::size_t>(n));
      long rest = code;
      for (int j = 0; j < n; ++j) {
        p[static_cast<std::size_t>(j)] = static_cast<int>(rest % labels);
        rest /= labels;
      }
      if (step_of_pattern(shape, p) >= 0) continue;
      for (int s = 0; s < (1 << n); ++s) {
        RingConfig c(static_cast<std::size_t>(n + 1));
        c[static_cast<std::size_t>(head)] = SpinState::Head();
        for (int j = 1; j <= n; ++j)
          c[static_cast<std::size_t>((head + j) % (n + 1))] =
              SpinState::Data((s >> (n - j)) & 1, p[static_cast<std::size_t>(j - 1)], j);
        const ConfigIndex idx = config_index(c, basis);
        if (ring_column(comp, basis, idx).empty()) out.push_back(idx);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd path_laplacian(int sites) {
  if (sites < 1) throw Error("path needs at least one site");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i + 1 < sites; ++i) {
    l(i, i) += 1.0;
    l(i + 1, i + 1) += 1.0;
    l(i, i + 1) = l(i + 1, i) = -1.0;
  }
  return l;
}

Eigen::MatrixXd chain_model(int sites, ChainKind kind) {
  if (sites < 2) throw Error("chain needs at least two sites");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sites, sites);
  for (int n = 1; n < sites; ++n) {
    const double j = kind == ChainKind::Uniform ? 1.0 : std::sqrt(static_cast<double>(n) * (sites - n));
    h(n - 1, n) = h(n, n - 1) = -j;
  }
  return h;
}

}  // namespace tiham
