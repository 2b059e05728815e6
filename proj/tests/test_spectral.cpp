#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tiham/error.hpp"
#include "tiham/hamiltonian.hpp"
#include "tiham/history.hpp"
#include "tiham/spectral.hpp"

using namespace tiham;

namespace {

SparseMatrix sparse_of(const Eigen::MatrixXd& m) {
  return Eigen::MatrixXcd(m.cast<cplx>()).sparseView().cast<cplx>();
}

SparseMatrix identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

TEST_CASE("ground energy of small operators") {
  const SparseMatrix zero(5, 5);
  const GroundState g0 = ground_energy(zero);
  CHECK(g0.energy == doctest::Approx(0.0));
  CHECK(g0.vector.norm() == doctest::Approx(1.0));

  const GroundState g = ground_energy(sparse_of(path_laplacian(2)));
  CHECK(g.energy == doctest::Approx(0.0));
  CHECK(std::abs(g.vector(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(g.vector(0) - g.vector(1)) < 1e-12);
  CHECK(g.residual < 1e-10);

  Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(ground_energy(SparseMatrix(skew.sparseView())), Error);
}

TEST_CASE("path Laplacian spectrum and identity") {
  const auto rep = low_spectrum(sparse_of(path_laplacian(5)), 5);
  REQUIRE(rep.values.size() == 5);
  for (int j = 0; j < 5; ++j) {
    CHECK(rep.values[static_cast<std::size_t>(j)] == doctest::Approx(oracle::path_eigenvalue(5, j)).epsilon(1e-10));
    CHECK(rep.residuals[static_cast<std::size_t>(j)] < 1e-8);
  }
  CHECK(std::is_sorted(rep.values.begin(), rep.values.end()));
  CHECK(rep.method == SolverMethod::Dense);

  const auto id = low_spectrum(identity(6), 3);
  for (double v : id.values) CHECK(v == doctest::Approx(1.0));
  CHECK(id.cluster_size(id.clusters[0]) == 3);
  CHECK(id.format().find("\neig 0 1 ") != std::string::npos);

  CHECK_THROWS_AS(low_spectrum(identity(3), 4), Error);
  CHECK_THROWS_AS(low_spectrum(identity(3), 0), Error);
}

TEST_CASE("gap closed forms") {
  for (int sites : {2, 3, 5, 9}) {
    const GapResult g = gap(sparse_of(path_laplacian(sites)));
    CHECK(g.resolved);
    CHECK(g.degeneracy == 1);
    CHECK(g.gap == doctest::Approx(2.0 * (1.0 - std::cos(M_PI / sites))).epsilon(1e-10));
  }
  const GapResult flat = gap(identity(4));
  CHECK_FALSE(flat.resolved);
  CHECK(flat.degeneracy == 4);
  CHECK(flat.lambda0 == doctest::Approx(1.0));
}

TEST_CASE("iterative path agrees with dense diagonalization") {
  std::mt19937_64 rng(41);
  SolverOptions iter;
  iter.dense_threshold = 0;
  SUBCASE("random sparse Hermitian") {
    const Eigen::Index n = 300;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = u(rng) * 3;
      for (int k = 0; k < 3; ++k) {
        const Eigen::Index j = static_cast<Eigen::Index>(rng() % static_cast<unsigned>(n));
        const cplx v(u(rng), u(rng));
        if (j == i) continue;
        m(i, j) += v;
        m(j, i) += std::conj(v);
      }
    }
    const SparseMatrix s = m.sparseView();
    const auto dense = low_spectrum(s, 4);
    const auto it = low_spectrum(s, 4, iter);
    CHECK(it.method == SolverMethod::Iterative);
    CHECK(it.converged);
    for (int j = 0; j < 4; ++j) {
      CHECK(it.values[static_cast<std::size_t>(j)] == doctest::Approx(dense.values[static_cast<std::size_t>(j)]).epsilon(1e-8));
      CHECK(it.residuals[static_cast<std::size_t>(j)] < 1e-6 * std::max(1.0, norm_bound(s)));
    }
  }
  SUBCASE("degenerate assembled H_comp") {
    const ProblemShape shape{2, 1, 1};
    const auto h = assemble_ring(build_h_comp_bond(oracle::random_schedule(shape, rng)), shape);
    const auto dense = low_spectrum(h.matrix, 6);
    const auto it = low_spectrum(h.matrix, 6, iter);
    for (int j = 0; j < 6; ++j)
      CHECK(it.values[static_cast<std::size_t>(j)] == doctest::Approx(dense.values[static_cast<std::size_t>(j)]).epsilon(1e-8));
    // deterministic given the seed
    const auto again = low_spectrum(h.matrix, 6, iter);
    CHECK(again.values == it.values);
  }
}

TEST_CASE("ground space of H_comp contains the history state") {
  const ProblemShape s{2, 1, 1};
  const SweepSchedule sched(s);
  const auto h = assemble_ring(build_h_comp_bond(sched), s);
  const Eigen::MatrixXcd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.0));
  const Eigen::VectorXcd eta = to_dense(build_history_state(simulate_history(sched, {1, 0}, 1)), h.dim);
  Eigen::VectorXcd in_kernel = Eigen::VectorXcd::Zero(eta.size());
  for (Eigen::Index j = 0; j < dense.cols(); ++j) {
    if (std::abs(es.eigenvalues()(j)) > 1e-9) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(j);
    in_kernel += v * v.dot(eta);
  }
  CHECK(in_kernel.squaredNorm() >= 1.0 - 1e-9);
}

TEST_CASE("restriction to configurations and vectors") {
  std::mt19937_64 rng(43);
  const ProblemShape s{3, 1, 2};
  const SpinBasis basis(s);
  const LocalTerm form = build_h_form_bond(s);
  const auto cfg = config_index(initial_config({0, 1, 0}, 1, s), basis);
  const Eigen::MatrixXcd one = restrict(form, basis, {cfg}, false);
  REQUIRE(one.rows() == 1);
  CHECK(one(0, 0).real() == doctest::Approx(-1.0));

  // identity gates: one qubit string spans an exact path Laplacian
  const auto orbit = orbit_configs(s, 0, {1, 0, 1});
  CHECK(orbit.size() == 5);
  const Eigen::MatrixXcd lap = restrict(build_h_comp_bond(SweepSchedule(s)), basis, orbit);
  CHECK((lap - path_laplacian(5).cast<cplx>()).cwiseAbs().maxCoeff() < 1e-12);

  // random gates: the full orbit is closed and isospectral to 2^N copies of the path
  for (int r = 1; r <= 3; ++r) {
    const ProblemShape sh{3, 1, r};
    const SpinBasis b(sh);
    const auto cfgs = orbit_configs(sh, 2);
    const int sites = sh.total_steps() + 1;
    CHECK(static_cast<int>(cfgs.size()) == sites * 8);
    const Eigen::MatrixXcd hr = restrict(build_h_comp_bond(oracle::random_schedule(sh, rng)), b, cfgs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hr, Eigen::EigenvaluesOnly);
    std::vector<double> expected;
    for (int j = 0; j < sites; ++j)
      for (int c = 0; c < 8; ++c) expected.push_back(oracle::path_eigenvalue(sites, j));
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(es.eigenvalues()(static_cast<Eigen::Index>(i)) == doctest::Approx(expected[i]).epsilon(1e-9));

    const GapResult g = gap(hr);
    CHECK(g.degeneracy == 8);
    CHECK(g.gap == doctest::Approx(oracle::path_eigenvalue(sites, 1)).epsilon(1e-9));
  }

  // vector basis version agrees with the configuration version
  const auto h = assemble_ring(form, s);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(h.dim), 2);
  cols(static_cast<Eigen::Index>(orbit[0]), 0) = 1.0;
  cols(static_cast<Eigen::Index>(orbit[1]), 1) = 1.0;
  const Eigen::MatrixXcd via_vectors = restrict(h.matrix, cols);
  const Eigen::MatrixXcd via_configs = restrict(h.matrix, std::vector<ConfigIndex>{orbit[0], orbit[1]});
  CHECK((via_vectors - via_configs).cwiseAbs().maxCoeff() < 1e-14);
  cols(0, 1) = 1.0;
  CHECK_THROWS_AS(restrict(h.matrix, cols), Error);

  const SparseMatrix zero(static_cast<Eigen::Index>(h.dim), static_cast<Eigen::Index>(h.dim));
  CHECK(restrict(zero, std::vector<ConfigIndex>{orbit[0], orbit[2]}).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(restrict(build_h_comp_bond(SweepSchedule(s)), basis, {orbit[0]}, true), Error);
}

TEST_CASE("gap scaling approaches pi^2") {
  double prev = 0.0;
  for (int sites : {3, 5, 9, 17}) {
    const double scaled = gap(sparse_of(path_laplacian(sites))).gap * sites * sites;
    CHECK(scaled > prev);
    prev = scaled;
  }
  CHECK(std::abs(prev - M_PI * M_PI) / (M_PI * M_PI) < 0.05);
}

TEST_CASE("frozen configurations match an exhaustive scan") {
  std::mt19937_64 rng(47);
  for (const ProblemShape s : {ProblemShape{2, 1, 1}, ProblemShape{2, 1, 2}, ProblemShape{3, 1, 1}}) {
    const auto sched = oracle::random_schedule(s, rng);
    const SpinBasis basis(s);
    const LocalTerm comp = build_h_comp_bond(sched);
    const auto frozen = detect_frozen(sched);
    std::set<ConfigIndex> orbit;
    for (int k = 0; k <= s.n_qubits; ++k)
      for (auto c : orbit_configs(s, k)) orbit.insert(c);

    std::set<ConfigIndex> expected;
    for (ConfigIndex c = 0; c < basis.ring_dim(); ++c) {
      const RingConfig cfg = config_from_index(c, basis);
      bool well_formed = true;
      for (const auto& v : is_legal(cfg, s).violations) well_formed &= v.kind == Violation::ClockPattern;
      if (!well_formed || orbit.count(c)) continue;
      if (ring_column(comp, basis, c).empty()) expected.insert(c);
    }
    CHECK(std::set<ConfigIndex>(frozen.begin(), frozen.end()) == expected);
    CHECK_FALSE(expected.empty());
    for (auto c : frozen) {
      CHECK_FALSE(orbit.count(c));
      int heads = 0;
      for (const auto& sp : config_from_index(c, basis)) heads += sp.head ? 1 : 0;
      CHECK(heads == 1);
    }
  }
}

TEST_CASE("chain models") {
  for (int n = 2; n <= 8; ++n) {
    const int sites = n + 1;
    const Eigen::MatrixXd h = chain_model(sites, ChainKind::Engineered);
    Eigen::VectorXd v(sites);
    for (int j = 0; j < sites; ++j) v(j) = (j % 2 ? -1.0 : 1.0) * std::sqrt(oracle::binomial(n, j)) / std::pow(2.0, n / 2.0);
    CHECK(v.norm() == doctest::Approx(1.0));
    const double lambda = v.dot(h * v);
    CHECK((h * v - lambda * v).norm() < 1e-10);
  }
  const Eigen::MatrixXd u2 = chain_model(2, ChainKind::Uniform);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u2);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));
  CHECK((path_laplacian(4) - (2.0 * Eigen::MatrixXd::Identity(4, 4) + chain_model(4, ChainKind::Uniform)))
            .diagonal()
            .cwiseAbs()
            .maxCoeff() == doctest::Approx(1.0));

  // uniform chain: final ground-vector amplitude shrinks as the chain grows
  double prev = 1.0;
  for (int sites : {4, 8, 16, 32}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(chain_model(sites, ChainKind::Uniform));
    const double last = std::abs(s.eigenvectors()(sites - 1, 0));
    CHECK(last < prev);
    prev = last;
  }
  CHECK_THROWS_AS(chain_model(1, ChainKind::Uniform), Error);
}

TEST_CASE("cluster_values") {
  const auto ids = cluster_values({0.0, 1e-9, 0.5, 0.5 + 1e-9, 2.0}, 1e-7);
  CHECK(ids == std::vector<int>{0, 0, 1, 1, 2});
}
