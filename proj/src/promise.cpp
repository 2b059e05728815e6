#include "tiham/promise.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tiham/history.hpp"

namespace tiham {

LemmaBounds projection_bounds(double lambda_restricted, double norm_h1, double j) {
  if (norm_h1 < 0) throw Error("norm of H1 must be non-negative");
  if (norm_h1 == 0.0) return {lambda_restricted, 0.0, j, lambda_restricted, lambda_restricted};
  if (!(j > 2.0 * norm_h1)) {
    std::ostringstream msg;
    msg << "projection lemma hypothesis violated: J = " << j << " <= 2||H1|| = " << 2.0 * norm_h1;
    throw Error(msg.str());
  }
  return {lambda_restricted, norm_h1, j, lambda_restricted - norm_h1 * norm_h1 / (j - 2.0 * norm_h1),
          lambda_restricted};
}

double choose_j(double norm_h1) {
  if (norm_h1 < 0) throw Error("norm of H1 must be non-negative");
  return 8.0 * norm_h1 * norm_h1 + 2.0 * norm_h1;
}

double choose_alpha(const ProblemShape& shape, double c_est) {
  if (!(c_est > 0)) throw Error("gap constant estimate must be positive");
  const double t = shape.total_steps();
  return 2.0 * c_est / (t * t);
}

std::string LemmaCheckReport::format() const {
  std::ostringstream out;
  out << "trials " << trials << "\nviolations " << violations << "\nworst_lower_margin " << std::setprecision(6)
      << worst_lower_margin << "\nworst_upper_margin " << worst_upper_margin << "\nmax_slack_error "
      << max_slack_error << '\n';
  return out.str();
}

namespace {

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
}

double min_eig(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Eigen::MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

LemmaCheckReport verify_lemma_numeric(std::uint64_t seed, int trials, int dim) {
  if (dim < 2) throw Error("lemma check needs dim >= 2");
  LemmaCheckReport rep;
  rep.trials = trials;
  rep.worst_lower_margin = std::numeric_limits<double>::infinity();
  rep.worst_upper_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick_s(1, dim - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> g;

    const int s = pick_s(rng);
    const Eigen::MatrixXcd q = random_unitary(rng, dim);

    Eigen::MatrixXcd h1(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) h1(i, j) = cplx(g(rng), g(rng));
    h1 = (h1 + h1.adjoint()).eval();
    const double target_norm = 0.05 + 0.95 * unit(rng);
    h1 *= target_norm / spectral_norm(h1);
    const double nu = spectral_norm(h1);

    const double j = choose_j(nu);
    Eigen::VectorXd h2_diag = Eigen::VectorXd::Zero(dim);
    for (int i = s; i < dim; ++i) h2_diag(i) = j * (1.0 + unit(rng));
    const Eigen::MatrixXcd h2 = q * h2_diag.cast<cplx>().asDiagonal() * q.adjoint();

    const Eigen::MatrixXcd s_basis = q.leftCols(s);
    const double lambda_s = min_eig(s_basis.adjoint() * h1 * s_basis);
    const LemmaBounds b = projection_bounds(lambda_s, nu, j);
    const double lambda = min_eig(h1 + h2);

    const double lo_margin = lambda - b.lower;
    const double up_margin = b.upper - lambda;
    if (lo_margin < -1e-10 || up_margin < -1e-10) ++rep.violations;
    rep.worst_lower_margin = std::min(rep.worst_lower_margin, lo_margin);
    rep.worst_upper_margin = std::min(rep.worst_upper_margin, up_margin);
    rep.max_slack_error = std::max(rep.max_slack_error, std::abs((b.upper - b.lower) - 0.125));
  }
  return rep;
}

void PromiseParameters::validate() const {
  if (!(b > a)) throw Error("promise thresholds need b > a");
  if (!(epsilon >= 0 && epsilon < 0.5)) throw Error("epsilon must lie in [0, 1/2)");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::OutsidePromise: return "OutsidePromise";
  }
  return "?";
}

std::string PromiseDecision::format(const PromiseParameters& p) const {
  std::ostringstream out;
  out << std::setprecision(12) << "verdict " << to_string(verdict) << " lambda0 " << lambda0 << " a " << p.a
      << " b " << p.b << " margin " << margin;
  return out.str();
}

PromiseDecision decide(double lambda0, const PromiseParameters& params) {
  params.validate();
  PromiseDecision d;
  d.lambda0 = lambda0;
  if (lambda0 <= params.a) {
    d.verdict = Verdict::Yes;
    d.margin = params.a - lambda0;
  } else if (lambda0 > params.b) {
    d.verdict = Verdict::No;
    d.margin = lambda0 - params.b;
  } else {
    d.verdict = Verdict::OutsidePromise;
    d.margin = -std::min(lambda0 - params.a, params.b - lambda0);
  }
  return d;
}

PromiseDecision decide(const SparseMatrix& h, const PromiseParameters& params, const SolverOptions& opts) {
  const GroundState gs = ground_energy(h, opts);
  PromiseDecision d = decide(gs.energy, params);
  d.residual = gs.residual;
  return d;
}

namespace {

struct OrbitParts {
  Eigen::MatrixXcd input, form, comp, output;
};

OrbitParts orbit_parts(const HamiltonianParts& parts, const ProblemShape& shape) {
  const SpinBasis basis(shape);
  const auto configs = orbit_configs(shape, 0);
  return {restrict(parts.input, basis, configs), restrict(parts.form, basis, configs),
          restrict(parts.comp, basis, configs), restrict(parts.output, basis, configs)};
}

Eigen::MatrixXcd zero_space(const Eigen::MatrixXcd& h, double tol, double* next_gap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const auto& ev = es.eigenvalues();
  Eigen::Index count = 0;
  while (count < ev.size() && std::abs(ev(count) - ev(0)) <= tol) ++count;
  if (next_gap) *next_gap = count < ev.size() ? ev(count) - ev(0) : 0.0;
  return es.eigenvectors().leftCols(count);
}

InstanceEnergies measure(const SweepSchedule& schedule, const CouplingConstants& c, double orbit_gap,
                         const SeparationOptions& opts) {
  const ProblemShape& shape = schedule.shape();
  const HamiltonianParts parts = build_parts(schedule);
  const OrbitParts op = orbit_parts(parts, shape);
  InstanceEnergies e;

  const Eigen::MatrixXcd h1 = c.j1 * op.input + c.w_out * op.output;
  const Eigen::MatrixXcd h = h1 + c.j2 * (c.alpha * op.form + op.comp);
  e.lambda0_orbit = min_eig(h);

  // H2 = J2 (alpha H_form + H_comp), shifted so its ground space is a null space
  const double shift = c.j2 * c.alpha;
  const double j = c.j2 * orbit_gap;
  const Eigen::MatrixXcd s_basis = zero_space(op.comp, 1e-9, nullptr);
  const Eigen::MatrixXcd h1_s = s_basis.adjoint() * h1 * s_basis;
  const double norm_h1 = spectral_norm(h1);
  e.lemma = projection_bounds(min_eig(h1_s), norm_h1, j);
  const double lambda_shifted = e.lambda0_orbit + shift;
  e.lemma_holds = e.lemma.lower - 1e-9 <= lambda_shifted && lambda_shifted <= e.lemma.upper + 1e-9;

  // second application inside S: J1 H_input|S against w_out H_output|S
  const Eigen::MatrixXcd in_s = c.j1 * (s_basis.adjoint() * op.input * s_basis);
  const Eigen::MatrixXcd out_s = c.w_out * (s_basis.adjoint() * op.output * s_basis);
  double inner_gap = 0.0;
  const Eigen::MatrixXcd s2 = zero_space(in_s, 1e-9, &inner_gap);
  const double norm_out = spectral_norm(out_s);
  e.nested_hypothesis = inner_gap > 2.0 * norm_out || norm_out == 0.0;
  if (e.nested_hypothesis)
    e.nested = projection_bounds(min_eig(s2.adjoint() * out_s * s2), norm_out, inner_gap);

  const SpinBasis basis(shape);
  const auto hist = simulate_history(schedule, opts.witness, 0);
  const SparseState eta = build_history_state(hist);
  const auto ex = expectations(eta, basis, {&parts.input, &parts.form, &parts.comp, &parts.output});
  e.e_input = ex[0].value;
  e.e_form = ex[1].value;
  e.e_comp = ex[2].value;
  e.e_output = ex[3].value;
  e.variational = c.j1 * e.e_input + c.j2 * (c.alpha * e.e_form + e.e_comp) + c.w_out * e.e_output;
  e.variational_alt_grouping =
      c.j1 * (e.e_input - 1.0) + c.j2 * (c.alpha * (e.e_form + 1.0) + e.e_comp) + c.w_out * e.e_output;

  if (opts.full_space && basis.ring_dim() <= opts.solver.dense_threshold) {
    const RingOperator full = assemble(parts, c, shape);
    e.lambda0_full = ground_energy(full.matrix, opts.solver).energy;
    const auto frozen = detect_frozen(schedule);
    e.frozen_count = frozen.size();
    std::vector<ConfigIndex> keep;
    std::size_t f = 0;
    for (ConfigIndex idx = 0; idx < full.dim; ++idx) {
      while (f < frozen.size() && frozen[f] < idx) ++f;
      if (f < frozen.size() && frozen[f] == idx) continue;
      keep.push_back(idx);
    }
    e.lambda0_full_unfrozen = min_eig(restrict(full.matrix, keep));
  }
  return e;
}

}  // namespace

ResolvedConstants resolve_constants(const std::vector<const SweepSchedule*>& schedules, double j1,
                                    std::optional<double> j2, std::optional<double> alpha) {
  if (schedules.empty()) throw Error("resolve_constants needs at least one schedule");
  const ProblemShape& shape = schedules.front()->shape();
  ResolvedConstants out;
  CouplingConstants& c = out.constants;
  c.j1 = j1;
  c.w_out = shape.total_steps();
  for (const SweepSchedule* s : schedules) {
    if (!(s->shape() == shape)) throw Error("schedules differ in shape");
    const OrbitParts op = orbit_parts(build_parts(*s), shape);
    if (s == schedules.front()) {
      const GapResult g = gap(op.comp);
      if (!g.resolved) throw Error("could not resolve the clock gap");
      out.orbit_gap = g.gap;
    }
    out.norm_h1 = std::max(out.norm_h1, spectral_norm(c.j1 * op.input + c.w_out * op.output));
  }
  const double t = shape.total_steps();
  c.alpha = alpha ? *alpha : choose_alpha(shape, out.orbit_gap * t * t);
  c.j2 = j2 ? *j2 : choose_j(out.norm_h1) / out.orbit_gap;
  c.validate();
  return out;
}

SeparationReport separation_experiment(const SweepSchedule& accepting, const SweepSchedule& rejecting,
                                       const SeparationOptions& opts) {
  const ProblemShape& shape = accepting.shape();
  if (!(rejecting.shape() == shape)) throw Error("accepting and rejecting schedules differ in shape");
  if (static_cast<int>(opts.witness.size()) != shape.n_qubits) throw Error("witness length does not match N");

  SeparationReport rep;
  const ResolvedConstants rc = resolve_constants({&accepting, &rejecting}, opts.j1, opts.j2, opts.alpha);
  const CouplingConstants& c = rc.constants;
  rep.orbit_gap = rc.orbit_gap;
  rep.norm_h1 = rc.norm_h1;
  rep.constants = c;

  rep.yes = measure(accepting, c, rc.orbit_gap, opts);
  rep.no = measure(rejecting, c, rc.orbit_gap, opts);
  rep.separation_orbit = rep.no.lambda0_orbit - rep.yes.lambda0_orbit;
  if (rep.yes.lambda0_full_unfrozen && rep.no.lambda0_full_unfrozen)
    rep.separation_full_unfrozen = *rep.no.lambda0_full_unfrozen - *rep.yes.lambda0_full_unfrozen;
  return rep;
}

std::string SeparationReport::format() const {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "constants J1 " << constants.j1 << " J2 " << constants.j2 << " alpha " << constants.alpha << " w_out "
      << constants.w_out << '\n';
  out << "orbit_gap " << orbit_gap << " norm_H1 " << norm_h1 << '\n';
  auto row = [&out](const char* tag, const InstanceEnergies& e) {
    out << tag << " lambda0_orbit " << e.lambda0_orbit;
    if (e.lambda0_full) out << " lambda0_full " << *e.lambda0_full;
    if (e.lambda0_full_unfrozen) out << " lambda0_full_unfrozen " << *e.lambda0_full_unfrozen << " frozen " << e.frozen_count;
    out << '\n';
    out << tag << " variational " << e.variational << " alt_grouping " << e.variational_alt_grouping << " E_input "
        << e.e_input << " E_form " << e.e_form << " E_comp " << (std::abs(e.e_comp) < 1e-14 ? 0.0 : e.e_comp)
        << " E_output " << e.e_output << '\n';
    out << tag << " lemma lower " << e.lemma.lower << " upper " << e.lemma.upper << " J " << e.lemma.j << " holds "
        << (e.lemma_holds ? 1 : 0) << " nested " << (e.nested_hypothesis ? 1 : 0);
    if (e.nested) out << " nested_lower " << e.nested->lower << " nested_upper " << e.nested->upper;
    out << '\n';
  };
  row("yes", yes);
  row("no", no);
  out << "separation_orbit " << separation_orbit;
  if (separation_full_unfrozen) out << " separation_full_unfrozen " << *separation_full_unfrozen;
  out << '\n';
  return out.str();
}

}  // namespace tiham
