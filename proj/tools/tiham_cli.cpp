#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "tiham/error.hpp"
#include "tiham/hamiltonian.hpp"
#include "tiham/history.hpp"
#include "tiham/promise.hpp"
#include "tiham/spectral.hpp"

using namespace tiham;

namespace {

struct RunConfig {
  std::string circuit;
  std::optional<int> n, m, r;
  double j1 = 1.0;
  std::string j2 = "auto";
  std::string alpha = "auto";
  int k = 4;
  ConfigIndex dense_threshold = 4096;
  std::uint64_t seed = 1;
  int max_matvecs = 10000;
  bool orbit_restrict = false;
  bool frozen_scan = false;
  std::string out;
  ConfigIndex dim_cap = kDefaultDimensionCap;

  std::string part = "total";
  std::string witness;
  int head = 0;
  std::string against;
  std::optional<double> a, b;
  int trials = 1000;
  int lemma_dim = 8;
};

std::optional<double> parse_auto(const std::string& text, const char* flag) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(std::string(flag) + " expects a number or 'auto', got '" + text + "'");
}

SweepSchedule load_schedule(const RunConfig& cfg, const std::string& path) {
  if (path.empty()) {
    ProblemShape s{cfg.n.value_or(2), cfg.m.value_or(1), cfg.r.value_or(1)};
    s.validate();
    return SweepSchedule(s);
  }
  SweepSchedule sched = load_circuit(path);
  const ProblemShape& s = sched.shape();
  if ((cfg.n && *cfg.n != s.n_qubits) || (cfg.m && *cfg.m != s.input_len) || (cfg.r && *cfg.r != s.n_cycles))
    throw Error("shape flags disagree with the circuit header of " + path);
  return sched;
}

void check_schedule(const SweepSchedule& sched) {
  const auto diags = validate_schedule(sched);
  if (diags.empty()) return;
  std::ostringstream msg;
  for (const auto& d : diags) msg << d.message << '\n';
  throw Error("invalid schedule:\n" + msg.str());
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.dense_threshold = cfg.dense_threshold;
  o.seed = cfg.seed;
  o.max_matvecs = cfg.max_matvecs;
  return o;
}

CouplingConstants constants_for(const RunConfig& cfg, const SweepSchedule& sched, std::ostream& log) {
  const ResolvedConstants rc =
      resolve_constants({&sched}, cfg.j1, parse_auto(cfg.j2, "--j2"), parse_auto(cfg.alpha, "--alpha"));
  const auto& c = rc.constants;
  log << "constants J1 " << c.j1 << " J2 " << c.j2 << " alpha " << c.alpha << " w_out " << c.w_out << '\n';
  return c;
}

std::ostream& output(const RunConfig& cfg, std::ofstream& file) {
  if (cfg.out.empty()) return std::cout;
  file.open(cfg.out);
  if (!file) throw Error("cannot write " + cfg.out);
  return file;
}

std::vector<int> parse_bits(const std::string& text, int n) {
  std::vector<int> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw Error("--witness must be a string of 0/1, got '" + text + "'");
    bits.push_back(ch - '0');
  }
  if (text.empty()) bits.assign(static_cast<std::size_t>(n), 0);
  if (static_cast<int>(bits.size()) != n)
    throw Error("--witness has " + std::to_string(bits.size()) + " bits, expected N = " + std::to_string(n));
  return bits;
}

SparseMatrix submatrix(const SparseMatrix& h, const std::vector<ConfigIndex>& keep) {
  std::vector<std::int64_t> pos(static_cast<std::size_t>(h.rows()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<std::int64_t>(i);
  std::vector<Eigen::Triplet<cplx, std::int64_t>> trips;
  for (std::int64_t col = 0; col < h.outerSize(); ++col) {
    if (pos[static_cast<std::size_t>(col)] < 0) continue;
    for (SparseMatrix::InnerIterator it(h, col); it; ++it) {
      const auto row = pos[static_cast<std::size_t>(it.row())];
      if (row >= 0) trips.emplace_back(row, pos[static_cast<std::size_t>(col)], it.value());
    }
  }
  SparseMatrix out(static_cast<std::int64_t>(keep.size()), static_cast<std::int64_t>(keep.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

int cmd_compile(const RunConfig& cfg) {
  const SweepSchedule sched = load_schedule(cfg, cfg.circuit);
  check_schedule(sched);
  const ProblemShape& s = sched.shape();
  const HamiltonianParts parts = build_parts(sched);
  RingOperator h;
  if (cfg.part == "total") {
    h = assemble(parts, constants_for(cfg, sched, std::cout), s, cfg.dim_cap);
  } else {
    const LocalTerm* t = cfg.part == "comp"     ? &parts.comp
                         : cfg.part == "input"  ? &parts.input
                         : cfg.part == "form"   ? &parts.form
                         : cfg.part == "output" ? &parts.output
                                                : nullptr;
    if (!t) throw Error("--part must be one of total, comp, input, form, output");
    h = assemble_ring(*t, s, cfg.dim_cap);
  }
  const double herm = h.hermiticity_residual();
  const double trans = check_translation_invariance(h, build_shift_operator(s, cfg.dim_cap));
  std::cout << "shape N " << s.n_qubits << " M " << s.input_len << " R " << s.n_cycles << " T " << s.total_steps()
            << '\n';
  std::cout << "part " << cfg.part << " local_dim " << h.local_dim << " dim " << h.dim << " nnz "
            << h.matrix.nonZeros() << '\n';
  std::cout << "hermiticity_residual " << herm << "\ntranslation_residual " << trans << '\n';
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out);
    if (!file) throw Error("cannot write " + cfg.out);
    write_triplets(file, h);
    std::cout << "wrote " << cfg.out << '\n';
  }
  return herm <= 1e-12 && trans == 0.0 ? 0 : 3;
}

int cmd_oracle(const RunConfig& cfg) {
  const SweepSchedule sched = load_schedule(cfg, cfg.circuit);
  check_schedule(sched);
  const ProblemShape& s = sched.shape();
  const auto bits = parse_bits(cfg.witness, s.n_qubits);
  const SpinBasis basis(s);
  const HamiltonianParts parts = build_parts(sched);
  const HistoryState hist = simulate_history(sched, bits, cfg.head);
  const SparseState eta = build_history_state(hist);
  const auto report = expectations(eta, basis, {&parts.comp, &parts.input, &parts.form, &parts.output});

  const Eigen::VectorXcd& last = hist.snapshots.back().amplitudes;
  double p_reject = 0.0;
  const Eigen::Index half = last.size() / 2;
  for (Eigen::Index i = half; i < last.size(); ++i) p_reject += std::norm(last(i));
  // snapshots on which the output projector can fire
  const auto final_pattern = clock_descriptor(s, s.total_steps()).pattern;
  int firing = 0;
  for (int t = 0; t <= s.total_steps(); ++t) {
    const auto p = clock_descriptor(s, t).pattern;
    firing += p[0] == final_pattern[0] && p[1] == final_pattern[1] ? 1 : 0;
  }
  const double expected = firing * p_reject / (s.total_steps() + 1);
  const double mismatch = std::abs(report[3].value - expected);
  const double comp_norm = norm(apply(parts.comp, basis, eta));

  std::ofstream file;
  std::ostream& out = output(cfg, file);
  out << "witness " << (cfg.witness.empty() ? std::string(static_cast<std::size_t>(s.n_qubits), '0') : cfg.witness)
      << " head " << cfg.head << " snapshots " << hist.snapshots.size() << '\n';
  out << format_expectations(report);
  out << std::setprecision(12) << "reject_probability " << p_reject << " expected_H_output " << expected
      << " firing_snapshots " << firing
      << " mismatch " << mismatch << '\n';
  out << "H_comp_residual " << comp_norm << '\n';
  return mismatch <= 1e-10 && comp_norm <= 1e-10 ? 0 : 3;
}

int cmd_spectrum(const RunConfig& cfg) {
  const SweepSchedule sched = load_schedule(cfg, cfg.circuit);
  check_schedule(sched);
  const ProblemShape& s = sched.shape();
  std::ofstream file;
  std::ostream& out = output(cfg, file);
  const CouplingConstants c = constants_for(cfg, sched, out);
  const SolverOptions opts = solver_options(cfg);
  const HamiltonianParts parts = build_parts(sched);
  SpectralReport rep;
  if (cfg.orbit_restrict) {
    const SpinBasis basis(s);
    const auto configs = orbit_configs(s, 0);
    const Eigen::MatrixXcd h = restrict(total_bond_term(parts, c), basis, configs);
    out << "orbit_dim " << configs.size() << '\n';
    rep = low_spectrum(h, std::min<int>(cfg.k, static_cast<int>(configs.size())), opts);
    rep.restricted = true;
  } else {
    const RingOperator h = assemble(parts, c, s, cfg.dim_cap);
    if (cfg.frozen_scan) {
      const auto frozen = detect_frozen(sched);
      std::vector<ConfigIndex> keep;
      std::size_t f = 0;
      for (ConfigIndex i = 0; i < h.dim; ++i) {
        while (f < frozen.size() && frozen[f] < i) ++f;
        if (f < frozen.size() && frozen[f] == i) continue;
        keep.push_back(i);
      }
      out << "frozen " << frozen.size() << " kept " << keep.size() << '\n';
      rep = low_spectrum(submatrix(h.matrix, keep), cfg.k, opts);
      rep.restricted = true;
    } else {
      out << "dim " << h.dim << '\n';
      rep = low_spectrum(h.matrix, cfg.k, opts);
    }
  }
  out << rep.format();
  return rep.converged ? 0 : 3;
}

int cmd_gapscan(const RunConfig& cfg) {
  const int n = cfg.n.value_or(2);
  const int r_max = cfg.r.value_or(8);
  std::ofstream file;
  std::ostream& out = output(cfg, file);
  out << "# T gap scaled_gap  (scaled_gap = gap * (T+1)^2, limit pi^2 = " << std::setprecision(12) << M_PI * M_PI
      << ")\n";
  for (int r = 1; r <= r_max; ++r) {
    const ProblemShape s{n, 1, r};
    const SweepSchedule sched(s);
    const Eigen::MatrixXcd h = restrict(build_h_comp_bond(sched), SpinBasis(s),
                                        orbit_configs(s, 0, std::vector<int>(static_cast<std::size_t>(n), 0)));
    const GapResult g = gap(h, solver_options(cfg));
    const int sites = s.total_steps() + 1;
    out << s.total_steps() << ' ' << g.gap << ' ' << g.gap * sites * sites << '\n';
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const SweepSchedule sched = load_schedule(cfg, cfg.circuit);
  check_schedule(sched);
  std::ofstream file;
  std::ostream& out = output(cfg, file);
  if (!cfg.against.empty()) {
    const SweepSchedule rejecting = load_schedule(cfg, cfg.against);
    check_schedule(rejecting);
    SeparationOptions opts;
    opts.j1 = cfg.j1;
    opts.j2 = parse_auto(cfg.j2, "--j2");
    opts.alpha = parse_auto(cfg.alpha, "--alpha");
    opts.witness = parse_bits(cfg.witness, sched.shape().n_qubits);
    opts.full_space = !cfg.orbit_restrict;
    opts.solver = solver_options(cfg);
    const SeparationReport rep = separation_experiment(sched, rejecting, opts);
    out << rep.format();
    const bool ok = rep.separation_orbit > 0 && rep.yes.lemma_holds && rep.no.lemma_holds &&
                    (!rep.separation_full_unfrozen || *rep.separation_full_unfrozen > 0);
    return ok ? 0 : 3;
  }
  if (!cfg.a || !cfg.b) throw Error("verify needs --against <circuit> or both --a and --b");
  PromiseParameters p;
  p.a = *cfg.a;
  p.b = *cfg.b;
  p.constants = constants_for(cfg, sched, out);
  p.validate();
  const RingOperator h = assemble(build_parts(sched), p.constants, sched.shape(), cfg.dim_cap);
  const PromiseDecision d = decide(h.matrix, p, solver_options(cfg));
  out << d.format(p) << '\n';
  return 0;
}

int cmd_lemma(const RunConfig& cfg) {
  const LemmaCheckReport rep = verify_lemma_numeric(cfg.seed, cfg.trials, cfg.lemma_dim);
  std::ofstream file;
  output(cfg, file) << rep.format();
  return rep.violations == 0 ? 0 : 3;
}

int cmd_export(const RunConfig& cfg) {
  const SweepSchedule sched = load_schedule(cfg, cfg.circuit);
  check_schedule(sched);
  std::ofstream file;
  write_circuit(output(cfg, file), sched);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translation-invariant 2-local ring Hamiltonians from verifier circuits"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--circuit", cfg.circuit, "circuit file")->check(CLI::ExistingFile);
    sub->add_option("--n", cfg.n, "number of qubits N");
    sub->add_option("--m", cfg.m, "input length M");
    sub->add_option("--r", cfg.r, "number of sweep cycles R");
    sub->add_option("--j1", cfg.j1, "input weight J1");
    sub->add_option("--j2", cfg.j2, "clock weight J2 or 'auto'");
    sub->add_option("--alpha", cfg.alpha, "form weight alpha or 'auto'");
    sub->add_option("--k", cfg.k, "number of eigenvalues")->check(CLI::PositiveNumber);
    sub->add_option("--dense-threshold", cfg.dense_threshold, "largest dimension solved densely");
    sub->add_option("--seed", cfg.seed, "solver / sampling seed");
    sub->add_option("--max-matvecs", cfg.max_matvecs, "iterative solver budget");
    sub->add_flag("--orbit-restrict", cfg.orbit_restrict, "work on the legal orbit only");
    sub->add_flag("--frozen-scan", cfg.frozen_scan, "detect and exclude frozen configurations");
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--dim-cap", cfg.dim_cap, "refuse ring dimensions above this");
  };

  auto* compile = app.add_subcommand("compile", "assemble the ring Hamiltonian and export triplets");
  common(compile);
  compile->add_option("--part", cfg.part, "total | comp | input | form | output");
  auto* oracle = app.add_subcommand("oracle", "history-state expectations for a witness");
  common(oracle);
  oracle->add_option("--witness", cfg.witness, "bit string of length N (default all zero)");
  oracle->add_option("--head", cfg.head, "head site 0..N");
  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues");
  common(spectrum);
  auto* gapscan = app.add_subcommand("gapscan", "clock gap for R = 1..--r at fixed --n");
  common(gapscan);
  auto* verify = app.add_subcommand("verify", "yes/no separation or a promise decision");
  common(verify);
  verify->add_option("--against", cfg.against, "rejecting circuit for the separation experiment")
      ->check(CLI::ExistingFile);
  verify->add_option("--witness", cfg.witness, "witness for the variational energies");
  verify->add_option("--a", cfg.a, "yes threshold");
  verify->add_option("--b", cfg.b, "no threshold");
  auto* lemma = app.add_subcommand("lemma", "numeric projection-lemma check");
  common(lemma);
  lemma->add_option("--trials", cfg.trials, "number of random instances")->check(CLI::PositiveNumber);
  lemma->add_option("--dim", cfg.lemma_dim, "matrix dimension")->check(CLI::Range(2, 64));
  auto* exp = app.add_subcommand("export", "write the canonical circuit");
  common(exp);

  CLI11_PARSE(app, argc, argv);

  std::cout << std::setprecision(12);
  try {
    if (*compile) return cmd_compile(cfg);
    if (*oracle) return cmd_oracle(cfg);
    if (*spectrum) return cmd_spectrum(cfg);
    if (*gapscan) return cmd_gapscan(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*lemma) return cmd_lemma(cfg);
    if (*exp) return cmd_export(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
