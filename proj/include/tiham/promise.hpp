#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiham/circuit.hpp"
#include "tiham/hamiltonian.hpp"
#include "tiham/spectral.hpp"

namespace tiham {

/// Projection-lemma sandwich:
///   lambda(H1|S) - ||H1||^2 / (J - 2||H1||) <= lambda(H1 + H2) <= lambda(H1|S)
/// where H2 vanishes on S and is >= J on its complement.
struct LemmaBounds {
  double lambda_restricted = 0.0;
  double norm_h1 = 0.0;
  double j = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Throws tiham::Error when J <= 2||H1|| (hypothesis violated), except for
/// the vacuous case ||H1|| = 0.
LemmaBounds projection_bounds(double lambda_restricted, double norm_h1, double j);

/// 8||H1||^2 + 2||H1||; leaves slack exactly 1/8 when ||H1|| > 0.
double choose_j(double norm_h1);

/// 2 c / T^2, i.e. a factor-2 margin over c / T^2.
double choose_alpha(const ProblemShape& shape, double c_est);

struct LemmaCheckReport {
  int trials = 0;
  int violations = 0;
  double worst_lower_margin = 0.0;  // min over trials of lambda - lower
  double worst_upper_margin = 0.0;  // min over trials of upper - lambda
  double max_slack_error = 0.0;     // max |slack - 1/8|

  std::string format() const;
};

LemmaCheckReport verify_lemma_numeric(std::uint64_t seed, int trials, int dim);

struct PromiseParameters {
  double a = 0.0;
  double b = 1.0;
  double epsilon = 0.0;
  CouplingConstants constants;

  void validate() const;
};

enum class Verdict { Yes, No, OutsidePromise };
const char* to_string(Verdict v);

struct PromiseDecision {
  Verdict verdict = Verdict::OutsidePromise;
  double lambda0 = 0.0;
  double residual = 0.0;
  double margin = 0.0;  // distance to the threshold that decided; negative inside the gap

  /// "verdict <V> lambda0 <v> a <a> b <b> margin <m>"
  std::string format(const PromiseParameters& p) const;
};

PromiseDecision decide(double lambda0, const PromiseParameters& params);
PromiseDecision decide(const SparseMatrix& h, const PromiseParameters& params, const SolverOptions& opts = {});

struct ResolvedConstants {
  CouplingConstants constants;
  double orbit_gap = 0.0;  // clock gap of the first schedule on its legal orbit
  double norm_h1 = 0.0;    // max over schedules of ||J1 H_input + w_out H_output|| on the orbit
};

/// Fills in automatic constants: w_out = T, alpha = choose_alpha(gap * T^2),
/// J2 = choose_j(||H1||) / gap.
ResolvedConstants resolve_constants(const std::vector<const SweepSchedule*>& schedules, double j1,
                                    std::optional<double> j2 = std::nullopt,
                                    std::optional<double> alpha = std::nullopt);

struct SeparationOptions {
  double j1 = 1.0;
  std::optional<double> j2;     // auto: choose_j(||H1||) / gap(H_comp on the orbit)
  std::optional<double> alpha;  // auto: choose_alpha(shape, gap * T^2)
  std::vector<int> witness;     // history state used for the variational energies
  bool full_space = true;       // also diagonalize the whole ring when small enough
  SolverOptions solver;
};

struct InstanceEnergies {
  double lambda0_orbit = 0.0;
  std::optional<double> lambda0_full;
  std::optional<double> lambda0_full_unfrozen;
  std::size_t frozen_count = 0;
  double variational = 0.0;           // <eta|H|eta>, terms grouped as built
  double variational_alt_grouping = 0.0;  // head reward moved into the J1 group
  double e_input = 0.0, e_form = 0.0, e_comp = 0.0, e_output = 0.0;
  LemmaBounds lemma;
  bool lemma_holds = false;
  bool nested_hypothesis = false;
  std::optional<LemmaBounds> nested;
};

struct SeparationReport {
  CouplingConstants constants;
  double norm_h1 = 0.0;
  double orbit_gap = 0.0;
  InstanceEnergies yes;
  InstanceEnergies no;
  double separation_orbit = 0.0;  // lambda0_no - lambda0_yes on the orbit
  std::optional<double> separation_full_unfrozen;

  std::string format() const;
};

SeparationReport separation_experiment(const SweepSchedule& accepting, const SweepSchedule& rejecting,
                                       const SeparationOptions& opts);

}  // namespace tiham
