#include "tiham/spin_basis.hpp"

#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace tiham {

std::string to_string(const SpinState& s) {
  if (s.head) return "H";
  std::ostringstream out;
  out << "D(" << s.bit << ',' << s.cycle << ',' << s.position << ')';
  return out.str();
}

std::string to_string(const RingConfig& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    out += to_string(c[i]);
  }
  return out;
}

int max_label(const ProblemShape& shape) {
  shape.validate();
  return shape.n_qubits == 2 ? shape.n_cycles : 2 * shape.n_cycles;
}

SpinBasis::SpinBasis(ProblemShape shape) : shape_(shape) {
  labels_ = max_label(shape_) + 1;
  dim_ = 2 * shape_.n_qubits * labels_ + 1;
}

int SpinBasis::encode(const SpinState& s) const {
  if (s.head) return 0;
  if (s.bit < 0 || s.bit > 1) throw Error("qubit bit out of range");
  if (s.cycle < 0 || s.cycle >= labels_) throw Error("clock label out of range");
  if (s.position < 1 || s.position > shape_.n_qubits) throw Error("position label out of range");
  return 1 + s.bit + 2 * (s.cycle + labels_ * (s.position - 1));
}

SpinState SpinBasis::decode(int level) const {
  if (level < 0 || level >= dim_)
    throw Error("level " + std::to_string(level) + " out of range 0.." + std::to_string(dim_ - 1));
  if (level == 0) return SpinState::Head();
  const int r = level - 1;
  return SpinState::Data(r % 2, (r / 2) % labels_, r / 2 / labels_ + 1);
}

ConfigIndex SpinBasis::ring_dim() const {
  ConfigIndex total = 1;
  for (int i = 0; i < sites(); ++i) {
    if (total > std::numeric_limits<ConfigIndex>::max() / 2 / static_cast<ConfigIndex>(dim_))
      throw Error("ring dimension overflows 64-bit index");
    total *= static_cast<ConfigIndex>(dim_);
  }
  return total;
}

ConfigIndex config_index(const RingConfig& c, const SpinBasis& basis) {
  if (static_cast<int>(c.size()) != basis.sites()) throw Error("ring config has wrong length");
  ConfigIndex idx = 0;
  for (const auto& s : c) idx = idx * static_cast<ConfigIndex>(basis.local_dim()) + basis.encode(s);
  return idx;
}

RingConfig config_from_index(ConfigIndex idx, const SpinBasis& basis) {
  const auto d = static_cast<ConfigIndex>(basis.local_dim());
  RingConfig c(static_cast<std::size_t>(basis.sites()));
  for (int i = basis.sites() - 1; i >= 0; --i) {
    c[static_cast<std::size_t>(i)] = basis.decode(static_cast<int>(idx % d));
    idx /= d;
  }
  if (idx != 0) throw Error("config index out of range");
  return c;
}

RingConfig initial_config(const std::vector<int>& bits, int head_site, const ProblemShape& shape) {
  shape.validate();
  const int n = shape.n_qubits;
  if (static_cast<int>(bits.size()) != n)
    throw Error("bit string has length " + std::to_string(bits.size()) + ", expected " +
                std::to_string(n));
  if (head_site < 0 || head_site > n) throw Error("head site out of range");
  RingConfig c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(head_site)] = SpinState::Head();
  for (int j = 1; j <= n; ++j) {
    const int b = bits[static_cast<std::size_t>(j - 1)];
    if (b != 0 && b != 1) throw Error("bit string entries must be 0 or 1");
    c[static_cast<std::size_t>((head_site + j) % (n + 1))] = SpinState::Data(b, 0, j);
  }
  return c;
}

ClockDescriptor clock_descriptor(const ProblemShape& shape, int step) {
  shape.validate();
  const int n = shape.n_qubits;
  const int bonds = shape.bonds();
  if (step < 0 || step > shape.total_steps()) throw Error("clock step out of range");
  ClockDescriptor d;
  d.step = step;
  d.pattern.assign(static_cast<std::size_t>(n), 0);
  if (step == 0) return d;
  d.cycle = (step - 1) / bonds + 1;
  d.wall = (step - 1) % bonds + 1;
  const int full = d.cycle - 1;
  for (int p = 1; p <= n; ++p) {
    const int per_cycle = (p == 1 || p == n) ? 1 : 2;
    int label = full * per_cycle;
    // bonds touched so far in the current cycle
    const int lo = d.cycle % 2 == 1 ? 1 : bonds - d.wall + 1;
    const int hi = d.cycle % 2 == 1 ? d.wall : bonds;
    if (p - 1 >= lo && p - 1 <= hi) ++label;
    if (p >= lo && p <= hi) ++label;
    d.pattern[static_cast<std::size_t>(p - 1)] = label;
  }
  return d;
}

const char* to_string(TransitionFamily f) {
  switch (f) {
    case TransitionFamily::Opening: return "opening";
    case TransitionFamily::Turnaround: return "turnaround";
    case TransitionFamily::Rightward: return "rightward";
    case TransitionFamily::Leftward: return "leftward";
  }
  return "?";
}

std::vector<ClockTransition> clock_transitions(const ProblemShape& shape) {
  shape.validate();
  const int bonds = shape.bonds();
  std::vector<ClockTransition> out;
  int t = 0;
  for (const Slot& s : sweep_order(shape)) {
    const auto before = clock_descriptor(shape, t).pattern;
    const auto after = clock_descriptor(shape, t + 1).pattern;
    ++t;
    ClockTransition tr;
    tr.slot = s;
    tr.left_position = s.bond;
    const auto i = static_cast<std::size_t>(s.bond - 1);
    tr.before = {before[i], before[i + 1]};
    tr.after = {after[i], after[i + 1]};
    if (t == 1)
      tr.family = TransitionFamily::Opening;
    else if ((t - 1) % bonds == 0)
      tr.family = TransitionFamily::Turnaround;
    else
      tr.family = s.cycle % 2 == 1 ? TransitionFamily::Rightward : TransitionFamily::Leftward;
    out.push_back(tr);
  }
  return out;
}

namespace {

bool matches(const ClockPattern& p, int left, const std::array<int, 2>& local) {
  return p[static_cast<std::size_t>(left - 1)] == local[0] && p[static_cast<std::size_t>(left)] == local[1];
}

ClockPattern with_local(ClockPattern p, int left, const std::array<int, 2>& local) {
  p[static_cast<std::size_t>(left - 1)] = local[0];
  p[static_cast<std::size_t>(left)] = local[1];
  return p;
}

}  // namespace

std::vector<ClockDescriptor> enumerate_legal_orbit(const ProblemShape& shape) {
  shape.validate();
  const auto moves = clock_transitions(shape);
  const ClockPattern start(static_cast<std::size_t>(shape.n_qubits), 0);

  std::map<ClockPattern, int> dist{{start, 0}};
  std::map<ClockPattern, int> degree;
  std::queue<ClockPattern> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const ClockPattern cur = frontier.front();
    frontier.pop();
    std::vector<ClockPattern> nbrs;
    for (const auto& mv : moves) {
      if (matches(cur, mv.left_position, mv.before)) nbrs.push_back(with_local(cur, mv.left_position, mv.after));
      if (matches(cur, mv.left_position, mv.after)) nbrs.push_back(with_local(cur, mv.left_position, mv.before));
    }
    degree[cur] = static_cast<int>(nbrs.size());
    for (const auto& nb : nbrs) {
      if (!dist.count(nb)) {
        dist[nb] = dist[cur] + 1;
        frontier.push(nb);
      }
    }
  }

  const int steps = shape.total_steps();
  if (static_cast<int>(dist.size()) != steps + 1)
    throw Error("legal orbit has " + std::to_string(dist.size()) + " patterns, expected " +
                std::to_string(steps + 1));
  std::vector<ClockDescriptor> orbit(static_cast<std::size_t>(steps + 1));
  for (const auto& [pattern, t] : dist) {
    const int expected_degree = (t == 0 || t == steps) ? 1 : 2;
    if (degree[pattern] != expected_degree) throw Error("legal orbit is not a path at step " + std::to_string(t));
    ClockDescriptor d = clock_descriptor(shape, t);
    if (d.pattern != pattern) throw Error("orbit pattern disagrees with sweep order at step " + std::to_string(t));
    orbit[static_cast<std::size_t>(t)] = d;
  }
  return orbit;
}

int step_of_pattern(const ProblemShape& shape, const ClockPattern& pattern) {
  for (int t = 0; t <= shape.total_steps(); ++t)
    if (clock_descriptor(shape, t).pattern == pattern) return t;
  return -1;
}

Legality is_legal(const RingConfig& config, const ProblemShape& shape) {
  const int n = shape.n_qubits;
  const int sites = n + 1;
  Legality out;
  if (static_cast<int>(config.size()) != sites) {
    out.legal = false;
    out.violations.push_back({Violation::HeadCount, -1, "ring has wrong length"});
    return out;
  }
  auto at = [&](int i) -> const SpinState& { return config[static_cast<std::size_t>(((i % sites) + sites) % sites)]; };

  int heads = 0;
  for (const auto& s : config) heads += s.head ? 1 : 0;
  if (heads != 1)
    out.violations.push_back({Violation::HeadCount, -1, std::to_string(heads) + " heads"});

  for (int i = 0; i < sites; ++i) {
    const SpinState& l = at(i);
    const SpinState& r = at(i + 1);
    if (r.head && !(!l.head && l.position == n)) {
      out.violations.push_back({Violation::HeadAdjacency, i, "head after " + to_string(l)});
    } else if (l.head && !r.head && r.position != 1) {
      out.violations.push_back({Violation::PositionIncrement, i,
                                "pair (H," + std::to_string(r.position) + ")"});
    } else if (!l.head && !r.head && r.position != l.position + 1) {
      out.violations.push_back({Violation::PositionIncrement, i,
                                "pair (" + std::to_string(l.position) + "," + std::to_string(r.position) + ")"});
    }
  }

  if (out.violations.empty()) {
    int head_site = 0;
    while (!at(head_site).head) ++head_site;
    ClockPattern pattern(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) pattern[static_cast<std::size_t>(j - 1)] = at(head_site + j).cycle;
    if (step_of_pattern(shape, pattern) < 0)
      out.violations.push_back({Violation::ClockPattern, -1, "clock labels match no clock step"});
  }
  out.legal = out.violations.empty();
  return out;
}

}  // namespace tiham
