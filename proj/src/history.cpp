#include "tiham/history.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace tiham {

void apply_gate(Eigen::VectorXcd& reg, int n_qubits, int bond, const Gate& u) {
  const int hi = n_qubits - bond;  // bit offset of qubit `bond`
  const int lo = hi - 1;           // bit offset of qubit `bond+1`
  const Eigen::Index size = reg.size();
  for (Eigen::Index base = 0; base < size; ++base) {
    if ((base >> hi) & 1 || (base >> lo) & 1) continue;
    Eigen::Index idx[4];
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) {
      idx[k] = base | (static_cast<Eigen::Index>(k >> 1) << hi) | (static_cast<Eigen::Index>(k & 1) << lo);
      v(k) = reg(idx[k]);
    }
    const Eigen::Vector4cd w = u * v;
    for (int k = 0; k < 4; ++k) reg(idx[k]) = w(k);
  }
}

HistoryState simulate_history(const SweepSchedule& schedule, const std::vector<int>& bits, int head_site) {
  const ProblemShape& shape = schedule.shape();
  shape.validate();
  const int n = shape.n_qubits;
  if (static_cast<int>(bits.size()) != n) throw Error("witness length does not match N");
  if (head_site < 0 || head_site > n) throw Error("head site out of range");

  Eigen::VectorXcd reg = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  Eigen::Index start = 0;
  for (int q = 0; q < n; ++q) {
    if (bits[static_cast<std::size_t>(q)] != 0 && bits[static_cast<std::size_t>(q)] != 1)
      throw Error("witness bits must be 0 or 1");
    start = (start << 1) | bits[static_cast<std::size_t>(q)];
  }
  reg(start) = 1.0;

  HistoryState h{shape, head_site, {}};
  h.snapshots.push_back({0, clock_descriptor(shape, 0).pattern, reg});
  const auto order = sweep_order(shape);
  for (std::size_t t = 0; t < order.size(); ++t) {
    apply_gate(reg, n, order[t].bond, schedule.gate_at(order[t]));
    const int step = static_cast<int>(t) + 1;
    h.snapshots.push_back({step, clock_descriptor(shape, step).pattern, reg});
  }
  return h;
}

SparseState snapshot_state(const HistoryState& h, int step) {
  const SpinBasis basis(h.shape);
  const Snapshot& snap = h.snapshots.at(static_cast<std::size_t>(step));
  const int n = h.shape.n_qubits;
  SparseState out;
  for (Eigen::Index s = 0; s < snap.amplitudes.size(); ++s) {
    if (snap.amplitudes(s) == cplx(0.0)) continue;
    RingConfig c(static_cast<std::size_t>(n + 1));
    c[static_cast<std::size_t>(h.head_site)] = SpinState::Head();
    for (int j = 1; j <= n; ++j) {
      const int bit = static_cast<int>((s >> (n - j)) & 1);
      c[static_cast<std::size_t>((h.head_site + j) % (n + 1))] =
          SpinState::Data(bit, snap.pattern[static_cast<std::size_t>(j - 1)], j);
    }
    out.emplace_back(config_index(c, basis), snap.amplitudes(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

cplx inner(const SparseState& a, const SparseState& b) {
  cplx acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      acc += std::conj(a[i].second) * b[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

double norm(const SparseState& a) {
  double acc = 0.0;
  for (const auto& [idx, v] : a) acc += std::norm(v);
  return std::sqrt(acc);
}

SparseState axpy(cplx alpha, const SparseState& x, const SparseState& y) {
  SparseState out;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.emplace_back(x[i].first, alpha * x[i].second);
      ++i;
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.push_back(y[j]);
      ++j;
    } else {
      out.emplace_back(x[i].first, alpha * x[i].second + y[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

namespace {

SparseState uniform_sum(const std::vector<SparseState>& parts, double tol, const char* what) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (std::abs(norm(parts[i]) - 1.0) > tol) throw Error(std::string(what) + " are not normalized");
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (std::abs(inner(parts[i], parts[j])) > tol) throw Error(std::string(what) + " are not orthogonal");
  }
  const double w = 1.0 / std::sqrt(static_cast<double>(parts.size()));
  SparseState sum;
  for (const auto& p : parts) sum = axpy(w, p, sum);
  return sum;
}

}  // namespace

SparseState build_history_state(const std::vector<SparseState>& snapshots, double tol) {
  if (snapshots.empty()) throw Error("no snapshots");
  return uniform_sum(snapshots, tol, "snapshots");
}

SparseState build_history_state(const HistoryState& h) {
  std::vector<SparseState> snaps;
  for (std::size_t t = 0; t < h.snapshots.size(); ++t) snaps.push_back(snapshot_state(h, static_cast<int>(t)));
  return build_history_state(snaps);
}

SparseState symmetrize_over_head(const std::vector<SparseState>& per_head, double tol) {
  if (per_head.empty()) throw Error("no head placements");
  return uniform_sum(per_head, tol, "head placements");
}

namespace {

SparseState from_map(const std::map<ConfigIndex, cplx>& acc) {
  SparseState out;
  for (const auto& [k, v] : acc)
    if (v != cplx(0.0)) out.emplace_back(k, v);
  return out;
}

}  // namespace

SparseState apply(const LocalTerm& term, const SpinBasis& basis, const SparseState& psi) {
  std::map<ConfigIndex, cplx> acc;
  for (const auto& [col, a] : psi)
    for (const auto& [row, v] : ring_column(term, basis, col)) acc[row] += v * a;
  return from_map(acc);
}

SparseState apply(const RingOperator& op, const SparseState& psi) {
  std::map<ConfigIndex, cplx> acc;
  for (const auto& [col, a] : psi) {
    if (col >= op.dim) throw Error("state index outside operator dimension");
    for (SparseMatrix::InnerIterator it(op.matrix, static_cast<std::int64_t>(col)); it; ++it)
      acc[static_cast<ConfigIndex>(it.row())] += it.value() * a;
  }
  return from_map(acc);
}

SparseState apply_shift(const SpinBasis& basis, const SparseState& psi) {
  const auto d = static_cast<ConfigIndex>(basis.local_dim());
  ConfigIndex top = 1;
  for (int i = 1; i < basis.sites(); ++i) top *= d;
  SparseState out;
  for (const auto& [c, a] : psi) out.emplace_back((c % d) * top + c / d, a);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Eigen::VectorXcd to_dense(const SparseState& psi, ConfigIndex dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& [k, a] : psi) {
    if (k >= dim) throw Error("state index outside dimension");
    v(static_cast<Eigen::Index>(k)) = a;
  }
  return v;
}

std::vector<Expectation> expectations(const SparseState& psi, const std::vector<const RingOperator*>& parts) {
  std::vector<Expectation> out;
  for (const auto* op : parts) {
    const cplx e = inner(psi, apply(*op, psi));
    out.push_back({op->provenance, e.real(), std::abs(e.imag())});
  }
  return out;
}

std::vector<Expectation> expectations(const SparseState& psi, const SpinBasis& basis,
                                      const std::vector<const LocalTerm*>& parts) {
  std::vector<Expectation> out;
  for (const auto* term : parts) {
    const cplx e = inner(psi, apply(*term, basis, psi));
    out.push_back({term->name, e.real(), std::abs(e.imag())});
  }
  return out;
}

std::string format_expectations(const std::vector<Expectation>& report) {
  std::ostringstream out;
  for (const auto& e : report) {
    // collapse round-off so reports diff cleanly
    const double v = std::abs(e.value) < 1e-14 ? 0.0 : e.value;
    std::ostringstream num;
    num << std::setprecision(12) << v;
    std::string text = num.str();
    if (text.find_first_of(".en") == std::string::npos) text += ".0";
    out << e.name << ' ' << text << ' ' << std::setprecision(3) << e.imag_residual << '\n';
  }
  return out.str();
}

}  // namespace tiham
