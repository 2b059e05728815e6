#include "tiham/circuit.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tiham {

void ProblemShape::validate() const {
  if (n_qubits < 2) throw Error("n_qubits must be >=2");
  if (input_len < 1 || input_len > n_qubits)
    throw Error("input_len must satisfy 1 <= M <= N");
  if (n_cycles < 1) throw Error("n_cycles must be >=1");
}

std::vector<Slot> sweep_order(const ProblemShape& shape) {
  std::vector<Slot> order;
  order.reserve(static_cast<std::size_t>(std::max(0, shape.total_steps())));
  for (int m = 1; m <= shape.n_cycles; ++m) {
    if (m % 2 == 1) {
      for (int n = 1; n <= shape.bonds(); ++n) order.push_back({m, n});
    } else {
      for (int n = shape.bonds(); n >= 1; --n) order.push_back({m, n});
    }
  }
  return order;
}

double unitarity_deviation(const Gate& u) {
  return (u.adjoint() * u - Gate::Identity()).cwiseAbs().maxCoeff();
}

Gate embed_left(const Eigen::Matrix2cd& u) {
  Gate g = Gate::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) g(2 * a + c, 2 * b + c) = u(a, b);
  return g;
}

Gate embed_right(const Eigen::Matrix2cd& u) {
  Gate g = Gate::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) g(2 * c + a, 2 * c + b) = u(a, b);
  return g;
}

SweepSchedule::SweepSchedule(ProblemShape shape) : shape_(shape) {
  const int slots = std::max(0, shape_.n_cycles) * std::max(0, shape_.bonds());
  gates_.assign(static_cast<std::size_t>(slots), Gate::Identity());
}

std::size_t SweepSchedule::slot_index(int cycle, int bond) const {
  if (cycle < 1 || cycle > shape_.n_cycles || bond < 1 || bond > shape_.bonds()) {
    std::ostringstream msg;
    msg << "slot (" << cycle << "," << bond << ") out of range for R="
        << shape_.n_cycles << ", N=" << shape_.n_qubits;
    throw Error(msg.str());
  }
  return static_cast<std::size_t>((cycle - 1) * shape_.bonds() + (bond - 1));
}

const Gate& SweepSchedule::gate_at(int cycle, int bond) const {
  return gates_[slot_index(cycle, bond)];
}

void SweepSchedule::set_gate(int cycle, int bond, const Gate& gate) {
  gates_[slot_index(cycle, bond)] = gate;
}

SweepSchedule schedule_from_gate_list(const std::vector<PlacedGate>& gates,
                                      int n_qubits, int input_len) {
  ProblemShape probe{n_qubits, input_len, 1};
  probe.validate();
  const int bonds = probe.bonds();

  // Position along the infinite visitation sequence; slot k sits in cycle
  // k / bonds + 1.
  auto bond_at = [bonds](long k) {
    const long m = k / bonds + 1;
    const long j = k % bonds;
    return static_cast<int>(m % 2 == 1 ? j + 1 : bonds - j);
  };

  std::vector<std::pair<long, const Gate*>> placed;
  long cursor = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.bond < 1 || g.bond > bonds) {
      std::ostringstream msg;
      msg << "gate " << i << ": bond " << g.bond << " out of range 1.." << bonds;
      throw Error(msg.str());
    }
    const double dev = unitarity_deviation(g.unitary);
    if (dev > 1e-12) {
      std::ostringstream msg;
      msg << "gate " << i << ": not unitary, max deviation " << dev;
      throw Error(msg.str());
    }
    while (bond_at(cursor) != g.bond) ++cursor;
    placed.emplace_back(cursor, &g.unitary);
    ++cursor;
  }

  const long used = placed.empty() ? 1 : placed.back().first + 1;
  ProblemShape shape{n_qubits, input_len, static_cast<int>((used + bonds - 1) / bonds)};
  SweepSchedule schedule(shape);
  for (const auto& [k, u] : placed)
    schedule.set_gate(static_cast<int>(k / bonds + 1), bond_at(k), *u);
  return schedule;
}

std::vector<Diagnostic> validate_schedule(const SweepSchedule& schedule, double tol) {
  std::vector<Diagnostic> out;
  const auto& s = schedule.shape();
  if (s.n_qubits < 2) out.push_back({"n_qubits must be >=2", {0, 0}, 0.0});
  if (s.input_len < 1 || s.input_len > s.n_qubits)
    out.push_back({"input_len must satisfy 1 <= M <= N", {0, 0}, 0.0});
  if (s.n_cycles < 1) out.push_back({"n_cycles must be >=1", {0, 0}, 0.0});
  if (!out.empty()) return out;

  for (const Slot& slot : sweep_order(s)) {
    const double dev = unitarity_deviation(schedule.gate_at(slot));
    if (!(dev <= tol)) {
      std::ostringstream msg;
      msg << "gate at (" << slot.cycle << "," << slot.bond
          << ") not unitary: max |U^dag U - 1| = " << dev;
      out.push_back({msg.str(), slot, dev});
    }
  }
  return out;
}

namespace {

cplx parse_complex(const std::string& tok, int line) {
  const auto comma = tok.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(tok), 0.0};
    return {std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error("line " + std::to_string(line) + ": bad complex entry '" + tok + "'");
  }
}

int parse_int(const std::string& tok, int line, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error("line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  }
}

}  // namespace

SweepSchedule parse_circuit(std::istream& in) {
  bool have_shape = false;
  bool have_r = false;
  ProblemShape shape;
  struct Pending {
    int cycle;  // 0 means packed
    PlacedGate gate;
    int line;
  };
  std::vector<Pending> pending;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "shape") {
      if (have_shape) throw Error("line " + std::to_string(line_no) + ": duplicate shape header");
      if (tok.size() != 3 && tok.size() != 4)
        throw Error("line " + std::to_string(line_no) + ": expected 'shape N M [R]'");
      shape.n_qubits = parse_int(tok[1], line_no, "N");
      shape.input_len = parse_int(tok[2], line_no, "M");
      have_r = tok.size() == 4;
      shape.n_cycles = have_r ? parse_int(tok[3], line_no, "R") : 1;
      try {
        shape.validate();
      } catch (const Error& e) {
        throw Error("line " + std::to_string(line_no) + ": " + e.what());
      }
      have_shape = true;
    } else if (tok[0] == "gate") {
      if (!have_shape)
        throw Error("line " + std::to_string(line_no) + ": gate before shape header");
      if (tok.size() != 3 + 16)
        throw Error("line " + std::to_string(line_no) + ": gate needs m, n and 16 entries, got " +
                    std::to_string(tok.size() - 1) + " fields");
      Pending p{0, {}, line_no};
      if (tok[1] == "*") {
        if (have_r)
          throw Error("line " + std::to_string(line_no) + ": '*' cycle requires a header without R");
      } else {
        if (!have_r)
          throw Error("line " + std::to_string(line_no) + ": explicit cycle requires R in header");
        p.cycle = parse_int(tok[1], line_no, "cycle");
      }
      p.gate.bond = parse_int(tok[2], line_no, "bond");
      for (int k = 0; k < 16; ++k) p.gate.unitary(k / 4, k % 4) = parse_complex(tok[3 + k], line_no);
      pending.push_back(p);
    } else {
      throw Error("line " + std::to_string(line_no) + ": unknown directive '" + tok[0] + "'");
    }
  }
  if (!have_shape) throw Error("missing shape header");

  if (!have_r) {
    std::vector<PlacedGate> list;
    for (const auto& p : pending) list.push_back(p.gate);
    return schedule_from_gate_list(list, shape.n_qubits, shape.input_len);
  }

  SweepSchedule schedule(shape);
  for (const auto& p : pending) {
    const double dev = unitarity_deviation(p.gate.unitary);
    if (dev > 1e-12) {
      std::ostringstream msg;
      msg << "line " << p.line << ": gate not unitary, max deviation " << dev;
      throw Error(msg.str());
    }
    try {
      schedule.set_gate(p.cycle, p.gate.bond, p.gate.unitary);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(p.line) + ": " + e.what());
    }
  }
  return schedule;
}

SweepSchedule load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open circuit file '" + path + "'");
  return parse_circuit(in);
}

void write_circuit(std::ostream& out, const SweepSchedule& schedule) {
  const auto& s = schedule.shape();
  out << "shape " << s.n_qubits << ' ' << s.input_len << ' ' << s.n_cycles << '\n';
  out << std::setprecision(17);
  for (const Slot& slot : sweep_order(s)) {
    const Gate& g = schedule.gate_at(slot);
    if (g == Gate::Identity()) continue;
    out << "gate " << slot.cycle << ' ' << slot.bond;
    for (int k = 0; k < 16; ++k) out << ' ' << g(k / 4, k % 4).real() << ',' << g(k / 4, k % 4).imag();
    out << '\n';
  }
}

}  // namespace tiham
