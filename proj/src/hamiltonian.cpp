#include "tiham/hamiltonian.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace tiham {

namespace {

using Triplet = Eigen::Triplet<cplx, std::int64_t>;

SparseMatrix from_triplets(std::int64_t dim, const std::vector<Triplet>& trips) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune([](std::int64_t, std::int64_t, const cplx& v) { return v != cplx(0.0); });
  m.makeCompressed();
  return m;
}

double sparse_hermiticity(const SparseMatrix& m) {
  if (m.nonZeros() == 0) return 0.0;
  SparseMatrix diff = SparseMatrix(m.adjoint()) - m;
  double worst = 0.0;
  for (std::int64_t k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

LocalTerm diagonal_term(const ProblemShape& shape, std::string name,
                        const std::function<double(const SpinState&, const SpinState&)>& value) {
  SpinBasis basis(shape);
  const int d = basis.local_dim();
  std::vector<Triplet> trips;
  for (int l = 0; l < d; ++l) {
    const SpinState left = basis.decode(l);
    for (int r = 0; r < d; ++r) {
      const double v = value(left, basis.decode(r));
      if (v != 0.0) trips.emplace_back(l * d + r, l * d + r, v);
    }
  }
  return {std::move(name), d, from_triplets(static_cast<std::int64_t>(d) * d, trips)};
}

}  // namespace

double LocalTerm::hermiticity_residual() const { return sparse_hermiticity(matrix); }

double LocalTerm::norm() const {
  if (matrix.nonZeros() == 0) return 0.0;
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void CouplingConstants::validate() const {
  if (!(j1 > 0 && j2 > 0 && alpha > 0 && w_out > 0))
    throw Error("coupling constants must be strictly positive");
}

double RingOperator::hermiticity_residual() const { return sparse_hermiticity(matrix); }

LocalTerm build_h_comp_bond(const SweepSchedule& schedule) {
  const ProblemShape& shape = schedule.shape();
  SpinBasis basis(shape);
  const int d = basis.local_dim();
  std::vector<Triplet> trips;

  for (const ClockTransition& mv : clock_transitions(shape)) {
    const Gate& u = schedule.gate_at(mv.slot);
    const int p = mv.left_position;
    auto local = [&](int bits, const std::array<int, 2>& cyc) {
      const int l = basis.encode(SpinState::Data(bits >> 1, cyc[0], p));
      const int r = basis.encode(SpinState::Data(bits & 1, cyc[1], p + 1));
      return static_cast<std::int64_t>(l) * d + r;
    };
    for (int in = 0; in < 4; ++in) {
      const auto b = local(in, mv.before);
      const auto a = local(in, mv.after);
      trips.emplace_back(b, b, 1.0);
      trips.emplace_back(a, a, 1.0);
      for (int out = 0; out < 4; ++out) {
        const cplx amp = u(out, in);
        if (amp == cplx(0.0)) continue;
        const auto a_out = local(out, mv.after);
        trips.emplace_back(a_out, b, -amp);
        trips.emplace_back(b, a_out, -std::conj(amp));
      }
    }
  }
  return {"H_comp", d, from_triplets(static_cast<std::int64_t>(d) * d, trips)};
}

LocalTerm build_h_input_bond(const ProblemShape& shape) {
  const int m = shape.input_len;
  return diagonal_term(shape, "H_input", [m](const SpinState& l, const SpinState&) {
    return (!l.head && l.bit == 1 && l.cycle == 0 && l.position > m) ? 1.0 : 0.0;
  });
}

LocalTerm build_h_form_bond(const ProblemShape& shape) {
  const int n = shape.n_qubits;
  return diagonal_term(shape, "H_form", [n](const SpinState& l, const SpinState& r) {
    double v = 0.0;
    if (l.head) v -= 1.0;
    // a head may only follow the data spin at position N
    if (r.head && (l.head || l.position < n)) v += 2.0;
    // head counts as position 0 for the increment rule
    if (l.head && !r.head && r.position != 1) v += 1.0;
    if (!l.head && !r.head && r.position != l.position + 1) v += 1.0;
    return v;
  });
}

LocalTerm build_h_output_bond(const ProblemShape& shape) {
  const int r_final = shape.n_cycles;
  const int second_final = clock_descriptor(shape, shape.total_steps()).pattern[1];
  return diagonal_term(shape, "H_output", [=](const SpinState& l, const SpinState& r) {
    const bool reject = !l.head && l.bit == 1 && l.cycle == r_final && l.position == 1;
    const bool finished = !r.head && r.position == 2 && r.cycle == second_final;
    return reject && finished ? 1.0 : 0.0;
  });
}

HamiltonianParts build_parts(const SweepSchedule& schedule) {
  const auto& shape = schedule.shape();
  return {build_h_comp_bond(schedule), build_h_input_bond(shape), build_h_form_bond(shape),
          build_h_output_bond(shape)};
}

LocalTerm combine(const std::vector<std::pair<double, const LocalTerm*>>& terms, std::string name) {
  if (terms.empty()) throw Error("combine needs at least one term");
  const int d = terms.front().second->local_dim;
  SparseMatrix sum(static_cast<std::int64_t>(d) * d, static_cast<std::int64_t>(d) * d);
  for (const auto& [w, t] : terms) {
    if (t->local_dim != d) throw Error("local term dimension mismatch");
    if (w != 0.0) sum += w * t->matrix;
  }
  sum.prune([](std::int64_t, std::int64_t, const cplx& v) { return v != cplx(0.0); });
  sum.makeCompressed();
  return {std::move(name), d, std::move(sum)};
}

LocalTerm total_bond_term(const HamiltonianParts& parts, const CouplingConstants& c) {
  return combine({{c.j1, &parts.input},
                  {c.j2 * c.alpha, &parts.form},
                  {c.j2, &parts.comp},
                  {c.w_out, &parts.output}},
                 "H");
}

std::vector<std::pair<ConfigIndex, cplx>> ring_column(const LocalTerm& term, const SpinBasis& basis,
                                                      ConfigIndex col) {
  const int sites = basis.sites();
  const auto d = static_cast<ConfigIndex>(basis.local_dim());
  if (term.local_dim != basis.local_dim()) throw Error("local term dimension mismatch");

  std::vector<int> digit(static_cast<std::size_t>(sites));
  std::vector<ConfigIndex> weight(static_cast<std::size_t>(sites));
  ConfigIndex rest = col;
  ConfigIndex w = 1;
  for (int i = sites - 1; i >= 0; --i) {
    digit[static_cast<std::size_t>(i)] = static_cast<int>(rest % d);
    weight[static_cast<std::size_t>(i)] = w;
    rest /= d;
    w *= d;
  }

  std::vector<std::pair<ConfigIndex, cplx>> out;
  for (int i = 0; i < sites; ++i) {
    const int j = (i + 1) % sites;
    const auto li = static_cast<std::size_t>(i);
    const auto lj = static_cast<std::size_t>(j);
    const std::int64_t local_col = static_cast<std::int64_t>(digit[li]) * basis.local_dim() + digit[lj];
    for (SparseMatrix::InnerIterator it(term.matrix, local_col); it; ++it) {
      const auto new_l = static_cast<ConfigIndex>(it.row() / basis.local_dim());
      const auto new_r = static_cast<ConfigIndex>(it.row() % basis.local_dim());
      // unsigned wraparound cancels out; the result is always in range
      const ConfigIndex row = col + (new_l - static_cast<ConfigIndex>(digit[li])) * weight[li] +
                              (new_r - static_cast<ConfigIndex>(digit[lj])) * weight[lj];
      out.emplace_back(row, it.value());
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<ConfigIndex, cplx>> merged;
  for (const auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const auto& e) { return e.second == cplx(0.0); });
  return merged;
}

namespace {

ConfigIndex checked_dim(const SpinBasis& basis, ConfigIndex cap) {
  const ConfigIndex dim = basis.ring_dim();
  if (dim > cap) {
    std::ostringstream msg;
    msg << "ring dimension " << dim << " exceeds cap " << cap << "; use orbit-restricted mode";
    throw Error(msg.str());
  }
  return dim;
}

}  // namespace

RingOperator assemble_ring(const LocalTerm& term, const ProblemShape& shape, ConfigIndex cap) {
  SpinBasis basis(shape);
  const ConfigIndex dim = checked_dim(basis, cap);
  std::vector<Triplet> trips;
  for (ConfigIndex c = 0; c < dim; ++c)
    for (const auto& [row, v] : ring_column(term, basis, c))
      trips.emplace_back(static_cast<std::int64_t>(row), static_cast<std::int64_t>(c), v);
  return {shape, basis.local_dim(), dim, from_triplets(static_cast<std::int64_t>(dim), trips), term.name};
}

RingOperator assemble(const HamiltonianParts& parts, const CouplingConstants& c, const ProblemShape& shape,
                      ConfigIndex cap) {
  RingOperator op = assemble_ring(total_bond_term(parts, c), shape, cap);
  std::ostringstream tag;
  tag << std::setprecision(17) << "J1=" << c.j1 << " J2=" << c.j2 << " alpha=" << c.alpha
      << " w_out=" << c.w_out << " parts=input,form,comp,output";
  op.provenance = tag.str();
  return op;
}

RingOperator build_shift_operator(const ProblemShape& shape, ConfigIndex cap) {
  SpinBasis basis(shape);
  const ConfigIndex dim = checked_dim(basis, cap);
  const auto d = static_cast<ConfigIndex>(basis.local_dim());
  const int sites = basis.sites();
  ConfigIndex top = 1;
  for (int i = 1; i < sites; ++i) top *= d;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(dim));
  for (ConfigIndex c = 0; c < dim; ++c) {
    // site i -> i+1: the last site's spin wraps to site 0
    const ConfigIndex last = c % d;
    const ConfigIndex shifted = last * top + c / d;
    trips.emplace_back(static_cast<std::int64_t>(shifted), static_cast<std::int64_t>(c), 1.0);
  }
  return {shape, basis.local_dim(), dim, from_triplets(static_cast<std::int64_t>(dim), trips), "shift"};
}

double check_translation_invariance(const RingOperator& h, const RingOperator& shift) {
  if (h.dim != shift.dim) throw Error("dimension mismatch in translation check");
  const SparseMatrix comm = SparseMatrix(shift.matrix * h.matrix) - SparseMatrix(h.matrix * shift.matrix);
  double worst = 0.0;
  for (std::int64_t k = 0; k < comm.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(comm, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

void write_triplets(std::ostream& out, const RingOperator& op) {
  const Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t> rows(op.matrix);
  out << "% dim " << op.dim << " nnz " << rows.nonZeros() << " hermitian\n";
  out << std::setprecision(17);
  for (std::int64_t r = 0; r < rows.outerSize(); ++r)
    for (decltype(rows)::InnerIterator it(rows, r); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

SparseMatrix read_triplets(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty triplet stream");
  std::istringstream head(line);
  std::string pct, dim_kw, nnz_kw;
  std::int64_t dim = 0, nnz = 0;
  if (!(head >> pct >> dim_kw >> dim >> nnz_kw >> nnz) || pct != "%" || dim_kw != "dim" || nnz_kw != "nnz")
    throw Error("bad triplet header: " + line);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  std::int64_t r, c;
  double re, im;
  while (in >> r >> c >> re >> im) {
    if (r < 0 || c < 0 || r >= dim || c >= dim)
      throw Error("triplet (" + std::to_string(r) + "," + std::to_string(c) + ") outside dimension " +
                  std::to_string(dim));
    trips.emplace_back(r, c, cplx(re, im));
  }
  if (static_cast<std::int64_t>(trips.size()) != nnz) throw Error("triplet count does not match header");
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace tiham
