#include "hifde/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hifde {

std::string LevelTag::str() const {
  if (num == 0) return std::to_string(whole);
  return std::to_string(whole) + "+" + std::to_string(num) + "/" +
         std::to_string(den);
}

// --------------------------------------------------------------------------
// DofState

DofState::DofState(Index n)
    : role_(static_cast<std::size_t>(n), DofRole::kActive),
      level_(static_cast<std::size_t>(n)),
      num_active_(n) {}

IndexList DofState::active_indices() const {
  IndexList out;
  out.reserve(static_cast<std::size_t>(num_active_));
  for (Index i = 0; i < size(); ++i) {
    if (role_[i] == DofRole::kActive) out.push_back(i);
  }
  return out;
}

void DofState::deactivate(std::span<const Index> c, LevelTag tag,
                          DofRole role) {
  for (Index i : c) {
    if (i < 0 || i >= size()) throw std::out_of_range("DofState: bad index");
    if (role_[i] != DofRole::kActive) {
      throw std::logic_error("DOF " + std::to_string(i) +
                             " deactivated twice");
    }
  }
  for (Index i : c) {
    role_[i] = role;
    level_[i] = tag;
  }
  num_active_ -= static_cast<Index>(c.size());
}

// --------------------------------------------------------------------------
// SparseSymMatrix

namespace {

bool entry_less(const SparseSymMatrix::Entry& e, Index col) {
  return e.col < col;
}

// (index, original position) sorted by index
std::vector<std::pair<Index, Index>> sorted_with_positions(
    std::span<const Index> idx) {
  std::vector<std::pair<Index, Index>> s(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    s[k] = {idx[k], static_cast<Index>(k)};
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

SparseSymMatrix::SparseSymMatrix(Index n)
    : rows_(static_cast<std::size_t>(n)), mark_(static_cast<std::size_t>(n), 0) {}

SparseSymMatrix SparseSymMatrix::from_triplets(
    Index n, std::span<const Triplet> triplets) {
  SparseSymMatrix a(n);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw std::out_of_range("triplet index out of range");
    }
    a.rows_[t.row].push_back({t.col, t.value});
    if (t.row != t.col) a.rows_[t.col].push_back({t.row, t.value});
  }
  for (auto& r : a.rows_) {
    std::sort(r.begin(), r.end(),
              [](const Entry& x, const Entry& y) { return x.col < y.col; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (out > 0 && r[out - 1].col == r[k].col) {
        r[out - 1].value += r[k].value;
      } else {
        r[out++] = r[k];
      }
    }
    r.resize(out);
  }
  return a;
}

SparseSymMatrix SparseSymMatrix::from_dense(const Eigen::MatrixXd& dense) {
  const Index n = static_cast<Index>(dense.rows());
  SparseSymMatrix a(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double v = (i >= j) ? dense(i, j) : dense(j, i);
      if (v != 0.0) a.rows_[i].push_back({j, v});
    }
  }
  return a;
}

std::size_t SparseSymMatrix::num_stored() const {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

double SparseSymMatrix::at(Index i, Index j) const {
  const auto& r = rows_.at(static_cast<std::size_t>(i));
  auto it = std::lower_bound(r.begin(), r.end(), j, entry_less);
  return (it != r.end() && it->col == j) ? it->value : 0.0;
}

bool SparseSymMatrix::has_entry(Index i, Index j) const {
  const auto& r = rows_.at(static_cast<std::size_t>(i));
  auto it = std::lower_bound(r.begin(), r.end(), j, entry_less);
  return it != r.end() && it->col == j;
}

DenseBlock SparseSymMatrix::submatrix(std::span<const Index> p,
                                      std::span<const Index> q) const {
  const Index n = order();
  for (Index i : p) {
    if (i < 0 || i >= n) throw std::out_of_range("submatrix: row index");
  }
  for (Index j : q) {
    if (j < 0 || j >= n) throw std::out_of_range("submatrix: column index");
  }
  DenseBlock block{IndexList(p.begin(), p.end()), IndexList(q.begin(), q.end()),
                   Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.size()),
                                         static_cast<Eigen::Index>(q.size()))};
  if (p.empty() || q.empty()) return block;
  const auto qs = sorted_with_positions(q);
  for (std::size_t a = 0; a < p.size(); ++a) {
    const auto& r = rows_[p[a]];
    auto it = std::lower_bound(r.begin(), r.end(), qs.front().first, entry_less);
    std::size_t b = 0;
    while (it != r.end() && b < qs.size()) {
      if (it->col < qs[b].first) {
        ++it;
      } else if (it->col > qs[b].first) {
        ++b;
      } else {
        block.values(static_cast<Eigen::Index>(a), qs[b].second) = it->value;
        ++b;
        // q may repeat an index; keep `it` for the next match
      }
    }
  }
  return block;
}

IndexList SparseSymMatrix::neighbor_set(std::span<const Index> c,
                                        const DofState* state) const {
  IndexList sorted_c(c.begin(), c.end());
  std::sort(sorted_c.begin(), sorted_c.end());
  IndexList out;
  for (Index i : c) {
    for (const Entry& e : rows_[i]) out.push_back(e.col);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](Index j) {
                             if (std::binary_search(sorted_c.begin(),
                                                    sorted_c.end(), j)) {
                               return true;
                             }
                             return state != nullptr && !state->is_active(j);
                           }),
            out.end());
  return out;
}

void SparseSymMatrix::apply_block_update(std::span<const Index> q,
                                         const Eigen::MatrixXd& delta) {
  if (delta.rows() != static_cast<Eigen::Index>(q.size()) ||
      delta.cols() != static_cast<Eigen::Index>(q.size())) {
    throw std::invalid_argument("apply_block_update: size mismatch");
  }
  if (q.empty()) return;
  const auto qs = sorted_with_positions(q);
  std::vector<Entry> merged;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const Index pa = static_cast<Index>(a);
    auto& r = rows_[q[a]];
    merged.clear();
    merged.reserve(r.size() + qs.size());
    std::size_t k = 0;
    for (const auto& [col, pb] : qs) {
      while (k < r.size() && r[k].col < col) merged.push_back(r[k++]);
      const double d = (pa >= pb) ? delta(pa, pb) : delta(pb, pa);
      if (k < r.size() && r[k].col == col) {
        merged.push_back({col, r[k].value + d});
        ++k;
      } else {
        merged.push_back({col, d});
      }
    }
    while (k < r.size()) merged.push_back(r[k++]);
    r.swap(merged);
  }
}

void SparseSymMatrix::purge(std::span<const Index> c) {
  if (mark_.size() != rows_.size()) mark_.assign(rows_.size(), 0);
  for (Index i : c) mark_[i] = 1;
  IndexList touched;
  for (Index i : c) {
    for (const Entry& e : rows_[i]) {
      if (!mark_[e.col]) touched.push_back(e.col);
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (Index j : touched) {
    auto& r = rows_[j];
    r.erase(std::remove_if(r.begin(), r.end(),
                           [&](const Entry& e) { return mark_[e.col] != 0; }),
            r.end());
  }
  for (Index i : c) {
    std::vector<Entry>().swap(rows_[i]);
    mark_[i] = 0;
  }
}

Eigen::VectorXd SparseSymMatrix::multiply(const Eigen::VectorXd& x) const {
  if (x.size() != order()) throw std::invalid_argument("multiply: size");
  Eigen::VectorXd y(order());
  for (Index i = 0; i < order(); ++i) {
    double s = 0.0;
    for (const Entry& e : rows_[i]) s += e.value * x[e.col];
    y[i] = s;
  }
  return y;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(order(), order());
  for (Index i = 0; i < order(); ++i) {
    for (const Entry& e : rows_[i]) d(i, e.col) = e.value;
  }
  return d;
}

double SparseSymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& r : rows_) {
    for (const Entry& e : r) s += e.value * e.value;
  }
  return std::sqrt(s);
}

void deactivate(SparseSymMatrix& a, DofState& state, std::span<const Index> c,
                LevelTag tag, DofRole role) {
  state.deactivate(c, tag, role);
  a.purge(c);
}

// --------------------------------------------------------------------------
// Matrix Market

void write_matrix_market(std::ostream& out, const SparseSymMatrix& a) {
  std::size_t nnz = 0;
  for (Index i = 0; i < a.order(); ++i) {
    for (const auto& e : a.row(i)) {
      if (e.col <= i) ++nnz;
    }
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.order() << ' ' << a.order() << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < a.order(); ++j) {
    // column-major lower triangle: rows i >= j of column j
    for (const auto& e : a.row(j)) {
      if (e.col >= j) out << e.col + 1 << ' ' << j + 1 << ' ' << e.value << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const SparseSymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_matrix_market(out, a);
}

SparseSymMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty Matrix Market");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  for (auto* s : {&object, &format, &field, &symmetry}) {
    std::transform(s->begin(), s->end(), s->begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
  }
  if (banner != "%%MatrixMarket" || object != "matrix" ||
      format != "coordinate" || (field != "real" && field != "integer")) {
    throw std::runtime_error("unsupported Matrix Market header: " + line);
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw std::runtime_error("unsupported symmetry: " + symmetry);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  long long rows = 0, cols = 0, nnz = 0;
  if (!(dims >> rows >> cols >> nnz) || rows != cols) {
    throw std::runtime_error("Matrix Market: expected square size line");
  }
  std::vector<SparseSymMatrix::Triplet> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("Matrix Market: truncated");
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw std::runtime_error("Matrix Market: index out of range");
    }
    // general storage lists both triangles; keep one
    if (!symmetric && i < j) continue;
    trip.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
  }
  return SparseSymMatrix::from_triplets(static_cast<Index>(rows), trip);
}

SparseSymMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(in);
}

}  // namespace hifde
