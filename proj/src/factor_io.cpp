#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hifde/factor.hpp"

namespace hifde {

namespace {

constexpr char kMagic[8] = {'H', 'I', 'F', 'D', 'E', 'F', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { unsigned_le(v, 4); }
  void u64(std::uint64_t v) { unsigned_le(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void indices(const IndexList& idx) {
    u64(idx.size());
    for (Index i : idx) i32(i);
  }

  void vector(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }

  // row-major
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
    }
  }

  void factor(const LdlFactor& f) {
    u8(f.mode == LdlMode::kCholesky ? 0 : 1);
    indices(f.perm);
    u64(f.block_size.size());
    for (auto s : f.block_size) u8(s);
    vector(f.diag);
    vector(f.subdiag);
    matrix(f.lower);
  }

  void elimination(const EliminationRecord& r) {
    indices(r.p);
    indices(r.q);
    factor(r.fac);
    matrix(r.coupling);
  }

  void skeleton(const SkeletonRecord& r) {
    indices(r.skeleton);
    indices(r.redundant);
    matrix(r.interp);
    u8(r.redundant.empty() ? 0 : 1);
    if (!r.redundant.empty()) elimination(r.elim);
  }

 private:
  void unsigned_le(std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) {
      out_.put(static_cast<char>((v >> (8 * b)) & 0xff));
    }
  }

  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      throw std::runtime_error("factor file: unexpected end of data");
    }
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(unsigned_le(4)); }
  std::uint64_t u64() { return unsigned_le(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::uint64_t length(std::uint64_t limit) {
    const std::uint64_t n = u64();
    if (n > limit) throw std::runtime_error("factor file: bad length");
    return n;
  }

  IndexList indices() {
    IndexList idx(length(kMaxLen));
    for (auto& i : idx) i = i32();
    return idx;
  }

  Eigen::VectorXd vector() {
    Eigen::VectorXd v(static_cast<Eigen::Index>(length(kMaxLen)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }

  Eigen::MatrixXd matrix() {
    const auto rows = static_cast<Eigen::Index>(length(kMaxLen));
    const auto cols = static_cast<Eigen::Index>(length(kMaxLen));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = f64();
    }
    return m;
  }

  LdlFactor factor() {
    LdlFactor f;
    f.mode = u8() == 0 ? LdlMode::kCholesky : LdlMode::kPivoted;
    f.perm = indices();
    f.block_size.resize(length(kMaxLen));
    for (auto& s : f.block_size) s = u8();
    f.diag = vector();
    f.subdiag = vector();
    f.lower = matrix();
    return f;
  }

  EliminationRecord elimination() {
    EliminationRecord r;
    r.p = indices();
    r.q = indices();
    r.fac = factor();
    r.coupling = matrix();
    return r;
  }

  SkeletonRecord skeleton() {
    SkeletonRecord r;
    r.skeleton = indices();
    r.redundant = indices();
    r.interp = matrix();
    if (u8() != 0) r.elim = elimination();
    return r;
  }

 private:
  static constexpr std::uint64_t kMaxLen = std::uint64_t{1} << 31;

  std::uint64_t unsigned_le(int bytes) {
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= std::uint64_t{u8()} << (8 * b);
    return v;
  }

  std::istream& in_;
};

}  // namespace

void write_factor(std::ostream& out, const GeneralizedLDL& f) {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(f.dim));
  w.u64(static_cast<std::uint64_t>(f.order));
  w.f64(f.eps);
  w.u8(f.spd ? 1 : 0);
  w.u64(f.levels.size());
  for (const auto& lev : f.levels) {
    w.i32(lev.tag.whole);
    w.i32(lev.tag.num);
    w.i32(lev.tag.den);
    w.u8(static_cast<std::uint8_t>(lev.kind));
    w.u64(lev.eliminations.size());
    for (const auto& e : lev.eliminations) w.elimination(e);
    w.u64(lev.skeletons.size());
    for (const auto& s : lev.skeletons) w.skeleton(s);
  }
  w.elimination(f.terminal);
  if (!out) throw std::runtime_error("failed writing factor");
}

void write_factor(const std::string& path, const GeneralizedLDL& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_factor(out, f);
}

GeneralizedLDL read_factor(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not a factor file");
  }
  Reader r(in);
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw std::runtime_error("unsupported factor file version " +
                             std::to_string(version));
  }
  GeneralizedLDL f;
  f.dim = static_cast<int>(r.u32());
  f.order = static_cast<Index>(r.u64());
  f.eps = r.f64();
  f.spd = r.u8() != 0;
  const std::uint64_t nlev = r.length(1u << 20);
  f.levels.resize(nlev);
  for (auto& lev : f.levels) {
    lev.tag.whole = r.i32();
    lev.tag.num = r.i32();
    lev.tag.den = r.i32();
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(CellKind::kFace)) {
      throw std::runtime_error("factor file: bad cell kind");
    }
    lev.kind = static_cast<CellKind>(kind);
    lev.eliminations.resize(r.length(std::uint64_t{1} << 31));
    for (auto& e : lev.eliminations) e = r.elimination();
    lev.skeletons.resize(r.length(std::uint64_t{1} << 31));
    for (auto& s : lev.skeletons) s = r.skeleton();
  }
  f.terminal = r.elimination();
  f.metrics.top_size = static_cast<Index>(f.terminal.p.size());
  f.metrics.bytes = 8 * f.stored_values();
  return f;
}

GeneralizedLDL read_factor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_factor(in);
}

}  // namespace hifde
