#include "dekit/memory.hpp"

#include <sstream>
#include <stdexcept>

namespace dekit {

std::string_view mem_kind_name(MemKind k) {
  switch (k) {
    case MemKind::Rom: return "ROM";
    case MemKind::Ram: return "RAM";
    case MemKind::Stub: return "STUB";
  }
  return "?";
}

std::optional<MemKind> mem_kind_by_name(std::string_view name) {
  if (name == "ROM") return MemKind::Rom;
  if (name == "RAM") return MemKind::Ram;
  if (name == "STUB") return MemKind::Stub;
  return std::nullopt;
}

MemTree MemTree::leaf(MemCell cell) {
  return MemTree(std::make_shared<const Inner>(Inner{std::move(cell)}));
}

MemTree MemTree::node(MemTree left, MemTree right) {
  return MemTree(std::make_shared<const Inner>(
      Inner{std::make_pair(std::move(left.root_), std::move(right.root_))}));
}

bool MemTree::is_leaf() const {
  return root_ && std::holds_alternative<MemCell>(root_->node);
}

const MemCell& MemTree::cell() const {
  return std::get<MemCell>(root_->node);
}

const MemTree MemTree::left() const {
  return MemTree(std::get<std::pair<Ptr, Ptr>>(root_->node).first);
}

const MemTree MemTree::right() const {
  return MemTree(std::get<std::pair<Ptr, Ptr>>(root_->node).second);
}

bool MemTree::operator==(const MemTree& other) const {
  if (root_ == other.root_) return true;
  if (!root_ || !other.root_) return false;
  if (is_leaf() != other.is_leaf()) return false;
  if (is_leaf()) return cell() == other.cell();
  return left() == other.left() && right() == other.right();
}

MemTree mem_make(MemKind kind, unsigned depth, unsigned width,
                 const Vec4& fill) {
  if (fill.size() != width)
    throw std::invalid_argument("mem_make: fill width mismatch");
  if (depth == 0) return MemTree::leaf(MemCell{kind, fill});
  MemTree sub = mem_make(kind, depth - 1, width, fill);
  return MemTree::node(sub, sub);
}

bool mem_wf(const MemTree& m, unsigned depth, unsigned width) {
  if (!m.valid()) return false;
  if (m.is_leaf())
    return depth == 0 && m.cell().payload.size() == width;
  if (depth == 0) return false;
  return mem_wf(m.left(), depth - 1, width) &&
         mem_wf(m.right(), depth - 1, width);
}

unsigned mem_depth(const MemTree& m) {
  return m.is_leaf() ? 0 : 1 + mem_depth(m.left());
}

unsigned mem_width(const MemTree& m) {
  return m.is_leaf() ? static_cast<unsigned>(m.cell().payload.size())
                     : mem_width(m.left());
}

namespace {

Vec4 read_cell(const MemCell& c) {
  if (c.kind == MemKind::Stub) return Vec4(c.payload.size(), Value4::X);
  return c.payload;
}

// Pointwise agreement: keep positions where both sides agree on a boolean.
Vec4 agree(const Vec4& a, const Vec4& b) {
  Vec4 r(a.size(), Value4::X);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i] && is_boolean(a[i])) r[i] = a[i];
  return r;
}

Vec4 read_rec(const MemTree& m, const Vec4& addr, size_t i) {
  if (m.is_leaf()) return read_cell(m.cell());
  Value4 bit = addr[i];
  if (bit == Value4::F) return read_rec(m.left(), addr, i + 1);
  if (bit == Value4::T) return read_rec(m.right(), addr, i + 1);
  return agree(read_rec(m.left(), addr, i + 1),
               read_rec(m.right(), addr, i + 1));
}

MemTree write_exact(const MemTree& m, const Vec4& addr, size_t i,
                    const Vec4& val) {
  if (m.is_leaf()) {
    if (m.cell().kind != MemKind::Ram) return m;
    return MemTree::leaf(MemCell{MemKind::Ram, val});
  }
  if (addr[i] == Value4::F)
    return MemTree::node(write_exact(m.left(), addr, i + 1, val), m.right());
  return MemTree::node(m.left(), write_exact(m.right(), addr, i + 1, val));
}

// All-X into every RAM cell addressable under some completion of addr.
MemTree write_smear(const MemTree& m, const Vec4& addr, size_t i) {
  if (m.is_leaf()) {
    const MemCell& c = m.cell();
    if (c.kind != MemKind::Ram) return m;
    return MemTree::leaf(MemCell{MemKind::Ram, Vec4(c.payload.size(), Value4::X)});
  }
  Value4 bit = addr[i];
  if (bit == Value4::F)
    return MemTree::node(write_smear(m.left(), addr, i + 1), m.right());
  if (bit == Value4::T)
    return MemTree::node(m.left(), write_smear(m.right(), addr, i + 1));
  return MemTree::node(write_smear(m.left(), addr, i + 1),
                       write_smear(m.right(), addr, i + 1));
}

}  // namespace

Vec4 mem_read(const MemTree& m, const Vec4& addr) {
  if (addr.size() != mem_depth(m))
    throw std::invalid_argument("mem_read: address width mismatch");
  return read_rec(m, addr, 0);
}

MemTree mem_write(const MemTree& m, const Vec4& addr, const Vec4& val,
                  Value4 we) {
  if (addr.size() != mem_depth(m))
    throw std::invalid_argument("mem_write: address width mismatch");
  if (val.size() != mem_width(m))
    throw std::invalid_argument("mem_write: data width mismatch");
  if (we == Value4::F) return m;
  if (we == Value4::T && is_boolean(addr)) return write_exact(m, addr, 0, val);
  return write_smear(m, addr, 0);
}

bool mem_approx(const MemTree& a, const MemTree& b) {
  if (!a.valid() || !b.valid()) return false;
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf())
    return a.cell().kind == b.cell().kind &&
           vec_approx(a.cell().payload, b.cell().payload);
  return mem_approx(a.left(), b.left()) && mem_approx(a.right(), b.right());
}

MemTree mem_poke(const MemTree& m, uint64_t addr, const Vec4& val) {
  if (m.is_leaf()) {
    if (val.size() != m.cell().payload.size())
      throw std::invalid_argument("mem_poke: data width mismatch");
    return MemTree::leaf(MemCell{m.cell().kind, val});
  }
  if (addr & 1) return MemTree::node(m.left(), mem_poke(m.right(), addr >> 1, val));
  return MemTree::node(mem_poke(m.left(), addr >> 1, val), m.right());
}

const MemCell& mem_cell_at(const MemTree& m, uint64_t addr) {
  if (m.is_leaf()) return m.cell();
  return mem_cell_at((addr & 1) ? m.right() : m.left(), addr >> 1);
}

MemTree mem_from_image(MemKind kind, unsigned depth, unsigned width,
                       const Vec4& fill, std::string_view text) {
  MemTree m = mem_make(kind, depth, width, fill);
  size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    if (auto sc = line.find(';'); sc != std::string::npos) line.resize(sc);
    std::istringstream ls(line);
    uint64_t addr;
    std::string vec;
    if (!(ls >> addr)) continue;  // blank line
    if (!(ls >> vec))
      throw std::invalid_argument("memory image line " +
                                  std::to_string(lineno) + ": missing value");
    auto v = vec_from_string(vec);
    if (!v || v->size() != width)
      throw std::invalid_argument("memory image line " +
                                  std::to_string(lineno) + ": bad value");
    if (addr >= (uint64_t{1} << depth))
      throw std::invalid_argument("memory image line " +
                                  std::to_string(lineno) +
                                  ": address out of range");
    m = mem_poke(m, addr, *v);
  }
  return m;
}

}  // namespace dekit
