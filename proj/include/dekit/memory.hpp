#pragma once

#include <memory>
#include <utility>
#include <variant>

#include "dekit/fourval.hpp"

namespace dekit {

enum class MemKind : uint8_t { Rom, Ram, Stub };

std::string_view mem_kind_name(MemKind k);
std::optional<MemKind> mem_kind_by_name(std::string_view name);

// A tip of the address tree: a type flag plus a four-valued payload.
struct MemCell {
  MemKind kind;
  Vec4 payload;

  bool operator==(const MemCell&) const = default;
};

// Binary address tree with cells at the tips. Address bit 0 is consumed at
// the root: F descends left, T descends right. Immutable; writes return a
// new tree sharing untouched branches.
class MemTree {
 public:
  struct Inner;
  using Ptr = std::shared_ptr<const Inner>;
  struct Inner {
    std::variant<MemCell, std::pair<Ptr, Ptr>> node;
  };

  MemTree() = default;
  explicit MemTree(Ptr root) : root_(std::move(root)) {}

  static MemTree leaf(MemCell cell);
  static MemTree node(MemTree left, MemTree right);

  bool valid() const { return root_ != nullptr; }
  bool is_leaf() const;
  const MemCell& cell() const;      // leaf only
  const MemTree left() const;       // node only
  const MemTree right() const;      // node only
  const Ptr& root() const { return root_; }

  bool operator==(const MemTree& other) const;

 private:
  Ptr root_;
};

MemTree mem_make(MemKind kind, unsigned depth, unsigned width,
                 const Vec4& fill);

// True iff the tree has uniform depth and every payload has the given width.
bool mem_wf(const MemTree& m, unsigned depth, unsigned width);

unsigned mem_depth(const MemTree& m);
unsigned mem_width(const MemTree& m);

// Boolean address: direct descent (STUB reads all-X). Unknown address bits:
// pointwise agreement over every cell reachable under a boolean completion.
Vec4 mem_read(const MemTree& m, const Vec4& addr);

// we=F: identity. we=T with a boolean address writes the addressed RAM cell.
// Unknown we or address smears all-X over every candidate RAM cell.
MemTree mem_write(const MemTree& m, const Vec4& addr, const Vec4& val,
                  Value4 we);

// Same shape, same kinds, payloads pointwise vec_approx.
bool mem_approx(const MemTree& a, const MemTree& b);

// Replaces the payload at a boolean address regardless of kind.
// Construction-time helper; not part of the write semantics.
MemTree mem_poke(const MemTree& m, uint64_t addr, const Vec4& val);

// Cell at a natural-number address (LSB selects at the root).
const MemCell& mem_cell_at(const MemTree& m, uint64_t addr);

// Line-based memory image: "<address-in-decimal> <Vec4 string>" per line,
// ';' comments. Unlisted addresses keep the fill.
MemTree mem_from_image(MemKind kind, unsigned depth, unsigned width,
                       const Vec4& fill, std::string_view text);

}  // namespace dekit
