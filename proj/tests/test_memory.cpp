#include "dekit/memory.hpp"

#include <functional>
#include <random>

#include "doctest.h"

using namespace dekit;

namespace {

Vec4 v(const char* s) { return *vec_from_string(s); }

// All 4-valued vectors of a width.
std::vector<Vec4> all_vecs(unsigned width) {
  std::vector<Vec4> out = {{}};
  for (unsigned i = 0; i < width; ++i) {
    std::vector<Vec4> next;
    for (const auto& t : out)
      for (Value4 x : kAllValues) {
        auto u = t;
        u.push_back(x);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

// Oracle: read under every boolean completion of the address, then meet.
Vec4 oracle_unknown_read(const MemTree& m, const Vec4& addr) {
  unsigned width = mem_width(m);
  std::vector<unsigned> unknown;
  Vec4 base = addr;
  for (unsigned i = 0; i < addr.size(); ++i)
    if (!is_boolean(addr[i])) unknown.push_back(i);
  Vec4 result;
  bool first = true;
  for (unsigned mask = 0; mask < (1u << unknown.size()); ++mask) {
    Vec4 a = base;
    for (size_t k = 0; k < unknown.size(); ++k)
      a[unknown[k]] = ((mask >> k) & 1) ? Value4::T : Value4::F;
    Vec4 r = mem_read(m, a);
    if (first) {
      result = r;
      first = false;
    } else {
      for (unsigned i = 0; i < width; ++i)
        if (result[i] != r[i] || !is_boolean(r[i])) result[i] = Value4::X;
    }
  }
  // A completion landing on a STUB already reads X via mem_read.
  return result;
}

MemTree random_tree(unsigned depth, unsigned width, std::mt19937_64& rng,
                    bool mixed_kinds = true) {
  MemTree m = mem_make(MemKind::Ram, depth, width, Vec4(width, Value4::F));
  for (uint64_t i = 0; i < (uint64_t{1} << depth); ++i) {
    Vec4 payload(width, Value4::F);
    for (Value4& e : payload) e = kAllValues[rng() % 4];
    m = mem_poke(m, i, payload);
  }
  if (!mixed_kinds) return m;
  // Rebuild with random kinds per tip.
  std::function<MemTree(const MemTree&)> rekind = [&](const MemTree& t) {
    if (t.is_leaf()) {
      MemKind k = static_cast<MemKind>(rng() % 3);
      return MemTree::leaf(MemCell{k, t.cell().payload});
    }
    return MemTree::node(rekind(t.left()), rekind(t.right()));
  };
  return rekind(m);
}

MemTree weaken_tree(const MemTree& t, std::mt19937_64& rng) {
  if (t.is_leaf()) {
    MemCell c = t.cell();
    for (Value4& e : c.payload)
      if (rng() % 3 == 0) e = Value4::X;
    return MemTree::leaf(std::move(c));
  }
  return MemTree::node(weaken_tree(t.left(), rng), weaken_tree(t.right(), rng));
}

}  // namespace

TEST_CASE("mem_make shapes") {
  MemTree single = mem_make(MemKind::Ram, 0, 2, v("FF"));
  CHECK(single.is_leaf());
  CHECK(mem_wf(single, 0, 2));

  MemTree rom = mem_make(MemKind::Rom, 2, 1, v("X"));
  CHECK(mem_wf(rom, 2, 1));
  for (uint64_t i = 0; i < 4; ++i) {
    CHECK(mem_cell_at(rom, i).kind == MemKind::Rom);
    CHECK(mem_cell_at(rom, i).payload == v("X"));
  }

  MemTree stub = mem_make(MemKind::Stub, 1, 3, v("TTT"));
  CHECK(mem_wf(stub, 1, 3));
  CHECK_THROWS_AS(mem_make(MemKind::Ram, 1, 3, v("TT")),
                  std::invalid_argument);
}

TEST_CASE("mem_wf rejects bad trees") {
  MemTree good = mem_make(MemKind::Ram, 1, 2, v("FF"));
  CHECK(mem_wf(good, 1, 2));
  CHECK_FALSE(mem_wf(good, 2, 2));
  MemTree lopsided = MemTree::node(mem_make(MemKind::Ram, 1, 2, v("FF")),
                                   mem_make(MemKind::Ram, 0, 2, v("FF")));
  CHECK_FALSE(mem_wf(lopsided, 2, 2));
  MemTree badwidth = MemTree::node(MemTree::leaf(MemCell{MemKind::Ram, v("F")}),
                                   MemTree::leaf(MemCell{MemKind::Ram, v("FF")}));
  CHECK_FALSE(mem_wf(badwidth, 1, 2));
}

TEST_CASE("mem_read direct and unknown-address cases") {
  MemTree m = mem_make(MemKind::Ram, 1, 1, v("F"));
  m = mem_poke(m, 1, v("T"));
  CHECK(mem_read(m, v("T")) == v("T"));
  CHECK(mem_read(m, v("F")) == v("F"));
  CHECK(mem_read(m, v("X")) == v("X"));  // branches disagree

  MemTree agree_tree = mem_make(MemKind::Ram, 1, 1, v("T"));
  CHECK(mem_read(agree_tree, v("X")) == v("T"));  // branches agree

  MemTree stub = mem_make(MemKind::Stub, 0, 3, v("TTT"));
  CHECK(mem_read(stub, Vec4{}) == v("XXX"));

  CHECK_THROWS_AS(mem_read(m, v("TT")), std::invalid_argument);
}

TEST_CASE("mem_write basic cases") {
  MemTree m = mem_make(MemKind::Ram, 1, 2, v("FF"));
  MemTree w = mem_write(m, v("F"), v("TT"), Value4::T);
  CHECK(mem_read(w, v("F")) == v("TT"));
  CHECK(mem_read(w, v("T")) == v("FF"));

  MemTree rom = mem_make(MemKind::Rom, 1, 2, v("TF"));
  CHECK(mem_write(rom, v("F"), v("TT"), Value4::T) == rom);

  // Unknown address: smear all-X over both RAM cells.
  MemTree sm = mem_write(m, v("X"), v("TT"), Value4::T);
  CHECK(mem_cell_at(sm, 0).payload == v("XX"));
  CHECK(mem_cell_at(sm, 1).payload == v("XX"));

  // Unknown write-enable: completions {write, no-write} disagree.
  MemTree sw = mem_write(m, v("F"), v("TT"), Value4::X);
  CHECK(mem_cell_at(sw, 0).payload == v("XX"));
  CHECK(mem_cell_at(sw, 1).payload == v("FF"));

  CHECK(mem_write(m, v("F"), v("TT"), Value4::F) == m);
}

TEST_CASE("read-after-write is exhaustive at small sizes") {
  for (unsigned depth = 0; depth <= 3; ++depth) {
    for (unsigned width = 1; width <= 4; ++width) {
      MemTree m = mem_make(MemKind::Ram, depth, width, Vec4(width, Value4::F));
      uint64_t cells = uint64_t{1} << depth;
      for (uint64_t a = 0; a < cells; ++a) {
        Vec4 addr = nat_to_vec(a, depth);
        Vec4 val = nat_to_vec(a * 7 + 3, width);
        MemTree w = mem_write(m, addr, val, Value4::T);
        CHECK(mem_read(w, addr) == val);
        for (uint64_t a2 = 0; a2 < cells; ++a2)
          if (a2 != a)
            CHECK(mem_read(w, nat_to_vec(a2, depth)) ==
                  mem_read(m, nat_to_vec(a2, depth)));
      }
    }
  }
}

TEST_CASE("ROM and STUB cells never change under writes (fuzzed)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    unsigned depth = 1 + rng() % 3;
    unsigned width = 1 + rng() % 3;
    MemTree m = random_tree(depth, width, rng);
    Vec4 addr(depth, Value4::F);
    for (Value4& e : addr) e = kAllValues[rng() % 4];
    Vec4 val(width, Value4::F);
    for (Value4& e : val) e = kAllValues[rng() % 4];
    Value4 we = kAllValues[rng() % 4];
    MemTree w = mem_write(m, addr, val, we);
    for (uint64_t i = 0; i < (uint64_t{1} << depth); ++i) {
      const MemCell& before = mem_cell_at(m, i);
      const MemCell& after = mem_cell_at(w, i);
      CHECK(before.kind == after.kind);
      if (before.kind != MemKind::Ram) CHECK(before.payload == after.payload);
    }
  }
}

TEST_CASE("unknown-address read equals the completion-agreement oracle") {
  // Exhaustive over all addresses for representative small trees.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    for (unsigned depth = 1; depth <= 2; ++depth) {
      MemTree m = random_tree(depth, 2, rng);
      for (const Vec4& addr : all_vecs(depth))
        CHECK(mem_read(m, addr) == oracle_unknown_read(m, addr));
    }
  }
}

TEST_CASE("memory read/write monotonicity") {
  std::mt19937_64 rng(13);
  // Exhaustive over the (addr, we) lattice at depth<=2 width<=2 with
  // related tree pairs; fuzzed at larger depths.
  for (unsigned depth = 1; depth <= 2; ++depth) {
    for (int trees = 0; trees < 10; ++trees) {
      MemTree m2 = random_tree(depth, 2, rng);
      MemTree m1 = weaken_tree(m2, rng);
      REQUIRE(mem_approx(m1, m2));
      auto addrs = all_vecs(depth);
      for (const Vec4& a2 : addrs)
        for (const Vec4& a1 : addrs) {
          if (!vec_approx(a1, a2)) continue;
          CHECK(vec_approx(mem_read(m1, a1), mem_read(m2, a2)));
          for (Value4 we2 : kAllValues)
            for (Value4 we1 : kAllValues) {
              if (!value_approx(we1, we2)) continue;
              Vec4 v2 = nat_to_vec(rng() & 3, 2);
              Vec4 v1 = v2;
              if (rng() & 1) v1[rng() % 2] = Value4::X;
              CHECK(mem_approx(mem_write(m1, a1, v1, we1),
                               mem_write(m2, a2, v2, we2)));
            }
        }
    }
  }
  for (int trial = 0; trial < 2000; ++trial) {
    unsigned depth = 1 + rng() % 6;
    unsigned width = 1 + rng() % 4;
    MemTree m2 = random_tree(depth, width, rng);
    MemTree m1 = weaken_tree(m2, rng);
    Vec4 a2(depth, Value4::F);
    for (Value4& e : a2) e = (rng() % 4 == 0) ? Value4::X
                            : ((rng() & 1) ? Value4::T : Value4::F);
    Vec4 a1 = a2;
    for (Value4& e : a1)
      if (rng() % 3 == 0) e = Value4::X;
    Vec4 v2(width, Value4::F);
    for (Value4& e : v2) e = (rng() & 1) ? Value4::T : Value4::F;
    Vec4 v1 = v2;
    for (Value4& e : v1)
      if (rng() % 3 == 0) e = Value4::X;
    Value4 we2 = kAllValues[rng() % 3];  // F, T, X
    Value4 we1 = (rng() % 3 == 0) ? Value4::X : we2;
    CHECK(vec_approx(mem_read(m1, a1), mem_read(m2, a2)));
    CHECK(mem_approx(mem_write(m1, a1, v1, we1), mem_write(m2, a2, v2, we2)));
  }
}

TEST_CASE("memory image text format") {
  MemTree m = mem_from_image(MemKind::Rom, 2, 4, v("FFFF"),
                             "0 TTFF\n2 FTFT ; comment\n\n");
  CHECK(mem_cell_at(m, 0).payload == v("TTFF"));
  CHECK(mem_cell_at(m, 1).payload == v("FFFF"));
  CHECK(mem_cell_at(m, 2).payload == v("FTFT"));
  CHECK_THROWS(mem_from_image(MemKind::Rom, 1, 2, v("FF"), "5 TT\n"));
  CHECK_THROWS(mem_from_image(MemKind::Rom, 1, 2, v("FF"), "0 TTT\n"));
}
