#include <doctest.h>

#include <nlohmann/json.hpp>

#include "apxgrp/group.hpp"
#include "apxgrp/rng.hpp"
#include "helpers.hpp"

using namespace apxgrp;

TEST_SUITE_BEGIN("group");

TEST_CASE("cyclic(6) has order 6 with identity 0") {
  GroupTable t = build_cyclic(6);
  CHECK(t.order == 6);
  CHECK(t.identity == 0);
  CHECK(t.at(2, 5) == 1);
}

TEST_CASE("dihedral(4) has order 8") {
  GroupTable t = build_dihedral(4);
  CHECK(t.order == 8);
  // reflections are involutions
  for (Eid k = 4; k < 8; ++k) CHECK(t.at(k, k) == 0);
}

TEST_CASE("heisenberg(3) matches the matrix model") {
  GroupTable t = build_heisenberg(3);
  CHECK(t.order == 27);  // one element per unitriangular matrix mod 3

  // Independent model: (a,b,c) acts as [[1,a,c],[0,1,b],[0,0,1]] and
  // multiplication is matrix multiplication mod p.
  auto decode = [](Eid id) {
    return std::array<uint32_t, 3>{id / 9, (id / 3) % 3, id % 3};
  };
  auto encode = [](uint32_t a, uint32_t b, uint32_t c) {
    return static_cast<Eid>(a * 9 + b * 3 + c);
  };
  for (Eid x = 0; x < 27; ++x)
    for (Eid y = 0; y < 27; ++y) {
      auto [a, b, c] = decode(x);
      auto [a2, b2, c2] = decode(y);
      Eid expect = encode((a + a2) % 3, (b + b2) % 3, (c + c2 + a * b2) % 3);
      CHECK(t.at(x, y) == expect);
    }
}

TEST_CASE("symmetric group orders") {
  CHECK(build_symmetric(3).order == 6);
  CHECK(build_symmetric(4).order == 24);
  CHECK_THROWS_AS(build_symmetric(7), InvalidInstance);
}

TEST_CASE("direct product order is the product of factor orders") {
  GroupTable t = build_direct_product(build_cyclic(64), build_cyclic(3));
  CHECK(t.order == 192);
  CHECK(t.identity == 0);
}

TEST_CASE("inverse laws hold in every builder") {
  for (const GroupTable& t : {build_cyclic(12), build_dihedral(8), build_heisenberg(3),
                              build_symmetric(4)}) {
    for (Eid x = 0; x < t.order; ++x) {
      CHECK(t.inv[t.inv[x]] == x);
      for (Eid y = 0; y < t.order; ++y)
        CHECK(t.inv[t.at(x, y)] == t.at(t.inv[y], t.inv[x]));
    }
  }
}

TEST_CASE("group spec dispatch and rejections") {
  nlohmann::json spec = {{"kind", "cyclic"}, {"params", {{"n", 6}}}};
  CHECK(build_group(spec).order == 6);
  CHECK_THROWS_AS(build_group(nlohmann::json{{"kind", "frobnicate"}}), InvalidInstance);
  // order cap: 2 * 40000 > 65536
  nlohmann::json big = {{"kind", "dihedral"}, {"params", {{"n", 40000}}}};
  CHECK_THROWS_AS(build_group(big), InvalidInstance);
}

TEST_CASE("local products inside the window") {
  LocalGroup lg{1000};
  std::vector<int64_t> elems = {3, -2, 1};
  LocalProduct r = local_product(lg, elems);
  CHECK(r.defined);
  CHECK(r.value == 2);
}

TEST_CASE("local product arity cap at 100 factors") {
  LocalGroup lg{1000};
  std::vector<int64_t> elems(101, 1);
  LocalProduct r = local_product(lg, elems);
  CHECK_FALSE(r.defined);
  CHECK(r.fail == LocalProduct::Fail::Arity);
  std::vector<int64_t> ok(100, 1);
  CHECK(local_product(lg, ok).defined);
}

TEST_CASE("local product window exit reports the violating prefix") {
  LocalGroup lg{10};
  std::vector<int64_t> elems = {9, 9, -9};
  LocalProduct r = local_product(lg, elems);
  CHECK_FALSE(r.defined);
  CHECK(r.fail == LocalProduct::Fail::WindowExit);
  CHECK(r.prefix_len == 2);
  CHECK(r.prefix_sum == 18);
}

TEST_CASE("local product invariant under re-bracketing when prefixes stay inside") {
  LocalGroup lg{50};
  Xorshift64Star rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int64_t> elems;
    size_t len = 2 + rng.below(6);
    for (size_t i = 0; i < len; ++i) elems.push_back(int64_t(rng.below(11)) - 5);
    LocalProduct whole = local_product(lg, elems);
    if (!whole.defined) continue;
    size_t cut = 1 + rng.below(len - 1);
    LocalProduct left = local_product(lg, std::span(elems).subspan(0, cut));
    LocalProduct right = local_product(lg, std::span(elems).subspan(cut));
    if (left.defined && right.defined) {
      std::vector<int64_t> two = {left.value, right.value};
      LocalProduct merged = local_product(lg, two);
      REQUIRE(merged.defined);
      CHECK(merged.value == whole.value);
    }
  }
}

TEST_CASE("universe element ids for local windows") {
  UniverseRef u = Universe::from_window(100);
  CHECK(u->size() == 201);
  CHECK(u->identity() == 100);
  CHECK(u->offset_of(u->identity()) == 0);
  CHECK(u->mul(u->id_of_offset(99), u->id_of_offset(2)) == std::nullopt);
  CHECK(u->inv(u->id_of_offset(7)) == u->id_of_offset(-7));
}

TEST_SUITE_END();
