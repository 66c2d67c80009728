#include "apxgrp/group.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "apxgrp/rng.hpp"

namespace apxgrp {

void GroupTable::validate() const {
  if (order == 0 || mul.size() != size_t(order) * order || inv.size() != order)
    throw InvalidInstance("malformed group table");
  if (identity != 0) throw InvalidInstance("identity must be element 0");
  for (Eid x = 0; x < order; ++x) {
    if (at(identity, x) != x || at(x, identity) != x)
      throw InvalidInstance("identity law fails");
    if (at(x, inv[x]) != identity || at(inv[x], x) != identity)
      throw InvalidInstance("inverse law fails");
  }
  auto check = [&](Eid a, Eid b, Eid c) {
    if (at(at(a, b), c) != at(a, at(b, c)))
      throw InvalidInstance("associativity fails");
  };
  if (order <= 512) {
    for (Eid a = 0; a < order; ++a)
      for (Eid b = 0; b < order; ++b)
        for (Eid c = 0; c < order; ++c) check(a, b, c);
  } else {
    Xorshift64Star rng(0x61737330636b6564ull ^ order);
    for (int i = 0; i < 100000; ++i)
      check(static_cast<Eid>(rng.below(order)), static_cast<Eid>(rng.below(order)),
            static_cast<Eid>(rng.below(order)));
  }
}

namespace {

GroupTable make_table(uint32_t order) {
  if (order == 0) throw InvalidInstance("group order must be positive");
  if (order > kMaxGroupOrder)
    throw InvalidInstance("group order exceeds table cap of 65536");
  GroupTable t;
  t.order = order;
  t.mul.assign(size_t(order) * order, 0);
  t.inv.assign(order, 0);
  return t;
}

void fill_inverses(GroupTable& t) {
  for (Eid a = 0; a < t.order; ++a)
    for (Eid b = 0; b < t.order; ++b)
      if (t.at(a, b) == t.identity) {
        t.inv[a] = b;
        break;
      }
}

}  // namespace

GroupTable build_cyclic(uint32_t n) {
  GroupTable t = make_table(n);
  for (Eid a = 0; a < n; ++a)
    for (Eid b = 0; b < n; ++b) t.mul[size_t(a) * n + b] = (a + b) % n;
  for (Eid a = 0; a < n; ++a) t.inv[a] = (n - a) % n;
  t.validate();
  return t;
}

GroupTable build_dihedral(uint32_t n) {
  if (n == 0) throw InvalidInstance("dihedral parameter must be positive");
  uint64_t order = 2ull * n;
  if (order > kMaxGroupOrder) throw InvalidInstance("group order exceeds table cap of 65536");
  GroupTable t = make_table(static_cast<uint32_t>(order));
  // id k < n is the rotation r^k; id n+k is the reflection s r^k.
  // (s^e r^k)(s^f r^l) = s^(e+f) r^(k(-1)^f + l).
  auto id_of = [&](uint32_t refl, uint32_t k) { return refl * n + k; };
  for (uint32_t e = 0; e < 2; ++e)
    for (uint32_t k = 0; k < n; ++k)
      for (uint32_t f = 0; f < 2; ++f)
        for (uint32_t l = 0; l < n; ++l) {
          uint32_t k2 = f ? (n - k) % n : k;
          t.mul[size_t(id_of(e, k)) * t.order + id_of(f, l)] =
              id_of((e + f) % 2, (k2 + l) % n);
        }
  fill_inverses(t);
  t.validate();
  return t;
}

GroupTable build_heisenberg(uint32_t p) {
  if (p == 0) throw InvalidInstance("heisenberg parameter must be positive");
  uint64_t order = uint64_t(p) * p * p;
  if (order > kMaxGroupOrder) throw InvalidInstance("group order exceeds table cap of 65536");
  GroupTable t = make_table(static_cast<uint32_t>(order));
  // (a,b,c) = upper unitriangular with a above-left, b above-right row 2,
  // c the corner; id = a*p^2 + b*p + c.
  auto id_of = [&](uint32_t a, uint32_t b, uint32_t c) { return (a * p + b) * p + c; };
  for (uint32_t a = 0; a < p; ++a)
    for (uint32_t b = 0; b < p; ++b)
      for (uint32_t c = 0; c < p; ++c)
        for (uint32_t a2 = 0; a2 < p; ++a2)
          for (uint32_t b2 = 0; b2 < p; ++b2)
            for (uint32_t c2 = 0; c2 < p; ++c2)
              t.mul[size_t(id_of(a, b, c)) * t.order + id_of(a2, b2, c2)] =
                  id_of((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
  fill_inverses(t);
  t.validate();
  return t;
}

GroupTable build_symmetric(uint32_t n) {
  if (n == 0 || n > 6) throw InvalidInstance("symmetric group supported for 1 <= n <= 6");
  std::vector<std::vector<uint8_t>> perms;
  std::vector<uint8_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  // Lex order puts the identity permutation first, as required.
  uint32_t order = static_cast<uint32_t>(perms.size());
  GroupTable t = make_table(order);
  auto index_of = [&](const std::vector<uint8_t>& q) {
    return static_cast<Eid>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<uint8_t> r(n);
  for (Eid a = 0; a < order; ++a)
    for (Eid b = 0; b < order; ++b) {
      for (uint32_t i = 0; i < n; ++i) r[i] = perms[a][perms[b][i]];
      t.mul[size_t(a) * order + b] = index_of(r);
    }
  fill_inverses(t);
  t.validate();
  return t;
}

GroupTable build_direct_product(const GroupTable& g, const GroupTable& h) {
  uint64_t order = uint64_t(g.order) * h.order;
  if (order > kMaxGroupOrder) throw InvalidInstance("group order exceeds table cap of 65536");
  GroupTable t = make_table(static_cast<uint32_t>(order));
  auto id_of = [&](Eid a, Eid b) { return a * h.order + b; };
  for (Eid a = 0; a < g.order; ++a)
    for (Eid b = 0; b < h.order; ++b)
      for (Eid a2 = 0; a2 < g.order; ++a2)
        for (Eid b2 = 0; b2 < h.order; ++b2)
          t.mul[size_t(id_of(a, b)) * t.order + id_of(a2, b2)] =
              id_of(g.at(a, a2), h.at(b, b2));
  for (Eid a = 0; a < g.order; ++a)
    for (Eid b = 0; b < h.order; ++b) t.inv[id_of(a, b)] = id_of(g.inv[a], h.inv[b]);
  t.validate();
  return t;
}

GroupTable build_group(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw InvalidInstance("group spec must be an object with a \"kind\"");
  const std::string kind = spec.at("kind").get<std::string>();
  const nlohmann::json params =
      spec.contains("params") ? spec.at("params") : nlohmann::json::object();
  try {
    if (kind == "cyclic") return build_cyclic(params.at("n").get<uint32_t>());
    if (kind == "dihedral") return build_dihedral(params.at("n").get<uint32_t>());
    if (kind == "heisenberg") return build_heisenberg(params.at("p").get<uint32_t>());
    if (kind == "symmetric") return build_symmetric(params.at("n").get<uint32_t>());
    if (kind == "product")
      return build_direct_product(build_group(params.at("left")),
                                  build_group(params.at("right")));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("bad group spec params: ") + e.what());
  }
  throw InvalidInstance("unknown group kind: " + kind);
}

LocalProduct local_product(const LocalGroup& lg, std::span<const int64_t> elems) {
  LocalProduct r;
  if (elems.empty()) throw PreconditionViolated("local product of an empty list");
  if (elems.size() > LocalGroup::kArityCap) {
    r.fail = LocalProduct::Fail::Arity;
    return r;
  }
  int64_t sum = 0;
  for (size_t i = 0; i < elems.size(); ++i) {
    if (elems[i] < -lg.window || elems[i] > lg.window) {
      r.fail = LocalProduct::Fail::WindowExit;
      r.prefix_len = i + 1;
      r.prefix_sum = elems[i];
      return r;
    }
    sum += elems[i];
    if (sum < -lg.window || sum > lg.window) {
      r.fail = LocalProduct::Fail::WindowExit;
      r.prefix_len = i + 1;
      r.prefix_sum = sum;
      return r;
    }
  }
  r.defined = true;
  r.value = sum;
  return r;
}

std::shared_ptr<const Universe> Universe::from_table(GroupTable t) {
  t.validate();
  auto u = std::shared_ptr<Universe>(new Universe());
  u->size_ = t.order;
  u->identity_ = t.identity;
  uint64_t h = 14695981039346656037ull;
  auto mix = [&](uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(0x7461626c65ull);  // tag: table
  mix(t.order);
  for (Eid m : t.mul) mix(m);
  u->hash_ = h;
  u->table_ = std::make_unique<const GroupTable>(std::move(t));
  return u;
}

std::shared_ptr<const Universe> Universe::from_window(int64_t window) {
  if (window <= 0) throw InvalidInstance("local window must be positive");
  if (2 * window + 1 > int64_t(1) << 24)
    throw InvalidInstance("local window too large");
  auto u = std::shared_ptr<Universe>(new Universe());
  u->local_ = LocalGroup{window};
  u->size_ = u->local_->size();
  u->identity_ = static_cast<Eid>(window);
  uint64_t h = 14695981039346656037ull;
  auto mix = [&](uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(0x6c6f63616cull);  // tag: local
  mix(static_cast<uint64_t>(window));
  u->hash_ = h;
  return u;
}

}  // namespace apxgrp
