#include "apxgrp/instance.hpp"

#include <fstream>
#include <sstream>

#include "apxgrp/rng.hpp"

namespace apxgrp {

Instance Instance::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInstance("instance must be a JSON object");
  Instance inst;
  try {
    inst.group = j.at("group");
    inst.set = j.at("set");
    if (j.contains("seed")) inst.seed = j.at("seed").get<uint64_t>();
    if (j.contains("schema_version")) inst.schema_version = j.at("schema_version").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("bad instance: ") + e.what());
  }
  if (inst.schema_version != 1)
    throw InvalidInstance("unsupported instance schema_version");
  return inst;
}

nlohmann::json Instance::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["group"] = group;
  j["set"] = set;
  if (seed) j["seed"] = *seed;
  return j;
}

std::string Instance::canonical_text() const { return to_json().dump(2) + "\n"; }

uint64_t Instance::hash() const {
  std::string s = canonical_text();
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("instance parse error: ") + e.what());
  }
  return Instance::from_json(j);
}

void write_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInstance("cannot write instance file: " + path);
  out << inst.canonical_text();
}

UniverseRef materialize_universe(const nlohmann::json& group_spec) {
  if (!group_spec.is_object() || !group_spec.contains("kind"))
    throw InvalidInstance("group spec must be an object with a \"kind\"");
  if (group_spec.at("kind").get<std::string>() == "local") {
    try {
      return Universe::from_window(group_spec.at("params").at("window").get<int64_t>());
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInstance(std::string("bad local group spec: ") + e.what());
    }
  }
  return Universe::from_table(build_group(group_spec));
}

namespace {

GroupSet interval_set(const UniverseRef& u, int64_t lo, int64_t hi) {
  if (lo > hi) throw InvalidInstance("interval lo > hi");
  DenseBitset bits(u->size());
  if (u->is_local()) {
    int64_t w = u->local().window;
    if (lo < -w || hi > w) throw InvalidInstance("interval outside the window");
    for (int64_t x = lo; x <= hi; ++x) bits.set(u->id_of_offset(x));
  } else {
    // Residue interval; only cyclic groups carry interval structure.
    int64_t n = u->size();
    if (hi - lo + 1 > n) throw InvalidInstance("interval longer than the group");
    for (int64_t x = lo; x <= hi; ++x) bits.set(static_cast<Eid>(((x % n) + n) % n));
  }
  return GroupSet(u, std::move(bits));
}

GroupSet coset_union_set(const UniverseRef& u, const nlohmann::json& spec) {
  if (u->is_local()) throw InvalidInstance("coset unions need a table group");
  std::vector<Eid> gens = elements_from_json(u, spec.at("subgroup_generators"));
  std::vector<Eid> reps = elements_from_json(u, spec.at("coset_reps"));
  if (reps.empty()) throw InvalidInstance("coset union needs at least one representative");
  // H = ⟨gens⟩ via closure of the symmetric generating set.
  DenseBitset seed(u->size());
  seed.set(u->identity());
  for (Eid g : gens) {
    seed.set(g);
    seed.set(u->inv(g));
  }
  GroupSet h = generated(GroupSet(u, std::move(seed))).first;
  GroupSet acc = GroupSet::empty(u);
  for (Eid r : reps) acc = set_union(acc, translate(r, h));
  return acc;
}

GroupSet random_symmetric_set(const UniverseRef& u, const nlohmann::json& spec,
                              std::optional<uint64_t> fallback_seed) {
  uint64_t size = spec.at("size").get<uint64_t>();
  uint64_t seed;
  if (spec.contains("seed"))
    seed = spec.at("seed").get<uint64_t>();
  else if (fallback_seed)
    seed = *fallback_seed;
  else
    throw InvalidInstance("random-symmetric set needs a seed");
  if (size < 1 || size > u->size())
    throw InvalidInstance("random-symmetric size out of range");

  Xorshift64Star rng(seed);
  DenseBitset bits(u->size());
  bits.set(u->identity());
  uint64_t count = 1;
  uint64_t attempts = 0;
  // Grow by inverse-closed pairs until at least `size` elements; the result
  // has size or size+1 elements.
  while (count < size) {
    if (++attempts > 64ull * u->size() + 4096)
      throw InvalidInstance("random-symmetric set generation stalled");
    Eid g = static_cast<Eid>(rng.below(u->size()));
    if (bits.test(g)) continue;
    Eid gi = u->inv(g);
    bits.set(g);
    ++count;
    if (gi != g && !bits.test(gi)) {
      bits.set(gi);
      ++count;
    }
  }
  return GroupSet(u, std::move(bits));
}

}  // namespace

GroupSet materialize_set(const UniverseRef& u, const nlohmann::json& set_spec,
                         std::optional<uint64_t> fallback_seed) {
  if (!set_spec.is_object()) throw InvalidInstance("set spec must be a JSON object");
  GroupSet result = GroupSet::empty(u);
  try {
    if (set_spec.contains("elements")) {
      result = GroupSet::of(u, elements_from_json(u, set_spec.at("elements")));
    } else if (set_spec.contains("interval")) {
      const auto& iv = set_spec.at("interval");
      result = interval_set(u, iv.at("lo").get<int64_t>(), iv.at("hi").get<int64_t>());
    } else if (set_spec.contains("coset_union")) {
      result = coset_union_set(u, set_spec.at("coset_union"));
    } else if (set_spec.contains("random_symmetric")) {
      result = random_symmetric_set(u, set_spec.at("random_symmetric"), fallback_seed);
    } else {
      throw InvalidInstance("unknown set spec kind");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("bad set spec: ") + e.what());
  }
  if (result.empty_set()) throw InvalidInstance("set spec produced an empty set");
  return result;
}

MaterializedInstance materialize(const Instance& inst) {
  UniverseRef u = materialize_universe(inst.group);
  GroupSet a = materialize_set(u, inst.set, inst.seed);
  MeasureContext ctx = MeasureContext::normalized(a);
  return MaterializedInstance{u, std::move(a), std::move(ctx)};
}

nlohmann::json elements_to_json(const UniverseRef& u, const std::vector<Eid>& ids) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eid id : ids) {
    if (u->is_local())
      arr.push_back(u->offset_of(id));
    else
      arr.push_back(id);
  }
  return arr;
}

std::vector<Eid> elements_from_json(const UniverseRef& u, const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInstance("element list must be an array");
  std::vector<Eid> ids;
  ids.reserve(j.size());
  for (const auto& v : j) {
    if (u->is_local()) {
      int64_t off = v.get<int64_t>();
      if (off < -u->local().window || off > u->local().window)
        throw InvalidInstance("element offset outside the window");
      ids.push_back(u->id_of_offset(off));
    } else {
      uint64_t id = v.get<uint64_t>();
      if (id >= u->size()) throw InvalidInstance("element id out of range");
      ids.push_back(static_cast<Eid>(id));
    }
  }
  return ids;
}

}  // namespace apxgrp
