#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "apxgrp/setalg.hpp"

namespace apxgrp {

// A group spec plus a set spec for A, serialized with canonical key order so
// files round-trip byte-identically.
struct Instance {
  nlohmann::json group;
  nlohmann::json set;
  std::optional<uint64_t> seed;
  int schema_version = 1;

  static Instance from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string canonical_text() const;  // dump(2) + trailing newline
  uint64_t hash() const;
};

Instance load_instance_file(const std::string& path);
void write_instance_file(const Instance& inst, const std::string& path);

// Universe from a group spec; {"kind":"local"} gives a windowed local group,
// anything else an explicit table.
UniverseRef materialize_universe(const nlohmann::json& group_spec);

// Set from a set spec over the given universe. Supported kinds: explicit
// element list, interval {lo,hi}, coset-union, seeded random-symmetric.
// The result is nonempty or InvalidInstance is thrown.
GroupSet materialize_set(const UniverseRef& u, const nlohmann::json& set_spec,
                         std::optional<uint64_t> fallback_seed = std::nullopt);

struct MaterializedInstance {
  UniverseRef universe;
  GroupSet a;
  MeasureContext ctx;
};

MaterializedInstance materialize(const Instance& inst);

// Elements in user-facing form: raw ids for table groups, window offsets for
// local groups.
nlohmann::json elements_to_json(const UniverseRef& u, const std::vector<Eid>& ids);
std::vector<Eid> elements_from_json(const UniverseRef& u, const nlohmann::json& j);

}  // namespace apxgrp
