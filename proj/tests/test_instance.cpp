#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "apxgrp/certio.hpp"
#include "apxgrp/instance.hpp"
#include "helpers.hpp"

using namespace apxgrp;
using nlohmann::json;

TEST_SUITE_BEGIN("instance");

namespace {

Instance interval_instance(int n, int lo, int hi) {
  Instance inst;
  inst.group = json{{"kind", "cyclic"}, {"params", {{"n", n}}}};
  inst.set = json{{"interval", {{"lo", lo}, {"hi", hi}}}};
  return inst;
}

}  // namespace

TEST_CASE("instances round-trip byte-identically") {
  Instance inst = interval_instance(256, -16, 16);
  inst.seed = 99;
  std::string text = inst.canonical_text();
  Instance back = Instance::from_json(json::parse(text));
  CHECK(back.canonical_text() == text);
  CHECK(back.hash() == inst.hash());

  auto tmp = std::filesystem::temp_directory_path() / "apxgrp_roundtrip.json";
  write_instance_file(inst, tmp.string());
  Instance loaded = load_instance_file(tmp.string());
  CHECK(loaded.canonical_text() == text);
  std::ifstream in(tmp);
  std::string file_bytes((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  CHECK(file_bytes == text);
  std::filesystem::remove(tmp);
}

TEST_CASE("interval and explicit sets materialize with the right size") {
  Instance inst = interval_instance(256, -16, 16);
  MaterializedInstance mat = materialize(inst);
  CHECK(mat.a.count() == 33);
  CHECK(measure(mat.a, mat.ctx) == rat(1));

  Instance local;
  local.group = json{{"kind", "local"}, {"params", {{"window", 100}}}};
  local.set = json{{"interval", {{"lo", -5}, {"hi", 5}}}};
  MaterializedInstance lmat = materialize(local);
  CHECK(lmat.universe->is_local());
  CHECK(lmat.a.count() == 11);
  CHECK(lmat.a.contains(lmat.universe->identity()));
}

TEST_CASE("coset unions build subgroup translates") {
  Instance inst;
  inst.group = json{{"kind", "product"},
                    {"params",
                     {{"left", {{"kind", "cyclic"}, {"params", {{"n", 64}}}}},
                      {"right", {{"kind", "cyclic"}, {"params", {{"n", 3}}}}}}}};
  // H = <(4,0)>, A = H ∪ (1,1)H ∪ (-1,-1)H
  inst.set = json{{"coset_union",
                   {{"subgroup_generators", {12}}, {"coset_reps", {0, 4, 191}}}}};
  MaterializedInstance mat = materialize(inst);
  CHECK(mat.a.count() == 48);
  CHECK(mat.a.symmetric());
  CHECK(mat.a.contains_identity());
}

TEST_CASE("random symmetric sets regenerate identically from the seed") {
  Instance inst;
  inst.group = json{{"kind", "cyclic"}, {"params", {{"n", 1024}}}};
  inst.set = json{{"random_symmetric", {{"size", 25}, {"seed", 24221}}}};
  MaterializedInstance m1 = materialize(inst);
  MaterializedInstance m2 = materialize(inst);
  CHECK(m1.a == m2.a);
  CHECK(m1.a.symmetric());
  CHECK(m1.a.contains_identity());
  CHECK(m1.a.count() >= 25);
  CHECK(m1.a.count() <= 26);
}

TEST_CASE("empty or malformed sets are rejected") {
  Instance inst = interval_instance(64, 3, 2);
  CHECK_THROWS_AS(materialize(inst), InvalidInstance);
  Instance bad;
  bad.group = json{{"kind", "cyclic"}, {"params", {{"n", 16}}}};
  bad.set = json{{"mystery", 1}};
  CHECK_THROWS_AS(materialize(bad), InvalidInstance);
}

TEST_CASE("local element serialization uses window offsets") {
  UniverseRef u = Universe::from_window(50);
  std::vector<Eid> ids = {u->id_of_offset(-3), u->id_of_offset(0), u->id_of_offset(7)};
  json j = elements_to_json(u, ids);
  CHECK(j == json::parse("[-3,0,7]"));
  CHECK(elements_from_json(u, j) == ids);
}

TEST_CASE("certificates verify, and tampering is caught with the claim named") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "apxgrp_certio_test";
  fs::create_directories(dir);
  Instance inst = interval_instance(256, -16, 16);
  fs::path ipath = dir / "inst.json";
  write_instance_file(inst, ipath.string());

  MaterializedInstance mat = materialize(inst);
  RefineCertificate rc = sanders_refine(mat.a, 8, mat.ctx);
  json cert = make_certificate("sanders", ipath.string(), inst,
                               refine_to_json(mat.universe, rc));

  CHECK(verify_certificate(cert, dir.string()).exit_code == 0);

  json tampered = cert;
  tampered["payload"]["S"]["elements"].push_back(100);
  VerifyResult bad = verify_certificate(tampered, dir.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.detail == "refine: S^m ⊆ A^4");

  json missing = cert;
  missing["instance"]["path"] = (dir / "nope.json").string();
  CHECK(verify_certificate(missing, dir.string()).exit_code == 2);

  json wrong_hash = cert;
  wrong_hash["instance"]["hash"] = "0x0000000000000000";
  CHECK(verify_certificate(wrong_hash, dir.string()).exit_code == 2);
  fs::remove_all(dir);
}

TEST_SUITE_END();
