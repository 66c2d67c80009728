#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#ifndef APXGRP_CLI_PATH
#define APXGRP_CLI_PATH "apxgrp"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("apxgrp_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  std::string cmd = std::string(APXGRP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("gen, analyze, sanders, verify round trip") {
  TempDir dir;
  std::string inst = dir.file("inst.json");
  CHECK(run("gen --group '{\"kind\":\"cyclic\",\"params\":{\"n\":256}}' "
            "--set '{\"interval\":{\"lo\":-16,\"hi\":16}}' --out " + inst) == 0);
  CHECK(run("analyze --instance " + inst + " --out " + dir.file("report.json") +
            " --tsv " + dir.file("growth.tsv")) == 0);
  auto report = nlohmann::json::parse(slurp(dir.file("report.json")));
  CHECK(report["A_size"] == 33);
  CHECK(report["growth"][1]["size"] == 65);
  CHECK(report["generated"]["size"] == 256);

  std::string cert = dir.file("cert.json");
  CHECK(run("sanders --instance " + inst + " --m 8 --out " + cert) == 0);
  CHECK(run("verify-cert --cert " + cert) == 0);
  CHECK(run("verify --cert " + cert) == 0);  // alias

  // tamper: one extra element in S must fail with exit 1
  auto j = nlohmann::json::parse(slurp(cert));
  j["payload"]["S"]["elements"].push_back(100);
  write_file(dir.file("tampered.json"), j.dump(2));
  CHECK(run("verify-cert --cert " + dir.file("tampered.json")) == 1);

  // missing instance: exit 2
  auto j2 = nlohmann::json::parse(slurp(cert));
  j2["instance"]["path"] = dir.file("gone.json");
  write_file(dir.file("dangling.json"), j2.dump(2));
  CHECK(run("verify-cert --cert " + dir.file("dangling.json")) == 2);
}

TEST_CASE("pipelines self-verify and exit 0") {
  TempDir dir;
  std::string inst = dir.file("inst.json");
  REQUIRE(run("gen --group '{\"kind\":\"cyclic\",\"params\":{\"n\":256}}' "
              "--set '{\"interval\":{\"lo\":-16,\"hi\":16}}' --out " + inst) == 0);
  write_file(dir.file("X.json"), R"({"interval":{"lo":-32,"hi":32}})");
  write_file(dir.file("Y.json"), R"({"interval":{"lo":-16,"hi":16}})");
  write_file(dir.file("B.json"), R"({"interval":{"lo":0,"hi":16}})");
  write_file(dir.file("R.json"), R"({"interval":{"lo":-8,"hi":8}})");
  write_file(dir.file("Astar.json"), R"({"interval":{"lo":-24,"hi":24}})");

  CHECK(run("ruzsa --instance " + inst + " --X " + dir.file("X.json") + " --Y " +
            dir.file("Y.json") + " --out " + dir.file("ruzsa.json")) == 0);
  CHECK(run("wide --instance " + inst + " --B " + dir.file("B.json") + " --out " +
            dir.file("wide.json")) == 0);
  CHECK(run("equiv --instance " + inst + " --Astar " + dir.file("Astar.json") +
            " --out " + dir.file("equiv.json")) == 0);
  CHECK(run("normalize --instance " + inst + " --R " + dir.file("R.json") + " --out " +
            dir.file("norm.json")) == 0);
  CHECK(run("chain --instance " + inst + " --mode plain --steps 6 --out " +
            dir.file("chain.json") + " --tsv " + dir.file("chain.tsv")) == 0);
  std::string tsv = slurp(dir.file("chain.tsv"));
  CHECK(tsv.rfind("step\tS_size\tH_size\tL\n", 0) == 0);
}

TEST_CASE("oracle subcommands emit JSON answers") {
  TempDir dir;
  std::string inst = dir.file("inst.json");
  REQUIRE(run("gen --group '{\"kind\":\"cyclic\",\"params\":{\"n\":16}}' "
              "--set '{\"elements\":[0,1,2,14,15]}' --out " + inst) == 0);
  CHECK(run("oracle exact-f --instance " + inst + " --t 3/5") == 0);
  write_file(dir.file("target.json"), R"({"elements":[0,1,2,3,4]})");
  write_file(dir.file("tile.json"), R"({"elements":[0,1]})");
  CHECK(run("oracle min-cover --instance " + inst + " --target " + dir.file("target.json") +
            " --tile " + dir.file("tile.json")) == 0);
  write_file(dir.file("Bset.json"), R"({"elements":[0,1,15]})");
  CHECK(run("oracle exact-p --instance " + inst + " --n 1 --t 1/2 --B " +
            dir.file("Bset.json")) == 0);
}

TEST_CASE("bad inputs exit with code 2") {
  TempDir dir;
  CHECK(run("analyze --instance " + dir.file("no_such.json")) == 2);
  std::string inst = dir.file("empty.json");
  CHECK(run("gen --group '{\"kind\":\"cyclic\",\"params\":{\"n\":16}}' "
            "--set '{\"elements\":[]}' --out " + inst) == 2);
  CHECK(run("gen --group '{\"kind\":\"nope\"}' --set '{\"elements\":[0]}' --out " +
            dir.file("x.json")) == 2);
}

TEST_CASE("thread count does not change the certificate bytes") {
  TempDir dir;
  std::string inst = dir.file("inst.json");
  REQUIRE(run("gen --group '{\"kind\":\"cyclic\",\"params\":{\"n\":256}}' "
              "--set '{\"interval\":{\"lo\":-16,\"hi\":16}}' --out " + inst) == 0);
  REQUIRE(run("sanders --instance " + inst + " --m 8 --threads 1 --out " +
              dir.file("c1.json")) == 0);
  REQUIRE(run("sanders --instance " + inst + " --m 8 --threads 4 --out " +
              dir.file("c4.json")) == 0);
  CHECK(slurp(dir.file("c1.json")) == slurp(dir.file("c4.json")));
}

TEST_SUITE_END();
