// apxgrp: instance generation, analysis, covering/refinement pipelines, and
// certificate replay over finite and windowed local groups.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apxgrp/certio.hpp"
#include "apxgrp/chain.hpp"
#include "apxgrp/covering.hpp"
#include "apxgrp/instance.hpp"
#include "apxgrp/normality.hpp"
#include "apxgrp/oracle.hpp"
#include "apxgrp/sanders.hpp"

namespace {

using namespace apxgrp;

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance(std::string("cannot open ") + what + ": " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string(what) + " parse error: " + e.what());
  }
  return j;
}

GroupSet load_aux_set(const MaterializedInstance& mat, const std::string& path,
                      const char* what) {
  nlohmann::json spec = read_json_file(path, what);
  if (spec.contains("set")) spec = spec.at("set");
  return materialize_set(mat.universe, spec);
}

// Self-verification before exiting 0: every pipeline command replays its own
// certificate from disk.
int finish(const nlohmann::json& cert, const std::string& out_path) {
  write_certificate(cert, out_path);
  VerifyResult vr = verify_certificate_file(out_path);
  if (vr.exit_code != 0) {
    std::cerr << "self-verification failed: " << vr.detail << "\n";
    return vr.exit_code;
  }
  std::cout << out_path << ": verified\n";
  return 0;
}

void write_tsv(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInstance("cannot write TSV file: " + path);
  out << text;
}

struct CommonArgs {
  std::string instance_path;
  std::string out_path;
  int threads = 1;
};

int run_gen(const std::string& spec_path, const std::string& group_json,
            const std::string& set_json, std::optional<uint64_t> seed,
            const std::string& out) {
  Instance inst;
  if (!spec_path.empty()) {
    nlohmann::json spec = read_json_file(spec_path, "spec");
    inst.group = spec.at("group");
    inst.set = spec.at("set");
    if (spec.contains("seed")) inst.seed = spec.at("seed").get<uint64_t>();
  } else {
    if (group_json.empty() || set_json.empty())
      throw InvalidInstance("gen needs --spec or both --group and --set");
    inst.group = nlohmann::json::parse(group_json);
    inst.set = nlohmann::json::parse(set_json);
  }
  if (seed) inst.seed = seed;
  MaterializedInstance mat = materialize(inst);  // validate before writing
  write_instance_file(inst, out);
  std::cout << out << ": |A| = " << mat.a.count() << "\n";
  return 0;
}

int run_analyze(const std::string& instance_path, const std::string& out,
                const std::string& tsv) {
  Instance inst = load_instance_file(instance_path);
  MaterializedInstance mat = materialize(inst);
  ApproxCertificate approx = approx_constant(mat.a);

  nlohmann::json report;
  report["instance"] = instance_path;
  report["universe_size"] = mat.universe->size();
  report["A_size"] = mat.a.count();
  report["K"] = approx.K;
  report["E"] = elements_to_json(mat.universe, approx.witness);

  nlohmann::json growth = nlohmann::json::array();
  std::string tsv_text = "n\tsize\n";
  GroupSet p = mat.a;
  for (unsigned n = 1; n <= 8; ++n) {
    if (n > 1) {
      try {
        p = product_set(p, mat.a);
      } catch (const LocalOverflow&) {
        break;
      }
    }
    growth.push_back({{"n", n}, {"size", p.count()}});
    tsv_text += std::to_string(n) + "\t" + std::to_string(p.count()) + "\n";
  }
  report["growth"] = growth;

  if (!mat.universe->is_local()) {
    auto [gen, n] = generated(mat.a);
    report["generated"] = {{"size", gen.count()}, {"stabilizes_at", n}};
  }

  std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(out);
    if (!o) throw InvalidInstance("cannot write report: " + out);
    o << text;
    std::cout << out << ": written\n";
  }
  if (!tsv.empty()) write_tsv(tsv, tsv_text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"set algebra, covering and refinement certificates for approximate subgroups"};
  app.require_subcommand(1);

  // gen
  std::string gen_spec, gen_group, gen_set, gen_out;
  std::optional<uint64_t> gen_seed;
  auto* gen = app.add_subcommand("gen", "write a canonical instance file");
  gen->add_option("--spec", gen_spec, "spec JSON file with group/set");
  gen->add_option("--group", gen_group, "group spec JSON (inline)");
  gen->add_option("--set", gen_set, "set spec JSON (inline)");
  gen->add_option("--seed", gen_seed, "seed recorded in the instance");
  gen->add_option("--out", gen_out, "output instance file")->required();

  // analyze
  std::string an_instance, an_out, an_tsv;
  auto* analyze = app.add_subcommand("analyze", "K, witness, growth table, generated subgroup");
  analyze->add_option("--instance", an_instance)->required();
  analyze->add_option("--out", an_out, "report JSON (stdout when omitted)");
  analyze->add_option("--tsv", an_tsv, "growth table TSV");

  // ruzsa
  std::string rz_instance, rz_x, rz_y, rz_out;
  auto* rz = app.add_subcommand("ruzsa", "Ruzsa covering certificate for (X, Y)");
  rz->add_option("--instance", rz_instance)->required();
  rz->add_option("--X", rz_x, "set spec file for X")->required();
  rz->add_option("--Y", rz_y, "set spec file for Y")->required();
  rz->add_option("--out", rz_out)->required();

  // wide
  std::string wd_instance, wd_b, wd_out;
  auto* wd = app.add_subcommand("wide", "BB^{-1} wideness certificate");
  wd->add_option("--instance", wd_instance)->required();
  wd->add_option("--B", wd_b, "set spec file for B")->required();
  wd->add_option("--out", wd_out)->required();

  // equiv
  std::string eq_instance, eq_astar, eq_out;
  auto* eq = app.add_subcommand("equiv", "equivalence refinement certificate");
  eq->add_option("--instance", eq_instance)->required();
  eq->add_option("--Astar", eq_astar, "set spec file for A*")->required();
  eq->add_option("--out", eq_out)->required();

  // sanders
  std::string sd_instance, sd_out, sd_tsv;
  int sd_m = 8, sd_width = 8, sd_threads = 1;
  auto* sd = app.add_subcommand("sanders", "refinement certificate S^m ⊆ A^4");
  sd->add_option("--instance", sd_instance)->required();
  sd->add_option("--m", sd_m, "product length (default 8)");
  sd->add_option("--search-width", sd_width, "candidate family width");
  sd->add_option("--threads", sd_threads, "worker threads");
  sd->add_option("--out", sd_out)->required();
  sd->add_option("--tsv", sd_tsv, "schedule/f-value table");

  // normalize
  std::string nm_instance, nm_r, nm_out;
  int nm_width = 8, nm_threads = 1;
  auto* nm = app.add_subcommand("normalize", "normalized refinement certificate (S^8)^A ⊆ R^4");
  nm->add_option("--instance", nm_instance)->required();
  nm->add_option("--R", nm_r, "set spec file for R")->required();
  nm->add_option("--search-width", nm_width);
  nm->add_option("--threads", nm_threads);
  nm->add_option("--out", nm_out)->required();

  // chain
  std::string ch_instance, ch_out, ch_tsv, ch_mode = "plain";
  int ch_steps = 16, ch_width = 8, ch_threads = 1;
  auto* ch = app.add_subcommand("chain", "descending core chain report");
  ch->add_option("--instance", ch_instance)->required();
  ch->add_option("--mode", ch_mode, "plain | normal")
      ->check(CLI::IsMember({"plain", "normal"}));
  ch->add_option("--steps", ch_steps, "maximum stages (default 16)");
  ch->add_option("--search-width", ch_width);
  ch->add_option("--threads", ch_threads);
  ch->add_option("--out", ch_out)->required();
  ch->add_option("--tsv", ch_tsv, "per-stage summary TSV");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive references on tiny instances");
  oracle->require_subcommand(1);
  uint32_t bud_universe = 24;
  uint64_t bud_subsets = uint64_t(1) << 20, bud_nodes = uint64_t(1) << 22;
  int bud_depth = 2;
  std::string oracle_cache;
  oracle->add_option("--max-universe", bud_universe);
  oracle->add_option("--max-subsets", bud_subsets);
  oracle->add_option("--budget", bud_nodes, "search node budget");
  oracle->add_option("--depth", bud_depth, "max P recursion depth");
  oracle->add_option("--cache-dir", oracle_cache,
                     "cache results on disk, keyed by instance and query hash");

  std::string omc_instance, omc_target, omc_tile, omc_pool;
  auto* omc = oracle->add_subcommand("min-cover", "exact minimum translate cover");
  omc->add_option("--instance", omc_instance)->required();
  omc->add_option("--target", omc_target)->required();
  omc->add_option("--tile", omc_tile)->required();
  omc->add_option("--pool", omc_pool, "defaults to target·tile^{-1}");

  std::string oef_instance, oef_t;
  auto* oef = oracle->add_subcommand("exact-f", "exact threshold-family minimum of μ(BA)/μ(A)");
  oef->add_option("--instance", oef_instance)->required();
  oef->add_option("--t", oef_t, "threshold as an exact rational, e.g. 3/5")->required();

  std::string oep_instance, oep_t, oep_b;
  int oep_n = 2;
  auto* oep = oracle->add_subcommand("exact-p", "literal P_n^t recursion");
  oep->add_option("--instance", oep_instance)->required();
  oep->add_option("--n", oep_n)->required();
  oep->add_option("--t", oep_t)->required();
  oep->add_option("--B", oep_b, "set spec file for B")->required();

  // verify-cert
  std::string vc_cert;
  auto* vc = app.add_subcommand("verify-cert", "replay a certificate bit-exactly");
  vc->alias("verify");
  vc->add_option("--cert", vc_cert)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_gen(gen_spec, gen_group, gen_set, gen_seed, gen_out);
    if (*analyze) return run_analyze(an_instance, an_out, an_tsv);

    if (*rz) {
      Instance inst = load_instance_file(rz_instance);
      MaterializedInstance mat = materialize(inst);
      GroupSet x = load_aux_set(mat, rz_x, "X spec");
      GroupSet y = load_aux_set(mat, rz_y, "Y spec");
      RuzsaCover rc = ruzsa_cover(x, y, mat.ctx);
      nlohmann::json cert = make_certificate(
          "ruzsa", rz_instance, inst, ruzsa_to_json(mat.universe, x, y, rc));
      return finish(cert, rz_out);
    }
    if (*wd) {
      Instance inst = load_instance_file(wd_instance);
      MaterializedInstance mat = materialize(inst);
      GroupSet b = load_aux_set(mat, wd_b, "B spec");
      auto [tile, cover] = wide_from_positive(b, mat.a, mat.ctx);
      nlohmann::json cert = make_certificate(
          "wide", wd_instance, inst, wide_to_json(mat.universe, b, tile, cover));
      return finish(cert, wd_out);
    }
    if (*eq) {
      Instance inst = load_instance_file(eq_instance);
      MaterializedInstance mat = materialize(inst);
      GroupSet astar = load_aux_set(mat, eq_astar, "A* spec");
      EquivalenceResult res = equivalence_refine(mat.a, astar, mat.ctx);
      nlohmann::json cert = make_certificate(
          "equiv", eq_instance, inst, equiv_to_json(mat.universe, astar, res));
      return finish(cert, eq_out);
    }
    if (*sd) {
      Instance inst = load_instance_file(sd_instance);
      MaterializedInstance mat = materialize(inst);
      RefineOptions opts;
      opts.search_width = sd_width;
      opts.threads = sd_threads;
      RefineCertificate rc = sanders_refine(mat.a, sd_m, mat.ctx, opts);
      if (!sd_tsv.empty()) {
        std::string t = "index\tt\tf\n";
        for (const FEntry& e : rc.f_entries)
          t += std::to_string(e.index) + "\t" + rat_str(e.t) + "\t" + rat_str(e.f_hat) + "\n";
        write_tsv(sd_tsv, t);
      }
      nlohmann::json cert = make_certificate("sanders", sd_instance, inst,
                                             refine_to_json(mat.universe, rc));
      return finish(cert, sd_out);
    }
    if (*nm) {
      Instance inst = load_instance_file(nm_instance);
      MaterializedInstance mat = materialize(inst);
      GroupSet r = load_aux_set(mat, nm_r, "R spec");
      NormalizeOptions opts;
      opts.refine.search_width = nm_width;
      opts.refine.threads = nm_threads;
      NormalizeCertificate nc = normalize_refine(mat.a, r, mat.ctx, opts);
      nlohmann::json cert = make_certificate("normalize", nm_instance, inst,
                                             normalize_to_json(mat.universe, nc));
      return finish(cert, nm_out);
    }
    if (*ch) {
      Instance inst = load_instance_file(ch_instance);
      MaterializedInstance mat = materialize(inst);
      ChainOptions opts;
      opts.refine.search_width = ch_width;
      opts.refine.threads = ch_threads;
      ChainMode mode = ch_mode == "normal" ? ChainMode::Normal : ChainMode::Plain;
      ChainReport report = core_chain(mat.a, ch_steps, mode, mat.ctx, opts);
      if (!ch_tsv.empty()) {
        std::string t = "step\tS_size\tH_size\tL\n";
        for (const ChainStage& st : report.stages)
          t += std::to_string(st.index) + "\t" + std::to_string(st.s.count()) + "\t" +
               std::to_string(st.h.count()) + "\t" + std::to_string(st.wideness_L) + "\n";
        write_tsv(ch_tsv, t);
      }
      nlohmann::json cert = make_certificate("chain", ch_instance, inst,
                                             chain_to_json(mat.universe, report));
      return finish(cert, ch_out);
    }
    if (*oracle) {
      OracleBudget budget;
      budget.max_universe = bud_universe;
      budget.max_subsets = bud_subsets;
      budget.node_budget = bud_nodes;
      budget.max_P_depth = bud_depth;
      // Disk cache keyed by (instance hash, query): derived values replay
      // from the same bytes every time.
      auto cached = [&](const Instance& inst, const std::string& query,
                        const std::function<nlohmann::json()>& compute) {
        std::string key;
        if (!oracle_cache.empty()) {
          uint64_t h = inst.hash();
          for (unsigned char c : query) {
            h ^= c;
            h *= 1099511628211ull;
          }
          key = oracle_cache + "/oracle-" + hash_str(h).substr(2) + ".json";
          std::ifstream in(key);
          if (in) {
            nlohmann::json hit;
            in >> hit;
            std::cout << hit.dump(2) << "\n";
            return 0;
          }
        }
        nlohmann::json out = compute();
        if (!key.empty()) {
          std::filesystem::create_directories(oracle_cache);
          std::ofstream o(key);
          o << out.dump(2) << "\n";
        }
        std::cout << out.dump(2) << "\n";
        return 0;
      };
      if (*omc) {
        Instance inst = load_instance_file(omc_instance);
        MaterializedInstance mat = materialize(inst);
        GroupSet target = load_aux_set(mat, omc_target, "target spec");
        GroupSet tile = load_aux_set(mat, omc_tile, "tile spec");
        GroupSet pool = omc_pool.empty()
                            ? product_set(target, inverse_set(tile))
                            : load_aux_set(mat, omc_pool, "pool spec");
        std::string query = "min-cover|" + hash_str(target.hash()) + "|" +
                            hash_str(tile.hash()) + "|" + hash_str(pool.hash());
        return cached(inst, query, [&] {
          auto r = exact_min_cover(target, tile, pool, budget);
          nlohmann::json out;
          out["min_cover"] = r ? nlohmann::json(*r) : nlohmann::json(nullptr);
          out["coverable"] = r.has_value();
          return out;
        });
      }
      if (*oef) {
        Instance inst = load_instance_file(oef_instance);
        MaterializedInstance mat = materialize(inst);
        return cached(inst, "exact-f|" + rat_str(rat_parse(oef_t)), [&] {
          auto [value, witness] = exact_f(rat_parse(oef_t), mat.a, mat.ctx, budget);
          nlohmann::json out;
          out["f"] = rat_str(value);
          out["witness"] = elements_to_json(mat.universe, witness.elements());
          return out;
        });
      }
      if (*oep) {
        Instance inst = load_instance_file(oep_instance);
        MaterializedInstance mat = materialize(inst);
        GroupSet b = load_aux_set(mat, oep_b, "B spec");
        std::string query = "exact-p|" + std::to_string(oep_n) + "|" +
                            rat_str(rat_parse(oep_t)) + "|" + hash_str(b.hash());
        return cached(inst, query, [&] {
          ApproxCertificate approx = approx_constant(mat.a);
          bool v = exact_P(oep_n, rat_parse(oep_t), b, mat.a, approx.K, budget);
          nlohmann::json out;
          out["value"] = v;
          return out;
        });
      }
    }
    if (*vc) {
      VerifyResult vr = verify_certificate_file(vc_cert);
      if (vr.exit_code == 0) {
        std::cout << vc_cert << ": verified\n";
      } else {
        std::cerr << vc_cert << ": " << (vr.exit_code == 1 ? "claim failed: " : "error: ")
                  << vr.detail << "\n";
      }
      return vr.exit_code;
    }
  } catch (const InvalidInstance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
