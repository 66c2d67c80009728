#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "apxgrp/chain.hpp"
#include "apxgrp/covering.hpp"
#include "apxgrp/instance.hpp"
#include "apxgrp/normality.hpp"
#include "apxgrp/sanders.hpp"

namespace apxgrp {

struct VerifyResult {
  int exit_code = 0;    // 0 verified, 1 claim failure, 2 I/O or schema error
  std::string detail;   // first failing containment / error description
};

std::string hash_str(uint64_t h);

nlohmann::json approx_to_json(const UniverseRef& u, const ApproxCertificate& c);
nlohmann::json cover_to_json(const UniverseRef& u, const CoverCertificate& c);
nlohmann::json schedule_to_json(const Schedule& s);
nlohmann::json refine_to_json(const UniverseRef& u, const RefineCertificate& c);
nlohmann::json normalize_to_json(const UniverseRef& u, const NormalizeCertificate& c);
nlohmann::json chain_to_json(const UniverseRef& u, const ChainReport& r);
nlohmann::json ruzsa_to_json(const UniverseRef& u, const GroupSet& x, const GroupSet& y,
                             const RuzsaCover& rc);
nlohmann::json wide_to_json(const UniverseRef& u, const GroupSet& b, const GroupSet& tile,
                            const CoverCertificate& c);
nlohmann::json equiv_to_json(const UniverseRef& u, const GroupSet& astar,
                             const EquivalenceResult& r);

// Envelope: {schema_version, kind, instance: {path, hash}, payload}.
nlohmann::json make_certificate(const std::string& kind, const std::string& instance_path,
                                const Instance& inst, nlohmann::json payload);

void write_certificate(const nlohmann::json& cert, const std::string& path);

// Replays every claim in the certificate against the referenced instance.
// Missing/unreadable/mismatched instance files give exit code 2; a failed
// claim gives 1 with the claim named.
VerifyResult verify_certificate(const nlohmann::json& cert, const std::string& base_dir);
VerifyResult verify_certificate_file(const std::string& cert_path);

}  // namespace apxgrp
