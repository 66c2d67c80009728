#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "apxgrp/certio.hpp"
#include "apxgrp/chain.hpp"
#include "apxgrp/covering.hpp"
#include "apxgrp/instance.hpp"
#include "apxgrp/normality.hpp"
#include "apxgrp/oracle.hpp"
#include "apxgrp/sanders.hpp"

namespace py = pybind11;
using namespace apxgrp;

namespace {

// A materialized instance: the universe, the reference set A and its
// normalized counting measure.
struct PyInstance {
  Instance inst;
  MaterializedInstance mat;

  explicit PyInstance(const std::string& json_text)
      : inst(Instance::from_json(nlohmann::json::parse(json_text))), mat(materialize(inst)) {}
};

std::vector<Eid> to_ids(const PyInstance& pi, const std::vector<int64_t>& elems) {
  nlohmann::json arr = nlohmann::json::array();
  for (int64_t e : elems) arr.push_back(e);
  return elements_from_json(pi.mat.universe, arr);
}

std::vector<int64_t> from_ids(const PyInstance& pi, const std::vector<Eid>& ids) {
  nlohmann::json arr = elements_to_json(pi.mat.universe, ids);
  std::vector<int64_t> out;
  for (const auto& v : arr) out.push_back(v.get<int64_t>());
  return out;
}

GroupSet to_set(const PyInstance& pi, const std::vector<int64_t>& elems) {
  return GroupSet::of(pi.mat.universe, to_ids(pi, elems));
}

std::vector<int64_t> from_set(const PyInstance& pi, const GroupSet& s) {
  return from_ids(pi, s.elements());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "set algebra and refinement certificates for approximate subgroups";

  static py::exception<Error> exc(m, "ApxgrpError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  py::class_<PyInstance>(m, "Instance")
      .def(py::init<const std::string&>(), py::arg("json_text"))
      .def_property_readonly("universe_size",
                             [](const PyInstance& pi) { return pi.mat.universe->size(); })
      .def_property_readonly("is_local",
                             [](const PyInstance& pi) { return pi.mat.universe->is_local(); })
      .def_property_readonly("a", [](const PyInstance& pi) { return from_set(pi, pi.mat.a); })
      .def("canonical_text", [](const PyInstance& pi) { return pi.inst.canonical_text(); })
      .def("hash", [](const PyInstance& pi) { return hash_str(pi.inst.hash()); });

  m.def("product_set", [](const PyInstance& pi, const std::vector<int64_t>& x,
                          const std::vector<int64_t>& y) {
    return from_set(pi, product_set(to_set(pi, x), to_set(pi, y)));
  });
  m.def("power", [](const PyInstance& pi, const std::vector<int64_t>& x, unsigned n) {
    return from_set(pi, power(to_set(pi, x), n));
  });
  m.def("inverse_set", [](const PyInstance& pi, const std::vector<int64_t>& x) {
    return from_set(pi, inverse_set(to_set(pi, x)));
  });
  m.def("sym_diff", [](const PyInstance& pi, const std::vector<int64_t>& x,
                       const std::vector<int64_t>& y) {
    return from_set(pi, sym_diff(to_set(pi, x), to_set(pi, y)));
  });
  m.def("translate", [](const PyInstance& pi, int64_t g, const std::vector<int64_t>& x) {
    Eid gid = to_ids(pi, {g}).at(0);
    return from_set(pi, translate(gid, to_set(pi, x)));
  });
  m.def("measure", [](const PyInstance& pi, const std::vector<int64_t>& x) {
    return rat_str(measure(to_set(pi, x), pi.mat.ctx));
  });
  m.def("approx_constant", [](const PyInstance& pi) {
    ApproxCertificate c = approx_constant(pi.mat.a);
    return py::make_tuple(c.K, from_ids(pi, c.witness));
  });
  m.def("generated", [](const PyInstance& pi, const std::vector<int64_t>& x) {
    auto [g, n] = generated(to_set(pi, x));
    return py::make_tuple(from_set(pi, g), n);
  });

  m.def(
      "ruzsa_cover",
      [](const PyInstance& pi, const std::vector<int64_t>& x, const std::vector<int64_t>& y) {
        RuzsaCover rc = ruzsa_cover(to_set(pi, x), to_set(pi, y), pi.mat.ctx);
        return py::make_tuple(from_ids(pi, rc.translates), rc.bound.get_str());
      },
      py::arg("instance"), py::arg("x"), py::arg("y"));

  m.def(
      "sanders",
      [](const PyInstance& pi, int m_len, int search_width, int threads) {
        RefineOptions opts;
        opts.search_width = search_width;
        opts.threads = threads;
        RefineCertificate c = sanders_refine(pi.mat.a, m_len, pi.mat.ctx, opts);
        return refine_to_json(pi.mat.universe, c).dump();
      },
      py::arg("instance"), py::arg("m"), py::arg("search_width") = 8, py::arg("threads") = 1);

  m.def(
      "normalize",
      [](const PyInstance& pi, const std::vector<int64_t>& r, int search_width, int threads) {
        NormalizeOptions opts;
        opts.refine.search_width = search_width;
        opts.refine.threads = threads;
        NormalizeCertificate c = normalize_refine(pi.mat.a, to_set(pi, r), pi.mat.ctx, opts);
        return normalize_to_json(pi.mat.universe, c).dump();
      },
      py::arg("instance"), py::arg("r"), py::arg("search_width") = 8, py::arg("threads") = 1);

  m.def(
      "chain",
      [](const PyInstance& pi, const std::string& mode, int steps, int search_width,
         int threads) {
        ChainOptions opts;
        opts.refine.search_width = search_width;
        opts.refine.threads = threads;
        ChainMode cm = mode == "normal" ? ChainMode::Normal : ChainMode::Plain;
        ChainReport r = core_chain(pi.mat.a, steps, cm, pi.mat.ctx, opts);
        return chain_to_json(pi.mat.universe, r).dump();
      },
      py::arg("instance"), py::arg("mode") = "plain", py::arg("steps") = 16,
      py::arg("search_width") = 8, py::arg("threads") = 1);

  m.def(
      "oracle_exact_f",
      [](const PyInstance& pi, const std::string& t) {
        auto [v, w] = exact_f(rat_parse(t), pi.mat.a, pi.mat.ctx);
        return py::make_tuple(rat_str(v), from_set(pi, w));
      },
      py::arg("instance"), py::arg("t"));
  m.def(
      "oracle_min_cover",
      [](const PyInstance& pi, const std::vector<int64_t>& target,
         const std::vector<int64_t>& tile) {
        GroupSet tgt = to_set(pi, target);
        GroupSet tl = to_set(pi, tile);
        auto r = exact_min_cover(tgt, tl, product_set(tgt, inverse_set(tl)));
        return r ? py::cast(*r) : py::cast<py::object>(py::none());
      },
      py::arg("instance"), py::arg("target"), py::arg("tile"));

  m.def(
      "make_certificate",
      [](const PyInstance& pi, const std::string& kind, const std::string& instance_path,
         const std::string& payload_json) {
        return make_certificate(kind, instance_path, pi.inst,
                                nlohmann::json::parse(payload_json))
            .dump(2);
      },
      py::arg("instance"), py::arg("kind"), py::arg("instance_path"),
      py::arg("payload_json"));

  m.def(
      "verify_certificate",
      [](const std::string& cert_json, const std::string& base_dir) {
        VerifyResult r = verify_certificate(nlohmann::json::parse(cert_json), base_dir);
        return py::make_tuple(r.exit_code, r.detail);
      },
      py::arg("cert_json"), py::arg("base_dir") = "");
  m.def("verify_certificate_file", [](const std::string& path) {
    VerifyResult r = verify_certificate_file(path);
    return py::make_tuple(r.exit_code, r.detail);
  });
}
