// Copyright 2026 The Geostore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/chrono.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <string>

#include "geostore/engine.hpp"
#include "geostore/error.hpp"
#include "geostore/query.hpp"
#include "geostore/splitter.hpp"

namespace py = pybind11;
using namespace geostore;

namespace {

py::dict task_to_dict(const TaskSnapshot& t) {
  py::dict d;
  d["id"] = t.id;
  d["state"] = std::string(to_string(t.state));
  d["layer"] = t.layer.str();
  d["chunks_written"] = t.chunks_written;
  d["chunks_indexed"] = t.chunks_indexed;
  d["bytes_received"] = t.bytes_received;
  d["peak_buffered_bytes"] = t.peak_buffered_bytes;
  d["max_chunk_bytes"] = t.max_chunk_bytes;
  d["error"] = t.error;
  d["error_code"] = t.error_code ? py::object(py::str(std::string(to_string(*t.error_code))))
                                 : py::object(py::none());
  d["error_offset"] = t.error_offset;
  py::list history;
  for (auto s : t.history) history.append(std::string(to_string(s)));
  d["history"] = history;
  return d;
}

std::string_view bytes_view(const py::object& data, std::string& holder) {
  if (py::isinstance<py::bytes>(data)) {
    holder = data.cast<std::string>();
  } else {
    holder = data.cast<std::string>();  // str, encoded as UTF-8
  }
  return holder;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geospatial chunk store: split, index, query and merge documents.";

  static py::handle error_type = py::exception<Error>(m, "GeostoreError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("offset") = e.offset() ? py::object(py::int_(*e.offset())) : py::object(py::none());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def(
      "parse_query",
      [](std::string_view text) { return query::render(query::parse_query(text)); },
      py::arg("text"), "Parses a query and returns its canonical rendering.");

  m.def(
      "split",
      [](const py::object& document) {
        std::string holder;
        const auto view = bytes_view(document, holder);
        std::vector<std::string> out;
        {
          py::gil_scoped_release release;
          for (auto& c : split(view)) out.push_back(std::move(c.content));
        }
        return out;
      },
      py::arg("document"), "Splits a CityGML/XML or GeoJSON document into chunk strings.");

  py::class_<Engine>(m, "Engine")
      .def(py::init([](const std::string& store_backend, std::optional<std::string> store_path,
                       std::optional<std::string> index_path) {
             EngineConfig c;
             c.store.backend = store_backend;
             if (store_path) c.store.path = *store_path;
             if (index_path) c.index_path = std::filesystem::path(*index_path);
             py::gil_scoped_release release;
             return std::make_unique<Engine>(std::move(c));
           }),
           py::arg("store_backend") = "memory", py::arg("store_path") = py::none(),
           py::arg("index_path") = py::none())
      .def(
          "import_document",
          [](Engine& e, const py::object& data, const std::string& layer,
             std::set<std::string> tags, std::map<std::string, std::string> properties,
             std::optional<std::string> fallback_crs, bool wait) {
            std::string holder;
            const auto view = bytes_view(data, holder);
            ImportOptions o{LayerPath::parse(layer), std::move(tags), std::move(properties),
                            std::move(fallback_crs)};
            py::gil_scoped_release release;
            auto id = e.import_document(view, std::move(o));
            if (wait) e.wait_for_task(id, std::chrono::hours(1));
            return id;
          },
          py::arg("data"), py::arg("layer") = "/", py::arg("tags") = std::set<std::string>{},
          py::arg("properties") = std::map<std::string, std::string>{},
          py::arg("fallback_crs") = py::none(), py::arg("wait") = true,
          "Imports a document and returns the task id. With wait=True, returns once "
          "the task is finished or failed.")
      .def(
          "search",
          [](const Engine& e, std::string_view query, const std::string& layer) {
            std::string body;
            {
              py::gil_scoped_release release;
              body = e.search(query, LayerPath::parse(layer)).to_string();
            }
            return py::bytes(body);
          },
          py::arg("query") = "", py::arg("layer") = "/",
          "Returns the merged document of all matching chunks as bytes.")
      .def(
          "delete",
          [](Engine& e, std::string_view query, const std::string& layer, bool all) {
            py::gil_scoped_release release;
            return e.remove(query, LayerPath::parse(layer), all);
          },
          py::arg("query") = "", py::arg("layer") = "/", py::arg("all") = false)
      .def(
          "update_metadata",
          [](Engine& e, std::string_view query, const std::string& layer,
             std::map<std::string, std::string> set_properties,
             std::set<std::string> remove_properties, std::set<std::string> add_tags,
             std::set<std::string> remove_tags) {
            MetadataDelta d{std::move(set_properties), std::move(remove_properties),
                            std::move(add_tags), std::move(remove_tags)};
            py::gil_scoped_release release;
            return e.update_metadata(query, LayerPath::parse(layer), d);
          },
          py::arg("query") = "", py::arg("layer") = "/",
          py::arg("set_properties") = std::map<std::string, std::string>{},
          py::arg("remove_properties") = std::set<std::string>{},
          py::arg("add_tags") = std::set<std::string>{},
          py::arg("remove_tags") = std::set<std::string>{})
      .def(
          "task",
          [](const Engine& e, const std::string& id) -> py::object {
            auto t = e.task(id);
            return t ? py::object(task_to_dict(*t)) : py::object(py::none());
          },
          py::arg("id"))
      .def(
          "wait_for_task",
          [](const Engine& e, const std::string& id, double timeout) -> py::object {
            std::optional<TaskSnapshot> t;
            {
              py::gil_scoped_release release;
              t = e.wait_for_task(id, std::chrono::milliseconds(static_cast<long>(timeout * 1000)));
            }
            return t ? py::object(task_to_dict(*t)) : py::object(py::none());
          },
          py::arg("id"), py::arg("timeout") = 60.0)
      .def("reconcile",
           [](Engine& e) {
             ReconcileReport r;
             {
               py::gil_scoped_release release;
               r = e.reconcile();
             }
             py::dict d;
             d["rolled_back_imports"] = r.rolled_back_imports;
             d["rolled_back_chunks"] = r.rolled_back_chunks;
             d["dropped_index_entries"] = r.dropped_index_entries;
             d["reindexed"] = r.reindexed;
             return d;
           })
      .def("wait_idle", &Engine::wait_idle, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("chunk_count", [](Engine& e) { return e.store().size(); });
}
