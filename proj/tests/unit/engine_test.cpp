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


#include "geostore/engine.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "geostore/index_worker.hpp"
#include "geostore/query.hpp"
#include "geostore/splitter.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

namespace geostore {
namespace {

using namespace std::chrono_literals;
using testing::CityGmlOptions;
using testing::make_citygml;
using testing::make_geojson;

// Root children counted by an independent tree parser.
std::size_t count_root_children(const std::string& xml) {
  namespace pt = boost::property_tree;
  std::istringstream in(xml);
  pt::ptree tree;
  pt::read_xml(in, tree);
  std::size_t n = 0;
  for (const auto& [root_name, root] : tree) {
    if (root_name == "<xmlcomment>") continue;
    for (const auto& [name, child] : root) {
      if (name != "<xmlattr>" && name != "<xmlcomment>") ++n;
    }
  }
  return n;
}

ImportOptions at(const std::string& layer) {
  ImportOptions o;
  o.layer = LayerPath::parse(layer);
  return o;
}

TaskSnapshot finish(Engine& engine, const std::string& task_id) {
  auto snap = engine.wait_for_task(task_id, 30s);
  EXPECT_TRUE(snap.has_value());
  return snap.value_or(TaskSnapshot{});
}

std::size_t hits(const Engine& engine, std::string_view q, const std::string& layer = "/") {
  return engine.search(q, LayerPath::parse(layer)).hits();
}

TEST(Engine, ImportCityGmlFinishesWithFeatureCount) {
  Engine engine;
  CityGmlOptions o;
  o.buildings = 40;
  const auto doc = make_citygml(o);
  const auto id = engine.import_document(doc, at("/cologne"));
  const auto snap = finish(engine, id);
  EXPECT_EQ(snap.state, TaskState::kFinished);
  EXPECT_EQ(snap.chunks_written, count_root_children(doc));
  EXPECT_EQ(snap.chunks_indexed, snap.chunks_written);
  EXPECT_EQ(hits(engine, "", "/cologne"), snap.chunks_written);
  EXPECT_EQ(snap.layer.str(), "/cologne");
  ASSERT_TRUE(snap.ended_at.has_value());
  EXPECT_GE(*snap.ended_at, snap.started_at);
}

TEST(Engine, ExportReassemblesTheImport) {
  Engine engine;
  const auto doc = make_citygml(CityGmlOptions{});
  finish(engine, engine.import_document(doc, at("/c")));
  const auto out = engine.search("", LayerPath::parse("/c")).to_string();
  EXPECT_EQ(count_root_children(out), count_root_children(doc));
  // Chunk bytes survive verbatim and in order.
  auto chunks = split(doc);
  std::size_t pos = 0;
  for (const auto& c : chunks) {
    pos = out.find(c.content, pos);
    ASSERT_NE(pos, std::string::npos);
    pos += c.content.size();
  }
}

TEST(Engine, TagsAndPropertiesReachEveryChunk) {
  Engine engine;
  auto o = at("/t");
  o.tags = {"lod2"};
  o.properties = {{"source", "survey"}};
  const auto snap = finish(engine, engine.import_document(make_citygml(CityGmlOptions{}), o));
  EXPECT_EQ(hits(engine, "lod2"), snap.chunks_written);
  EXPECT_EQ(hits(engine, "EQ(source survey)"), snap.chunks_written);
  EXPECT_EQ(hits(engine, "LOD2"), snap.chunks_written);
}

TEST(Engine, FallbackCrsOnlyWhenContentHasNone) {
  Engine engine;
  auto o = at("/crs");
  o.fallback_crs = "EPSG:4326";
  finish(engine, engine.import_document(make_geojson(3), o));
  CityGmlOptions g;
  g.buildings = 2;
  finish(engine, engine.import_document(make_citygml(g), o));
  std::map<std::string, std::size_t> seen;
  engine.store().scan([&](const ChunkId& id) {
    seen[engine.store().get_metadata(id).crs.value_or("-")]++;
  });
  EXPECT_EQ(seen["EPSG:4326"], 3u);
  EXPECT_EQ(seen["EPSG:25832"], 3u);
}

TEST(Engine, MalformedImportFailsAndRollsBack) {
  Engine engine;
  auto doc = make_citygml(CityGmlOptions{});
  const auto cut = doc.rfind("</core:CityModel>");
  doc.replace(cut, std::string::npos, "<broken></core:CityModel>\n");
  std::unique_ptr<ImportSession> session = engine.begin_import(at("/bad"));
  const auto id = session->task_id();
  EXPECT_THROW(
      {
        for (std::size_t i = 0; i < doc.size(); i += 100) session->feed(doc.substr(i, 100));
        session->finish();
      },
      Error);
  const auto snap = engine.task(id);
  ASSERT_TRUE(snap);
  EXPECT_EQ(snap->state, TaskState::kFailed);
  EXPECT_TRUE(snap->error.has_value());
  EXPECT_EQ(snap->error_code, ErrorCode::kXmlMalformed);
  ASSERT_TRUE(snap->error_offset.has_value());
  EXPECT_GT(*snap->error_offset, doc.size() / 2);
  EXPECT_GT(snap->chunks_written, 0u);
  engine.wait_idle();
  EXPECT_EQ(engine.store().size(), 0u);
  EXPECT_EQ(engine.index().size(), 0u);
  EXPECT_TRUE(engine.store().pending_imports().empty());
}

TEST(Engine, UnsupportedFormatAndEmptyBodyFail) {
  Engine engine;
  try {
    engine.import_document("hello", at("/x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedFormat);
  }
  try {
    engine.import_document("", at("/x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Engine, AbandonedSessionRollsBack) {
  Engine engine;
  const auto doc = make_citygml(CityGmlOptions{});
  std::string id;
  {
    auto s = engine.begin_import(at("/gone"));
    id = s->task_id();
    s->feed(doc.substr(0, doc.size() - 40));
  }
  EXPECT_EQ(engine.task(id)->state, TaskState::kFailed);
  engine.wait_idle();
  EXPECT_EQ(engine.store().size(), 0u);
}

TEST(Engine, SearchErrors) {
  Engine engine;
  finish(engine, engine.import_document(make_geojson(5), at("/a/b")));
  try {
    engine.search("AND(", LayerPath());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_TRUE(e.offset().has_value());
  }
  try {
    engine.search("", LayerPath::parse("/never"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  // A known layer with no hits yields an empty collection.
  const auto r = engine.search("nothingmatchesthis", LayerPath::parse("/a"));
  EXPECT_EQ(r.hits(), 0u);
  EXPECT_FALSE(r.to_string().empty());
  EXPECT_EQ(hits(engine, "", "/a"), 5u);
}

TEST(Engine, MixedFormatsAreIncompatible) {
  Engine engine;
  finish(engine, engine.import_document(make_geojson(2), at("/m")));
  finish(engine, engine.import_document(make_citygml(CityGmlOptions{}), at("/m")));
  try {
    engine.search("", LayerPath::parse("/m"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleParents);
  }
}

TEST(Engine, GeoJsonExportIsValidJson) {
  Engine engine;
  finish(engine, engine.import_document(make_geojson(30, 4), at("/g")));
  finish(engine, engine.import_document(make_geojson(20, 5), at("/g/h")));
  const auto r = engine.search("", LayerPath::parse("/g"));
  EXPECT_EQ(r.format(), Format::kGeoJson);
  EXPECT_EQ(r.content_type(), "application/geo+json");
  const auto j = nlohmann::json::parse(r.to_string());
  EXPECT_EQ(j["features"].size(), 50u);
}

TEST(Engine, LayerHierarchy) {
  Engine engine;
  const std::vector<std::string> layers = {"/a", "/a/b", "/a/b/c", "/a/d", "/e"};
  for (const auto& l : layers) finish(engine, engine.import_document(make_geojson(2), at(l)));
  for (const auto& q : layers) {
    std::size_t expected = 0;
    for (const auto& l : layers) {
      if (LayerPath::parse(q).is_ancestor_or_self_of(LayerPath::parse(l))) expected += 2;
    }
    EXPECT_EQ(hits(engine, "", q), expected) << q;
  }
  EXPECT_EQ(hits(engine, ""), 10u);
}

TEST(Engine, DeleteNeedsGuardForEmptyQuery) {
  Engine engine;
  finish(engine, engine.import_document(make_geojson(4), at("/s")));
  EXPECT_THROW(engine.remove("", LayerPath::parse("/s"), false), Error);
  EXPECT_THROW(engine.remove("   ", LayerPath::parse("/s"), false), Error);
  EXPECT_EQ(engine.remove("zzzz", LayerPath::parse("/s"), false), 0u);
  EXPECT_EQ(engine.remove("", LayerPath::parse("/s"), true), 4u);
  EXPECT_EQ(engine.store().size(), 0u);
  EXPECT_EQ(engine.index().size(), 0u);
}

TEST(Engine, WorkflowOnCologneData) {
  Engine engine;
  CityGmlOptions o;
  o.buildings = 80;
  finish(engine, engine.import_document(make_citygml(o), at("/")));
  CityGmlOptions other = o;
  other.city = "Bonn";
  other.id_prefix = "N";
  other.seed = 2;
  finish(engine, engine.import_document(make_citygml(other), at("/")));

  MetadataDelta mark;
  mark.set_properties = {{"deleted", "2018-09-13"}};
  const auto marked = engine.update_metadata("AND(Schildergasse Köln)", LayerPath(), mark);
  EXPECT_EQ(marked, 20u);
  EXPECT_EQ(hits(engine, "LTE(deleted 2018-09-13)"), marked);

  CityGmlOptions update = o;
  update.buildings = 8;
  update.streets = {"Schildergasse"};
  update.id_prefix = "U";
  update.seed = 9;
  update.envelope = false;
  finish(engine, engine.import_document(make_citygml(update), at("/")));

  // New Schildergasse models plus the unmarked Cologne ones.
  const auto current = hits(engine, "AND(NOT(LTE(deleted 2018-09-13)) Köln)");
  EXPECT_EQ(current, 60u + 8u);

  // Marked in 2017: only these are removed.
  MetadataDelta old;
  old.set_properties = {{"deleted", "2017-12-31"}};
  EXPECT_EQ(engine.update_metadata("AND(Hohe Bonn)", LayerPath(), old), 20u);
  EXPECT_EQ(engine.remove("LT(deleted 2018)", LayerPath(), false), 20u);
  EXPECT_EQ(hits(engine, "Bonn"), 60u);
  EXPECT_EQ(hits(engine, "LTE(deleted 2018-09-13)"), marked);
}

TEST(Engine, MetadataLastWriteWinsAndNoOps) {
  Engine engine;
  finish(engine, engine.import_document(make_geojson(6), at("/p")));
  MetadataDelta a;
  a.set_properties = {{"k", "1"}};
  EXPECT_EQ(engine.update_metadata("", LayerPath(), a), 6u);
  EXPECT_EQ(engine.update_metadata("", LayerPath(), a), 0u);
  MetadataDelta b;
  b.set_properties = {{"k", "2"}};
  EXPECT_EQ(engine.update_metadata("", LayerPath(), b), 6u);
  EXPECT_EQ(hits(engine, "EQ(k 2)"), 6u);
  EXPECT_EQ(hits(engine, "EQ(k 1)"), 0u);
  engine.store().scan([&](const ChunkId& id) {
    EXPECT_EQ(engine.store().get_metadata(id).properties.size(), 1u);
  });
  MetadataDelta rm;
  rm.remove_tags = {"absent"};
  EXPECT_EQ(engine.update_metadata("", LayerPath(), rm), 0u);
  EXPECT_THROW(engine.update_metadata("", LayerPath(), MetadataDelta{}), Error);
}

TEST(Engine, ThrottledIndexerShowsAsyncContract) {
  EngineConfig cfg;
  cfg.index_batch_size = 4;
  Engine engine(cfg);
  std::atomic<bool> slow{true};
  engine.set_index_throttle([&] {
    while (slow.load()) std::this_thread::sleep_for(1ms);
  });
  const auto id = engine.import_document(make_geojson(40), at("/async"));
  auto snap = engine.task(id);
  ASSERT_TRUE(snap);
  EXPECT_EQ(snap->state, TaskState::kIndexing);
  EXPECT_EQ(snap->chunks_written, 40u);
  EXPECT_LT(snap->chunks_indexed, snap->chunks_written);
  EXPECT_LT(hits(engine, "", "/async"), 40u);
  slow = false;
  snap = finish(engine, id);
  EXPECT_EQ(snap->state, TaskState::kFinished);
  const std::vector<TaskState> expected = {TaskState::kAccepted, TaskState::kSplitting,
                                           TaskState::kIndexing, TaskState::kFinished};
  EXPECT_EQ(snap->history, expected);
  EXPECT_EQ(hits(engine, "", "/async"), 40u);
}

TEST(Engine, TaskRetention) {
  EngineConfig cfg;
  cfg.task_retention = 0ms;
  Engine engine(cfg);
  const auto id = engine.import_document(make_geojson(1), at("/r"));
  engine.wait_idle();
  std::this_thread::sleep_for(5ms);
  EXPECT_FALSE(engine.task(id).has_value());
  EXPECT_FALSE(engine.task("nope").has_value());
}

TEST(Engine, ConcurrentImportsAndSearchesNeverDuplicate) {
  Engine engine;
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!stop) {
      try {
        const auto r = engine.search("", LayerPath());
        if (r.hits() == 0) continue;
        const auto j = nlohmann::json::parse(r.to_string());
        std::set<std::string> names;
        for (const auto& f : j["features"]) {
          if (!names.insert(f["properties"]["name"].get<std::string>() + "#" +
                            f["geometry"].dump())
                   .second) {
            ++bad;
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotFound) ++bad;
      } catch (...) {
        ++bad;
      }
    }
  });
  std::vector<std::thread> writers;
  std::vector<std::string> ids(4);
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&, w] {
      ids[w] = engine.import_document(make_geojson(200, 100 + w), at("/c/" + std::to_string(w)));
    });
  }
  for (auto& t : writers) t.join();
  for (const auto& id : ids) EXPECT_EQ(finish(engine, id).state, TaskState::kFinished);
  stop = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(hits(engine, ""), 800u);
}

TEST(Engine, PersistentEngineSurvivesRestart) {
  testing::TempDir dir("geostore-engine");
  EngineConfig cfg;
  cfg.store = {"filesystem", dir.path / "store", false};
  cfg.index_path = dir.path / "index";
  {
    Engine engine(cfg);
    finish(engine, engine.import_document(make_citygml(CityGmlOptions{}), at("/p")));
    MetadataDelta d;
    d.add_tags = {"kept"};
    engine.update_metadata("", LayerPath(), d);
  }
  Engine engine(cfg);
  EXPECT_EQ(engine.startup_report().reindexed, 0u);
  EXPECT_EQ(engine.startup_report().dropped_index_entries, 0u);
  EXPECT_EQ(hits(engine, "kept", "/p"), 11u);
  EXPECT_EQ(engine.search("", LayerPath::parse("/p")).to_string().substr(0, 5), "<?xml");
}

TEST(Engine, ReconcileRepairsDivergence) {
  testing::TempDir dir("geostore-reconcile");
  EngineConfig cfg;
  cfg.store = {"filesystem", dir.path / "store", false};
  cfg.index_path = dir.path / "index";
  std::vector<ChunkId> ids;
  {
    Engine engine(cfg);
    finish(engine, engine.import_document(make_geojson(10), at("/r")));
    engine.store().scan([&](const ChunkId& id) { ids.push_back(id); });
    std::sort(ids.begin(), ids.end());
    // Chunk without index entry, index entry without chunk.
    engine.wait_idle();
    engine.index().remove({ids[0]});
    engine.store().remove({ids[1]});
    // An import that never completed.
    auto p = std::make_shared<Parents>();
    p->format = Format::kGeoJson;
    engine.store().begin_import("interrupted");
    StoredEntry e;
    e.id = ChunkId::generate();
    e.content = R"({"type":"Feature","properties":{},"geometry":null})";
    e.parents = p;
    e.metadata.import_id = "interrupted";
    e.metadata.format = Format::kGeoJson;
    engine.store().put(e);
  }
  Engine engine(cfg);
  const auto& r = engine.startup_report();
  EXPECT_EQ(r.rolled_back_imports, 1u);
  EXPECT_EQ(r.rolled_back_chunks, 1u);
  EXPECT_EQ(r.dropped_index_entries, 1u);
  EXPECT_EQ(r.reindexed, 1u);
  EXPECT_EQ(engine.store().size(), 9u);
  EXPECT_EQ(engine.index().size(), 9u);
  EXPECT_TRUE(engine.store().pending_imports().empty());
  const auto again = engine.reconcile();
  EXPECT_EQ(again.reindexed + again.dropped_index_entries + again.rolled_back_chunks, 0u);
}

TEST(Engine, OverloadedQueueRejectsMetadataOps) {
  EngineConfig cfg;
  cfg.max_pending_index_jobs = 1;
  Engine engine(cfg);
  std::atomic<bool> hold{true};
  std::atomic<int> entered{0};
  engine.set_index_throttle([&] {
    ++entered;
    while (hold.load()) std::this_thread::sleep_for(1ms);
  });
  auto background = [&] {
    try {
      engine.remove("x", LayerPath(), false);
    } catch (...) {
    }
  };
  std::thread running(background);
  while (entered.load() == 0) std::this_thread::sleep_for(1ms);
  std::thread queued(background);
  std::this_thread::sleep_for(50ms);
  try {
    engine.remove("y", LayerPath(), false);
    ADD_FAILURE() << "expected overload";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverloaded);
  }
  EXPECT_THROW(engine.begin_import(at("/o")), Error);
  hold = false;
  running.join();
  queued.join();
}

}  // namespace
}  // namespace geostore
