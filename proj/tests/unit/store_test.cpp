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

#include "geostore/store.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "geostore/error.hpp"
#include "support/tempdir.hpp"

namespace geostore {
namespace {

namespace fs = std::filesystem;

struct TempDir : testing::TempDir {
  TempDir() : testing::TempDir("geostore-store") {}
};

std::shared_ptr<const Parents> xml_parents(const std::string& root = "r") {
  auto p = std::make_shared<Parents>();
  p->declaration = "<?xml version=\"1.0\"?>\n<!-- c -->";
  p->root_start = "<" + root + " xmlns:gml=\"urn:gml\">";
  p->root_end = "</" + root + ">";
  return p;
}

StoredEntry entry(const std::string& id, const std::string& content,
                  const std::string& layer = "/a/b", const std::string& import = "imp1") {
  StoredEntry e;
  e.id = ChunkId{id};
  e.content = content;
  e.parents = xml_parents();
  e.metadata.layer = LayerPath::parse(layer);
  e.metadata.import_id = import;
  e.metadata.import_timestamp = 1536825600000;
  e.metadata.tags = {"lod2", "with space"};
  e.metadata.properties = {{"owner", "city of Köln"}, {"pct", "100%\n"}};
  e.metadata.crs = "EPSG:25832";
  e.sequence = 7;
  return e;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

// The same black-box contract for every backend.
class StoreContract : public ::testing::TestWithParam<std::string> {
 protected:
  void SetUp() override { store_ = open(); }
  std::unique_ptr<ChunkStore> open() {
    if (GetParam() == "memory") return make_memory_store();
    return make_filesystem_store(dir_.path);
  }
  TempDir dir_;
  std::unique_ptr<ChunkStore> store_;
};

TEST_P(StoreContract, PutGetRoundTrip) {
  std::string binary("a\0b\xff\xfe\n\r", 7);
  auto e = entry("c1", binary);
  store_->put(e);
  auto got = store_->get(e.id);
  EXPECT_EQ(got.content, binary);
  EXPECT_EQ(got.metadata, e.metadata);
  EXPECT_EQ(got.sequence, 7u);
  ASSERT_TRUE(got.parents);
  EXPECT_EQ(*got.parents, *e.parents);
  EXPECT_EQ(store_->get_metadata(e.id), e.metadata);
}

TEST_P(StoreContract, DuplicatePut) {
  store_->put(entry("c1", "x"));
  EXPECT_EQ(code_of([&] { store_->put(entry("c1", "y")); }), ErrorCode::kDuplicateId);
  EXPECT_EQ(store_->get(ChunkId{"c1"}).content, "x");
}

TEST_P(StoreContract, ManyEntriesBitIdentical) {
  std::mt19937_64 rng(1);
  std::vector<std::size_t> hashes;
  const int n = GetParam() == "memory" ? 10000 : 2000;
  for (int i = 0; i < n; ++i) {
    std::string content(1 + rng() % 200, '\0');
    for (auto& c : content) c = static_cast<char>(rng());
    hashes.push_back(std::hash<std::string>{}(content));
    store_->put(entry("e" + std::to_string(i), content, "/l" + std::to_string(i % 5)));
  }
  EXPECT_EQ(store_->size(), std::size_t(n));
  for (int k = 0; k < 100; ++k) {
    const auto i = rng() % n;
    EXPECT_EQ(std::hash<std::string>{}(store_->get(ChunkId{"e" + std::to_string(i)}).content),
              hashes[i]);
  }
}

TEST_P(StoreContract, NotFound) {
  EXPECT_EQ(code_of([&] { store_->get(ChunkId{"nope"}); }), ErrorCode::kNotFound);
  store_->put(entry("c1", "x"));
  store_->remove({ChunkId{"c1"}});
  EXPECT_EQ(code_of([&] { store_->get(ChunkId{"c1"}); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { store_->update_metadata(ChunkId{"c1"}, {}); }),
            ErrorCode::kNotFound);
}

TEST_P(StoreContract, DeleteCounts) {
  for (auto id : {"a", "b", "c"}) store_->put(entry(id, id));
  EXPECT_EQ(store_->remove({ChunkId{"a"}, ChunkId{"b"}, ChunkId{"c"}}), 3u);
  EXPECT_EQ(store_->remove({ChunkId{"a"}, ChunkId{"b"}, ChunkId{"c"}}), 0u);
  store_->put(entry("d", "d"));
  EXPECT_EQ(store_->remove({ChunkId{"d"}, ChunkId{"zz"}}), 1u);
  EXPECT_EQ(store_->size(), 0u);
}

TEST_P(StoreContract, UpdateMetadata) {
  store_->put(entry("c1", "x"));
  MetadataDelta d;
  d.set_properties["deleted"] = "2018-09-13";
  d.remove_tags.insert("lod2");
  d.add_tags.insert("historic");
  EXPECT_TRUE(store_->update_metadata(ChunkId{"c1"}, d));
  EXPECT_FALSE(store_->update_metadata(ChunkId{"c1"}, d));
  auto m = store_->get(ChunkId{"c1"}).metadata;
  EXPECT_EQ(m.properties.at("deleted"), "2018-09-13");
  EXPECT_EQ(m.tags, (std::set<std::string>{"historic", "with space"}));
  EXPECT_EQ(m.layer, LayerPath::parse("/a/b"));
  EXPECT_EQ(store_->get(ChunkId{"c1"}).content, "x");
}

TEST_P(StoreContract, ConcurrentUpdatesToDifferentKeys) {
  store_->put(entry("c1", "x"));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        MetadataDelta d;
        d.set_properties["k" + std::to_string(t)] = std::to_string(i);
        store_->update_metadata(ChunkId{"c1"}, d);
      }
    });
  }
  for (auto& th : threads) th.join();
  auto m = store_->get_metadata(ChunkId{"c1"});
  for (int t = 0; t < 8; ++t) EXPECT_EQ(m.properties.at("k" + std::to_string(t)), "19");
}

TEST_P(StoreContract, Scan) {
  std::size_t n = 0;
  store_->scan([&](const ChunkId&) { ++n; });
  EXPECT_EQ(n, 0u);
  for (int i = 0; i < 50; ++i) store_->put(entry("s" + std::to_string(i), "x"));
  std::multiset<std::string> seen;
  store_->scan([&](const ChunkId& id) { seen.insert(id.value); });
  EXPECT_EQ(seen.size(), 50u);
  EXPECT_EQ(std::set<std::string>(seen.begin(), seen.end()).size(), 50u);
}

TEST_P(StoreContract, ScanDuringConcurrentPuts) {
  for (int i = 0; i < 100; ++i) store_->put(entry("p" + std::to_string(i), "x"));
  std::atomic<bool> done{false};
  std::thread writer([&] {
    for (int i = 100; i < 400; ++i) store_->put(entry("p" + std::to_string(i), "x"));
    done = true;
  });
  while (!done) {
    std::vector<std::string> seen;
    store_->scan([&](const ChunkId& id) { seen.push_back(id.value); });
    std::set<std::string> unique(seen.begin(), seen.end());
    EXPECT_EQ(unique.size(), seen.size());
    EXPECT_GE(seen.size(), 100u);
  }
  writer.join();
}

TEST_P(StoreContract, ParentsSharedPerImport) {
  auto a = entry("a", "1", "/x", "impA");
  auto b = entry("b", "2", "/x", "impA");
  b.parents = nullptr;  // later chunks of an import may omit them
  auto c = entry("c", "3", "/x", "impB");
  c.parents = xml_parents("other");
  store_->put(a);
  store_->put(b);
  store_->put(c);
  EXPECT_EQ(*store_->get(ChunkId{"b"}).parents, *a.parents);
  EXPECT_EQ(store_->get(ChunkId{"c"}).parents->root_end, "</other>");
}

TEST_P(StoreContract, PendingImports) {
  EXPECT_TRUE(store_->pending_imports().empty());
  store_->begin_import("i1");
  store_->begin_import("i2");
  store_->end_import("i1");
  EXPECT_EQ(store_->pending_imports(), std::vector<std::string>{"i2"});
  store_->sync();
}

INSTANTIATE_TEST_SUITE_P(Backends, StoreContract,
                         ::testing::Values("memory", "filesystem"));

TEST(FilesystemStore, SurvivesRestart) {
  TempDir dir;
  {
    auto s = make_filesystem_store(dir.path);
    for (int i = 0; i < 20; ++i) s->put(entry("r" + std::to_string(i), std::string(i, 'x')));
    MetadataDelta d;
    d.add_tags.insert("after");
    s->update_metadata(ChunkId{"r3"}, d);
    s->remove({ChunkId{"r4"}});
    s->begin_import("pending-one");
    s->sync();
  }
  auto s = make_filesystem_store(dir.path);
  EXPECT_EQ(s->size(), 19u);
  EXPECT_EQ(s->get(ChunkId{"r7"}).content, std::string(7, 'x'));
  EXPECT_TRUE(s->get(ChunkId{"r3"}).metadata.tags.count("after"));
  EXPECT_EQ(*s->get(ChunkId{"r7"}).parents, *xml_parents());
  EXPECT_EQ(s->pending_imports(), std::vector<std::string>{"pending-one"});
}

TEST(FilesystemStore, LayoutAndSidecar) {
  TempDir dir;
  auto s = make_filesystem_store(dir.path);
  auto e = entry("abc", "<x/>", "/cologne/lod2");
  s->put(e);
  const auto base = dir.path / "store" / "cologne" / "lod2";
  EXPECT_TRUE(fs::exists(base / "abc.chunk"));
  std::ifstream meta(base / "abc.meta");
  std::string first;
  std::getline(meta, first);
  EXPECT_EQ(first, "v1");
  EXPECT_TRUE(fs::exists(dir.path / "parents" / "imp1"));
}

TEST(FilesystemStore, AwkwardLayerNamesStayInside) {
  TempDir dir;
  auto s = make_filesystem_store(dir.path);
  s->put(entry("a", "1", "/../x"));
  s->put(entry("b", "2", "/.hidden/with space/100%"));
  EXPECT_FALSE(fs::exists(dir.path / "x"));
  auto again = make_filesystem_store(dir.path);
  EXPECT_EQ(again->get(ChunkId{"a"}).metadata.layer.str(), "/../x");
  EXPECT_EQ(again->get(ChunkId{"b"}).metadata.layer.str(), "/.hidden/with space/100%");
}

TEST(FilesystemStore, InterruptedPutsAreCleanedUp) {
  TempDir dir;
  {
    auto s = make_filesystem_store(dir.path);
    s->put(entry("good", "1", "/l"));
  }
  const auto l = dir.path / "store" / "l";
  std::ofstream(l / "half.chunk") << "no sidecar";
  std::ofstream(l / "good.meta.tmp.1.2") << "partial";
  auto s = make_filesystem_store(dir.path);
  EXPECT_EQ(s->size(), 1u);
  EXPECT_FALSE(fs::exists(l / "half.chunk"));
  EXPECT_FALSE(fs::exists(l / "good.meta.tmp.1.2"));
}

TEST(FilesystemStore, RejectsUnknownSidecarVersion) {
  TempDir dir;
  {
    auto s = make_filesystem_store(dir.path);
    s->put(entry("v", "1", "/l"));
  }
  std::ofstream(dir.path / "store" / "l" / "v.meta") << "v9\nlayer /l\n";
  auto s = make_filesystem_store(dir.path);
  EXPECT_EQ(code_of([&] { s->get(ChunkId{"v"}); }), ErrorCode::kIoError);
}

TEST(MakeStore, SelectsBackend) {
  EXPECT_NE(make_store({"memory", {}, false}), nullptr);
  TempDir dir;
  EXPECT_NE(make_store({"filesystem", dir.path, false}), nullptr);
  EXPECT_EQ(code_of([] { make_store({"mongodb", {}, false}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { make_store({"filesystem", {}, false}); }),
            ErrorCode::kInvalidArgument);
}

TEST(PercentEncoding, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 30, '\0');
    for (auto& c : s) c = static_cast<char>(rng());
    const auto enc = percent_encode(s);
    EXPECT_EQ(enc.find(' '), std::string::npos);
    EXPECT_EQ(enc.find('\n'), std::string::npos);
    EXPECT_EQ(percent_decode(enc), s);
  }
  EXPECT_EQ(percent_encode("a b%"), "a%20b%25");
  EXPECT_THROW(percent_decode("%4"), Error);
  EXPECT_THROW(percent_decode("%zz"), Error);
}

}  // namespace
}  // namespace geostore
