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


#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "geostore/error.hpp"
#include "geostore/server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"geostore HTTP server"};
  std::string config_file, host, data_dir;
  int port = -1;
  app.add_option("-c,--config", config_file, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--host", host, "Listen address");
  app.add_option("-p,--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  app.add_option("-d,--data", data_dir,
                 "Data directory; selects the filesystem store under DIR/store and "
                 "the index under DIR/index");
  app.footer(
      "Settings are applied in order: defaults, --config, GEOSTORE_* environment "
      "variables, command-line flags.");
  CLI11_PARSE(app, argc, argv);

  // Signals are handled on a dedicated thread through sigwait.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    auto config = geostore::load_server_config(
        config_file.empty() ? std::nullopt
                            : std::optional<std::filesystem::path>(config_file));
    if (!host.empty()) config.host = host;
    if (port >= 0) config.port = port;
    if (!data_dir.empty()) {
      config.engine.store.backend = "filesystem";
      config.engine.store.path = std::filesystem::path(data_dir) / "store";
      config.engine.index_path = std::filesystem::path(data_dir) / "index";
    }

    geostore::Engine engine(config.engine);
    const auto& r = engine.startup_report();
    std::cerr << "reconciled: " << r.rolled_back_imports << " interrupted imports ("
              << r.rolled_back_chunks << " chunks) rolled back, " << r.dropped_index_entries
              << " orphaned index entries dropped, " << r.reindexed << " chunks reindexed\n";

    geostore::HttpServer server(engine, config);
    const int bound = server.bind();
    std::cerr << "listening on http://" << config.host << ":" << bound << std::endl;

    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      std::cerr << "shutting down\n";
      server.stop();
    });
    server.run();
    // run() also returns if the listener fails; wake the waiter either way.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    engine.wait_idle();
  } catch (const geostore::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
