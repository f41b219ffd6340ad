/**
 * Copyright 2026 The shiftsearch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Stub adapter for the external-oracle line protocol: answers every request with one
// fixed label. The failure modes exist to exercise the parent's error handling.

#include <algorithm>
#include <map>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shiftsearch/errors.hpp"
#include "shiftsearch/external_oracle.hpp"

namespace {

enum class Mode { normal, crash, garbage, short_reply, silent, no_handshake };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-label oracle stub"};
  int label = 0;
  bool concurrency_safe = false;
  long crash_after = -1;
  Mode mode = Mode::normal;
  const std::map<std::string, Mode> modes = {{"normal", Mode::normal},
                                             {"crash", Mode::crash},
                                             {"garbage", Mode::garbage},
                                             {"short", Mode::short_reply},
                                             {"silent", Mode::silent},
                                             {"no-handshake", Mode::no_handshake}};
  app.add_option("--label", label, "label returned for every image")->required();
  app.add_flag("--concurrency-safe", concurrency_safe, "declare concurrency safety");
  app.add_option("--mode", mode, "failure mode")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--crash-after", crash_after, "exit after this many requests (crash mode)");
  CLI11_PARSE(app, argc, argv);

  namespace proto = shiftsearch::protocol;
  std::ios::sync_with_stdio(false);
  if (mode == Mode::no_handshake) {
    std::cout << "{\"hello\": true}\n" << std::flush;
  } else {
    std::cout << proto::encode_handshake({proto::kVersion, concurrency_safe}) << '\n'
              << std::flush;
  }

  long served = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (mode == Mode::crash && served >= std::max(0L, crash_after)) return 1;
    if (mode == Mode::silent) continue;
    if (mode == Mode::garbage) {
      std::cout << "not json\n" << std::flush;
      continue;
    }
    proto::Request request;
    try {
      request = proto::decode_request(line);
    } catch (const std::exception& e) {
      std::cerr << "fixed_label_oracle: " << e.what() << '\n';
      return 2;
    }
    proto::Response response{request.id, std::vector<int>(request.images.size(), label)};
    if (mode == Mode::short_reply && !response.predictions.empty()) response.predictions.pop_back();
    std::cout << proto::encode_response(response) << '\n' << std::flush;
    ++served;
  }
  return 0;
}
