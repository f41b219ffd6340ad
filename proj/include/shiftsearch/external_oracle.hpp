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

#ifndef SHIFTSEARCH_EXTERNAL_ORACLE_HPP
#define SHIFTSEARCH_EXTERNAL_ORACLE_HPP

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftsearch/image.hpp"
#include "shiftsearch/oracle.hpp"

namespace shiftsearch {

// Newline-delimited JSON spoken with an external model process over its stdin/stdout.
//
//   child -> {"protocol": 1, "concurrency_safe": <bool>}                 (once, at startup)
//   parent -> {"id": <int>, "height": H, "width": W, "count": B,
//              "pixels": "<base64 of B*H*W*3 bytes, sample-major, row-major RGB>"}
//   child -> {"id": <int>, "predictions": [<B ints>]}
namespace protocol {

inline constexpr int kVersion = 1;

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws AdapterError on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

struct Handshake {
  int protocol = kVersion;
  bool concurrency_safe = false;
};

struct Request {
  std::int64_t id = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Image> images;
};

struct Response {
  std::int64_t id = 0;
  std::vector<int> predictions;
};

std::string encode_handshake(const Handshake& h);
Handshake decode_handshake(std::string_view line);
std::string encode_request(std::int64_t id, std::span<const Image> images);
Request decode_request(std::string_view line);
std::string encode_response(const Response& r);
Response decode_response(std::string_view line);

}  // namespace protocol

struct ExternalOracleOptions {
  std::chrono::milliseconds timeout{60'000};
  /// Images per request; larger batches are split.
  std::size_t max_batch = 256;
};

/// Spawns `/bin/sh -c command` and speaks the line protocol with it. Calls are serialized
/// internally; the child's declared concurrency_safe flag is reported as-is.
class ExternalOracle final : public Oracle {
 public:
  explicit ExternalOracle(const std::string& command, ExternalOracleOptions options = {});
  ~ExternalOracle() override;
  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  std::vector<int> predict(std::span<const Image> images) override;
  bool concurrency_safe() const noexcept override { return concurrency_safe_; }
  std::string describe() const override { return "external:" + command_; }

  std::size_t requests_sent() const noexcept { return next_id_; }

 private:
  std::string read_line();
  void write_all(std::string_view bytes);
  std::vector<int> predict_chunk(std::span<const Image> images);

  std::string command_;
  ExternalOracleOptions options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool concurrency_safe_ = false;
  std::int64_t next_id_ = 0;
  std::mutex mutex_;
};

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_EXTERNAL_ORACLE_HPP
