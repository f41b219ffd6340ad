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

#include "shiftsearch/external_oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "shiftsearch/errors.hpp"

extern char** environ;

namespace shiftsearch {

namespace protocol {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
  std::array<int, 256> rev{};
  for (auto& v : rev) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    rev[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  }
  return rev;
}
constexpr auto kReverse = make_reverse();

nlohmann::json parse_line(std::string_view line, const char* what) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw AdapterError("base64 payload length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw AdapterError("misplaced base64 padding");
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw AdapterError("misplaced base64 padding");
      v[k] = kReverse[static_cast<unsigned char>(c)];
      if (v[k] < 0) throw AdapterError("invalid base64 character");
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((word >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word & 0xff));
  }
  return out;
}

std::string encode_handshake(const Handshake& h) {
  return nlohmann::json{{"protocol", h.protocol}, {"concurrency_safe", h.concurrency_safe}}.dump();
}

Handshake decode_handshake(std::string_view line) {
  const auto doc = parse_line(line, "handshake");
  try {
    Handshake h;
    h.protocol = doc.at("protocol").get<int>();
    h.concurrency_safe = doc.value("concurrency_safe", false);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("malformed handshake: ") + e.what());
  }
}

std::string encode_request(std::int64_t id, std::span<const Image> images) {
  if (images.empty()) throw AdapterError("cannot encode an empty request");
  const std::size_t h = images.front().height();
  const std::size_t w = images.front().width();
  std::vector<std::uint8_t> pixels;
  pixels.reserve(images.size() * h * w * Image::kChannels);
  for (const auto& img : images) {
    if (img.height() != h || img.width() != w) throw AdapterError("request images differ in shape");
    pixels.insert(pixels.end(), img.data().begin(), img.data().end());
  }
  return nlohmann::json{{"id", id},
                        {"height", h},
                        {"width", w},
                        {"count", images.size()},
                        {"pixels", base64_encode(pixels)}}
      .dump();
}

Request decode_request(std::string_view line) {
  const auto doc = parse_line(line, "request");
  try {
    Request r;
    r.id = doc.at("id").get<std::int64_t>();
    r.height = doc.at("height").get<std::size_t>();
    r.width = doc.at("width").get<std::size_t>();
    const auto count = doc.at("count").get<std::size_t>();
    const auto pixels = base64_decode(doc.at("pixels").get<std::string>());
    const std::size_t per_image = r.height * r.width * Image::kChannels;
    if (pixels.size() != count * per_image) {
      throw AdapterError("request carries " + std::to_string(pixels.size()) + " bytes, expected " +
                         std::to_string(count * per_image));
    }
    r.images.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      r.images.emplace_back(r.height, r.width,
                            std::vector<std::uint8_t>(pixels.begin() + i * per_image,
                                                      pixels.begin() + (i + 1) * per_image));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("malformed request: ") + e.what());
  }
}

std::string encode_response(const Response& r) {
  return nlohmann::json{{"id", r.id}, {"predictions", r.predictions}}.dump();
}

Response decode_response(std::string_view line) {
  const auto doc = parse_line(line, "response");
  try {
    Response r;
    r.id = doc.at("id").get<std::int64_t>();
    r.predictions = doc.at("predictions").get<std::vector<int>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("malformed response: ") + e.what());
  }
}

}  // namespace protocol

namespace {

void close_fd(int& fd) noexcept {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

ExternalOracle::ExternalOracle(const std::string& command, ExternalOracleOptions options)
    : command_(command), options_(options) {
  if (command_.empty()) throw ConfigError("external oracle command is empty");
  if (options_.max_batch == 0) options_.max_batch = 1;
  // A dead child must surface as EPIPE, not kill the toolkit.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw AdapterError("pipe failed: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw AdapterError("pipe failed: " + std::string(std::strerror(errno)));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
  const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char**>(argv),
                               environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    pid_ = -1;
    close_fd(to_child_);
    close_fd(from_child_);
    throw AdapterError("cannot spawn '" + command_ + "': " + std::strerror(rc));
  }

  try {
    const auto handshake = protocol::decode_handshake(read_line());
    if (handshake.protocol != protocol::kVersion) {
      throw AdapterError("adapter speaks protocol " + std::to_string(handshake.protocol) +
                         ", expected " + std::to_string(protocol::kVersion));
    }
    concurrency_safe_ = handshake.concurrency_safe;
  } catch (...) {
    close_fd(to_child_);
    close_fd(from_child_);
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
    throw;
  }
}

ExternalOracle::~ExternalOracle() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ <= 0) return;
  // Closing stdin asks the adapter to exit; escalate if it lingers.
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
}

std::string ExternalOracle::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      throw AdapterError("timed out after " + std::to_string(options_.timeout.count()) +
                         " ms waiting for '" + command_ + "'");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw AdapterError(std::string("read from adapter failed: ") + std::strerror(errno));
    }
    if (got == 0) throw AdapterError("adapter '" + command_ + "' exited (end of output)");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void ExternalOracle::write_all(std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t put = ::write(to_child_, bytes.data(), bytes.size());
    if (put < 0) {
      if (errno == EINTR) continue;
      throw AdapterError("write to adapter '" + command_ + "' failed: " + std::strerror(errno));
    }
    bytes.remove_prefix(static_cast<std::size_t>(put));
  }
}

std::vector<int> ExternalOracle::predict_chunk(std::span<const Image> images) {
  const std::int64_t id = next_id_++;
  std::string request = protocol::encode_request(id, images);
  request += '\n';
  write_all(request);
  const auto response = protocol::decode_response(read_line());
  if (response.id != id) {
    throw AdapterError("adapter answered id " + std::to_string(response.id) + " to request " +
                       std::to_string(id));
  }
  if (response.predictions.size() != images.size()) {
    throw AdapterError("adapter returned " + std::to_string(response.predictions.size()) +
                       " predictions for " + std::to_string(images.size()) + " images");
  }
  return response.predictions;
}

std::vector<int> ExternalOracle::predict(std::span<const Image> images) {
  if (images.empty()) throw AdapterError("empty prediction batch");
  std::lock_guard lock(mutex_);
  if (to_child_ < 0) throw AdapterError("adapter '" + command_ + "' is not running");
  std::vector<int> out;
  out.reserve(images.size());
  try {
    for (std::size_t begin = 0; begin < images.size(); begin += options_.max_batch) {
      const std::size_t count = std::min(options_.max_batch, images.size() - begin);
      const auto part = predict_chunk(images.subspan(begin, count));
      out.insert(out.end(), part.begin(), part.end());
    }
  } catch (const AdapterError&) {
    // The stream may now hold a stale reply; refuse further traffic.
    close_fd(to_child_);
    close_fd(from_child_);
    throw;
  }
  return out;
}

}  // namespace shiftsearch
