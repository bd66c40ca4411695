// Copyright 2026 The bwsim Authors
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

#ifndef BWSIM_TYPES_H_
#define BWSIM_TYPES_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bwsim {

using Bytes = std::int64_t;
using FrameIndex = std::int64_t;
using Cid = std::uint32_t;
using SsId = std::uint32_t;

// Raised for invalid scenario or PHY settings; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed replay scripts and golden files.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class RequestKind : std::uint8_t { kIncremental, kAggregate };

struct BwRequest {
  Cid cid = 0;
  Bytes size = 0;
  RequestKind kind = RequestKind::kAggregate;
  FrameIndex arrival_frame = 0;

  friend bool operator==(const BwRequest&, const BwRequest&) = default;
};

// Bandwidth perception policies applied by the base station.
enum class PolicyKind : std::uint8_t {
  kRpg,
  kDpgPriority,
  kDpgGrouped,
  kDdaI,
  kDdaD,
};

std::string_view to_string(PolicyKind p);
std::optional<PolicyKind> parse_policy(std::string_view s);

inline bool decreases_on_grant(PolicyKind p) {
  return p == PolicyKind::kDpgPriority || p == PolicyKind::kDpgGrouped;
}
inline bool decreases_on_data(PolicyKind p) {
  return p == PolicyKind::kDdaI || p == PolicyKind::kDdaD;
}

enum class PacketKind : std::uint8_t { kTcpData, kTcpAck };

// A network-layer packet carried by the MAC. `wire_bytes` includes the
// TCP/IP header; `seq` is the first payload byte (data) or the cumulative
// acknowledgement number (ACKs).
struct Packet {
  std::uint32_t flow = 0;
  PacketKind kind = PacketKind::kTcpData;
  std::uint32_t wire_bytes = 0;
  std::uint32_t payload_bytes = 0;
  std::int64_t seq = 0;
};

}  // namespace bwsim

#endif  // BWSIM_TYPES_H_
