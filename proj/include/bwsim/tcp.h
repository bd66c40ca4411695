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

#ifndef BWSIM_TCP_H_
#define BWSIM_TCP_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "bwsim/types.h"

namespace bwsim {

struct TcpConfig {
  std::uint32_t mss = 960;        // payload bytes per segment
  std::uint32_t header_bytes = 40;
  double initial_cwnd_segments = 2.0;
  Bytes initial_ssthresh = 65536;
  Bytes receiver_window = 65536;
  double rto_initial_s = 1.0;
  double rto_min_s = 0.2;
  double rto_max_s = 64.0;
  double delack_s = 0.2;
};

// Long-lived NewReno sender with an unbounded supply of data. Sequence
// numbers count payload bytes from zero.
class TcpSender {
 public:
  TcpSender(std::uint32_t flow, const TcpConfig& config);

  // Opens the window at `now`: emits the initial segments.
  void start(double now, std::vector<Packet>& out);
  bool started() const { return started_; }

  // Processes a cumulative ACK and emits whatever the window now permits.
  void on_ack(std::int64_t ack, double now, std::vector<Packet>& out);
  // Retransmission timeout. No-op when nothing is outstanding.
  void on_timeout(double now, std::vector<Packet>& out);
  // Fires on_timeout when the retransmission timer has run out.
  void check_timer(double now, std::vector<Packet>& out);

  double cwnd() const { return cwnd_; }
  Bytes ssthresh() const { return ssthresh_; }
  std::int64_t snd_una() const { return snd_una_; }
  std::int64_t snd_nxt() const { return snd_nxt_; }
  std::int64_t snd_max() const { return snd_max_; }
  Bytes flight() const { return snd_nxt_ - snd_una_; }
  double rto() const { return rto_; }
  std::optional<double> rto_deadline() const { return rto_deadline_; }
  bool in_recovery() const { return in_recovery_; }
  int dup_acks() const { return dup_acks_; }
  std::int64_t timeouts() const { return timeouts_; }
  std::int64_t fast_retransmits() const { return fast_retransmits_; }
  std::int64_t protocol_errors() const { return protocol_errors_; }

  // Test hook: places the sender in a given congestion state with `flight`
  // bytes outstanding from sequence zero.
  void force_state(double cwnd, Bytes ssthresh, Bytes flight);

 private:
  void send_allowed(double now, std::vector<Packet>& out);
  void emit(std::int64_t seq, double now, std::vector<Packet>& out);
  void restart_timer(double now);
  double window() const;

  std::uint32_t flow_;
  TcpConfig config_;
  bool started_ = false;
  double cwnd_;
  Bytes ssthresh_;
  std::int64_t snd_una_ = 0;
  std::int64_t snd_nxt_ = 0;
  std::int64_t snd_max_ = 0;
  std::int64_t recover_ = -1;
  bool in_recovery_ = false;
  int dup_acks_ = 0;

  double rto_;
  std::optional<double> srtt_;
  double rttvar_ = 0.0;
  std::optional<double> rto_deadline_;
  std::optional<std::int64_t> timed_seq_;
  double timed_at_ = 0.0;

  std::int64_t timeouts_ = 0;
  std::int64_t fast_retransmits_ = 0;
  std::int64_t protocol_errors_ = 0;
};

// Delayed-ACK receiver: one ACK per two in-order segments, immediate ACKs
// for out-of-order or hole-filling data, a timer for a lone segment.
class TcpReceiver {
 public:
  TcpReceiver(std::uint32_t flow, const TcpConfig& config);

  std::optional<Packet> on_segment(const Packet& seg, double now);
  std::optional<Packet> check_timer(double now);

  std::int64_t rcv_nxt() const { return rcv_nxt_; }
  // In-order payload bytes handed to the application so far.
  std::int64_t delivered_bytes() const { return rcv_nxt_; }
  int pending_segments() const { return pending_; }
  std::optional<double> delack_deadline() const { return delack_deadline_; }

 private:
  Packet make_ack() const;

  std::uint32_t flow_;
  TcpConfig config_;
  std::int64_t rcv_nxt_ = 0;
  std::set<std::int64_t> out_of_order_;  // segment start sequence numbers
  std::uint32_t seg_len_ = 0;
  int pending_ = 0;
  std::optional<double> delack_deadline_;
};

// Lossless FIFO point-to-point link.
class WiredLink {
 public:
  WiredLink(double rate_bps, double delay_s);

  void send(const Packet& p, double now);
  // Moves every packet due by `now` into `out`, in FIFO order.
  void deliver_due(double now, std::vector<Packet>& out);
  bool empty() const { return in_flight_.empty(); }

 private:
  double rate_bps_;
  double delay_s_;
  double busy_until_ = 0.0;
  std::deque<std::pair<double, Packet>> in_flight_;
};

}  // namespace bwsim

#endif  // BWSIM_TCP_H_
