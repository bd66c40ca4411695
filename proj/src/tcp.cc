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

#include "bwsim/tcp.h"

#include <algorithm>
#include <cmath>

namespace bwsim {

TcpSender::TcpSender(std::uint32_t flow, const TcpConfig& config)
    : flow_(flow),
      config_(config),
      cwnd_(config.initial_cwnd_segments * config.mss),
      ssthresh_(config.initial_ssthresh),
      rto_(config.rto_initial_s) {}

double TcpSender::window() const {
  return std::min(cwnd_, static_cast<double>(config_.receiver_window));
}

void TcpSender::emit(std::int64_t seq, double now, std::vector<Packet>& out) {
  Packet p;
  p.flow = flow_;
  p.kind = PacketKind::kTcpData;
  p.payload_bytes = config_.mss;
  p.wire_bytes = config_.mss + config_.header_bytes;
  p.seq = seq;
  out.push_back(p);
  // Karn: only time segments that have not been sent before.
  if (!timed_seq_ && seq >= snd_max_) {
    timed_seq_ = seq;
    timed_at_ = now;
  }
  if (!rto_deadline_) rto_deadline_ = now + rto_;
}

void TcpSender::send_allowed(double now, std::vector<Packet>& out) {
  const double wnd = window();
  while (static_cast<double>(snd_nxt_ + config_.mss - snd_una_) <= wnd + 1e-9) {
    emit(snd_nxt_, now, out);
    snd_nxt_ += config_.mss;
    snd_max_ = std::max(snd_max_, snd_nxt_);
  }
}

void TcpSender::restart_timer(double now) {
  if (snd_una_ >= snd_max_) {
    rto_deadline_.reset();
  } else {
    rto_deadline_ = now + rto_;
  }
}

void TcpSender::start(double now, std::vector<Packet>& out) {
  if (started_) return;
  started_ = true;
  send_allowed(now, out);
}

void TcpSender::on_ack(std::int64_t ack, double now, std::vector<Packet>& out) {
  if (ack > snd_max_) {
    ++protocol_errors_;
    return;
  }
  const Bytes mss = config_.mss;
  if (ack > snd_una_) {
    const Bytes acked = ack - snd_una_;
    if (timed_seq_ && ack > *timed_seq_) {
      const double sample = now - timed_at_;
      if (!srtt_) {
        srtt_ = sample;
        rttvar_ = sample / 2.0;
      } else {
        rttvar_ = 0.75 * rttvar_ + 0.25 * std::abs(*srtt_ - sample);
        srtt_ = 0.875 * *srtt_ + 0.125 * sample;
      }
      timed_seq_.reset();
    }
    if (srtt_) {
      rto_ = std::clamp(*srtt_ + 4.0 * rttvar_, config_.rto_min_s,
                        config_.rto_max_s);
    }
    snd_una_ = ack;
    if (snd_nxt_ < snd_una_) snd_nxt_ = snd_una_;

    if (in_recovery_) {
      if (ack >= recover_) {
        cwnd_ = static_cast<double>(ssthresh_);
        in_recovery_ = false;
        dup_acks_ = 0;
      } else {
        // Partial ACK: retransmit the next hole and deflate.
        emit(snd_una_, now, out);
        snd_nxt_ = std::max(snd_nxt_, snd_una_ + mss);
        cwnd_ = std::max(cwnd_ - static_cast<double>(acked) + mss,
                         static_cast<double>(mss));
        rto_deadline_ = now + rto_;
      }
    } else {
      dup_acks_ = 0;
      if (cwnd_ < static_cast<double>(ssthresh_)) {
        cwnd_ += mss;
      } else {
        cwnd_ += static_cast<double>(mss) * mss / cwnd_;
      }
    }
    if (!in_recovery_) restart_timer(now);
    send_allowed(now, out);
    return;
  }

  if (ack == snd_una_ && snd_una_ < snd_max_) {
    ++dup_acks_;
    if (in_recovery_) {
      cwnd_ += mss;
      send_allowed(now, out);
    } else if (dup_acks_ == 3 && ack > recover_) {
      const Bytes flight_size = snd_max_ - snd_una_;
      ssthresh_ = std::max<Bytes>(flight_size / 2, 2 * mss);
      recover_ = snd_max_;
      in_recovery_ = true;
      ++fast_retransmits_;
      timed_seq_.reset();
      emit(snd_una_, now, out);
      cwnd_ = static_cast<double>(ssthresh_ + 3 * mss);
      rto_deadline_ = now + rto_;
      send_allowed(now, out);
    }
  }
}

void TcpSender::on_timeout(double now, std::vector<Packet>& out) {
  if (snd_una_ >= snd_max_) {
    rto_deadline_.reset();
    return;
  }
  ++timeouts_;
  const Bytes mss = config_.mss;
  const Bytes flight_size = snd_max_ - snd_una_;
  ssthresh_ = std::max<Bytes>(flight_size / 2, 2 * mss);
  cwnd_ = static_cast<double>(mss);
  rto_ = std::min(2.0 * rto_, config_.rto_max_s);
  recover_ = snd_max_;
  in_recovery_ = false;
  dup_acks_ = 0;
  timed_seq_.reset();
  snd_nxt_ = snd_una_;
  rto_deadline_.reset();
  send_allowed(now, out);
  rto_deadline_ = now + rto_;
}

void TcpSender::check_timer(double now, std::vector<Packet>& out) {
  if (rto_deadline_ && now + 1e-12 >= *rto_deadline_) on_timeout(now, out);
}

void TcpSender::force_state(double cwnd, Bytes ssthresh, Bytes flight) {
  started_ = true;
  cwnd_ = cwnd;
  ssthresh_ = ssthresh;
  snd_una_ = 0;
  snd_nxt_ = flight;
  snd_max_ = flight;
  in_recovery_ = false;
  dup_acks_ = 0;
  timed_seq_.reset();
}

// --- Receiver ----------------------------------------------------------------

TcpReceiver::TcpReceiver(std::uint32_t flow, const TcpConfig& config)
    : flow_(flow), config_(config), seg_len_(config.mss) {}

Packet TcpReceiver::make_ack() const {
  Packet ack;
  ack.flow = flow_;
  ack.kind = PacketKind::kTcpAck;
  ack.wire_bytes = config_.header_bytes;
  ack.payload_bytes = 0;
  ack.seq = rcv_nxt_;
  return ack;
}

std::optional<Packet> TcpReceiver::on_segment(const Packet& seg, double now) {
  if (seg.seq == rcv_nxt_) {
    rcv_nxt_ += seg.payload_bytes;
    bool filled_hole = false;
    while (!out_of_order_.empty() && *out_of_order_.begin() <= rcv_nxt_) {
      const auto s = *out_of_order_.begin();
      out_of_order_.erase(out_of_order_.begin());
      if (s == rcv_nxt_) {
        rcv_nxt_ += seg_len_;
        filled_hole = true;
      }
    }
    if (filled_hole) {
      pending_ = 0;
      delack_deadline_.reset();
      return make_ack();
    }
    ++pending_;
    if (pending_ >= 2) {
      pending_ = 0;
      delack_deadline_.reset();
      return make_ack();
    }
    if (!delack_deadline_) delack_deadline_ = now + config_.delack_s;
    return std::nullopt;
  }
  if (seg.seq > rcv_nxt_) out_of_order_.insert(seg.seq);
  // Out of order or duplicate: acknowledge immediately.
  pending_ = 0;
  delack_deadline_.reset();
  return make_ack();
}

std::optional<Packet> TcpReceiver::check_timer(double now) {
  if (!delack_deadline_ || now + 1e-12 < *delack_deadline_) return std::nullopt;
  delack_deadline_.reset();
  if (pending_ == 0) return std::nullopt;
  pending_ = 0;
  return make_ack();
}

// --- Wired link ----------------------------------------------------------------

WiredLink::WiredLink(double rate_bps, double delay_s)
    : rate_bps_(rate_bps), delay_s_(delay_s) {}

void WiredLink::send(const Packet& p, double now) {
  const double start = std::max(now, busy_until_);
  busy_until_ = start + p.wire_bytes * 8.0 / rate_bps_;
  in_flight_.emplace_back(busy_until_ + delay_s_, p);
}

void WiredLink::deliver_due(double now, std::vector<Packet>& out) {
  while (!in_flight_.empty() && in_flight_.front().first <= now + 1e-12) {
    out.push_back(in_flight_.front().second);
    in_flight_.pop_front();
  }
}

}  // namespace bwsim
