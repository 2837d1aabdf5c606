#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "agsim/channel.hpp"
#include "agsim/errors.hpp"
#include "agsim/geom.hpp"
#include "agsim/link.hpp"
#include "agsim/rng.hpp"

namespace agsim {

enum class TrafficMode { kUdp, kTcpLite };

// One experiment: stationary user and UAV, a building set, radio and
// traffic parameters. Everything a run needs; a (Scenario, seed) pair
// determines the result bit-for-bit.
struct Scenario {
  Point3 ue_pos;
  Point3 uav_pos{30.0, 0.0, 10.0};
  std::vector<Box> buildings;
  RadioConfig radio;
  ObstacleLossParams obstacle_params;
  ErrorModelParams error_params;

  double per_attempt_overhead_s = 100e-6;
  double offered_load_bps = 100e6;
  long packet_bytes = 1024;
  double warmup_s = 10.0;
  double measure_s = 1.0;
  long queue_capacity_packets = 1000;
  TrafficMode mode = TrafficMode::kUdp;

  // tcp_lite transport knobs.
  int tcp_window_packets = 16;
  double tcp_rto_multiplier = 3.0;
  int tcp_max_retransmits = 6;
};

// Throws ConfigError naming the offending field; called by run() before
// any event is processed.
inline void validate_scenario(const Scenario& s) {
  auto fail = [](const char* what) { throw ConfigError(what); };
  if (!is_finite(s.ue_pos)) fail("scenario: ue position must be finite");
  if (!is_finite(s.uav_pos)) fail("scenario: uav position must be finite");
  if (s.ue_pos == s.uav_pos) fail("scenario: ue and uav positions coincide");
  for (const Box& b : s.buildings)
    if (!b.valid()) fail("scenario: invalid building box (min > max)");
  if (!(s.radio.frequency_hz > 0)) fail("scenario: frequency_hz must be > 0");
  if (!(s.radio.channel_width_hz > 0))
    fail("scenario: channel_width_hz must be > 0");
  if (!(s.radio.phy_rate_bps > 0)) fail("scenario: phy_rate_bps must be > 0");
  if (!(s.obstacle_params.wall_loss_db >= 0))
    fail("scenario: wall_loss_db must be >= 0");
  if (s.obstacle_params.walls_per_building < 0)
    fail("scenario: walls_per_building must be >= 0");
  if (!(s.obstacle_params.shadowing_sigma_los_db >= 0))
    fail("scenario: shadowing_sigma_los_db must be >= 0");
  if (!(s.obstacle_params.shadowing_sigma_nlos_db >= 0))
    fail("scenario: shadowing_sigma_nlos_db must be >= 0");
  if (!(s.error_params.steepness_db > 0))
    fail("scenario: steepness_db must be > 0");
  if (s.error_params.max_retries < 0)
    fail("scenario: max_retries must be >= 0");
  if (!(s.per_attempt_overhead_s >= 0))
    fail("scenario: per_attempt_overhead_s must be >= 0");
  if (!(s.offered_load_bps > 0)) fail("scenario: offered_load_bps must be > 0");
  if (s.packet_bytes <= 0) fail("scenario: packet_bytes must be > 0");
  if (!(s.warmup_s >= 0)) fail("scenario: warmup_s must be >= 0");
  if (!(s.measure_s > 0)) fail("scenario: measure_s must be > 0");
  if (s.queue_capacity_packets < 1)
    fail("scenario: queue_capacity_packets must be >= 1");
  if (s.tcp_window_packets < 1)
    fail("scenario: tcp_window_packets must be >= 1");
  if (!(s.tcp_rto_multiplier > 0))
    fail("scenario: tcp_rto_multiplier must be > 0");
  if (s.tcp_max_retransmits < 0)
    fail("scenario: tcp_max_retransmits must be >= 0");
}

enum class DropReason { kNone, kQueueOverflow, kRetryExhausted };

// Per-packet lifecycle. Times are integer nanoseconds on the simulation
// clock; -1 marks "never happened".
struct PacketRecord {
  long id = 0;
  std::int64_t created_ns = 0;
  std::int64_t dequeued_ns = -1;
  std::int64_t delivered_ns = -1;
  int attempts = 0;            // MAC attempts, summed over retransmissions
  int transport_retx = 0;      // tcp_lite transport-level retransmissions
  DropReason dropped_reason = DropReason::kNone;

  bool delivered() const { return delivered_ns >= 0; }
  double created_at_s() const { return static_cast<double>(created_ns) / 1e9; }
  std::optional<double> dequeued_at_s() const {
    if (dequeued_ns < 0) return std::nullopt;
    return static_cast<double>(dequeued_ns) / 1e9;
  }
  std::optional<double> delivered_at_s() const {
    if (delivered_ns < 0) return std::nullopt;
    return static_cast<double>(delivered_ns) / 1e9;
  }
};

struct HistogramBin {
  double lower_bps = 0.0;
  double upper_bps = 0.0;
  long count = 0;
};

inline constexpr int kHistogramBins = 20;
inline constexpr std::int64_t kThroughputSampleNs = 100'000'000;  // 100 ms

// Metrics over packets *generated* during the measurement window.
// The histogram is the receiver-side view: bits delivered per 100 ms
// interval of the window, binned over [0, offered_load_bps].
struct MetricsReport {
  double throughput_bps = 0.0;
  double pdr = 0.0;
  double loss_ratio = 0.0;
  double mean_delay_s = 0.0;
  long delivered_count = 0;
  long generated_count = 0;
  long dropped_count = 0;
  std::vector<HistogramBin> histogram;
};

struct RunTrace {
  MetricsReport report;
  LinkBudget budget;
  std::vector<PacketRecord> packets;
};

namespace detail {

// Durations are quantized to the integer-ns clock by rounding *up*, so a
// delivered packet's delay can never fall below the analytic
// airtime + propagation lower bound.
inline std::int64_t ceil_ns(double seconds) {
  return static_cast<std::int64_t>(std::ceil(seconds * 1e9));
}

inline std::int64_t round_ns(double seconds) {
  return std::llround(seconds * 1e9);
}

enum class EventKind { kTick, kMacDone, kRto, kAck };

struct Event {
  std::int64_t t_ns;
  std::uint64_t seq;  // breaks same-time ties in schedule order
  EventKind kind;
  long packet = -1;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t_ns != b.t_ns) return a.t_ns > b.t_ns;
    return a.seq > b.seq;
  }
};

// Single-link discrete-event engine.
//
// Traffic is a CBR source at the UE: one packet every
// 8*packet_bytes/offered_load_bps seconds, stopping at the end of the
// measurement window; remaining packets then drain so every generated
// packet reaches a final fate (conservation is exact).
//
// udp: every tick generates a packet; a full queue drops it (drop-tail),
// and a MAC retry exhaustion drops it for good.
//
// tcp_lite: the source is flow-controlled. A tick that finds the send
// buffer full creates nothing (the application blocks), so "generated"
// counts transport admissions. Up to tcp_window_packets may be in flight;
// a packet whose MAC round exhausts its retries is retransmitted after
// max(send_time + RTO, round end), where RTO = tcp_rto_multiplier *
// (single-attempt airtime + propagation). After tcp_max_retransmits
// failed retransmissions the transport gives up and the packet counts as
// lost.
class Engine {
 public:
  Engine(const Scenario& scenario, std::uint64_t seed)
      : sc_(scenario),
        shadow_stream_(seed, kShadowingStream),
        error_stream_(seed, kErrorStream) {}

  RunTrace execute() {
    validate_scenario(sc_);

    budget_ = link_budget(sc_.ue_pos, sc_.uav_pos, sc_.buildings, sc_.radio,
                          sc_.obstacle_params, shadow_stream_);

    interarrival_ns_ = std::max<std::int64_t>(
        1, round_ns(8.0 * static_cast<double>(sc_.packet_bytes) /
                    sc_.offered_load_bps));
    attempt_ns_ = ceil_ns(airtime_s(sc_.packet_bytes, sc_.radio.phy_rate_bps,
                                    sc_.per_attempt_overhead_s));
    prop_ns_ = ceil_ns(distance(sc_.ue_pos, sc_.uav_pos) / kSpeedOfLight);
    warmup_ns_ = round_ns(sc_.warmup_s);
    traffic_end_ns_ = warmup_ns_ + round_ns(sc_.measure_s);
    if (traffic_end_ns_ <= warmup_ns_)
      throw ConfigError("scenario: measure_s rounds to zero on the ns clock");
    rto_ns_ = ceil_ns(sc_.tcp_rto_multiplier *
                      (airtime_s(sc_.packet_bytes, sc_.radio.phy_rate_bps,
                                 sc_.per_attempt_overhead_s) +
                       distance(sc_.ue_pos, sc_.uav_pos) / kSpeedOfLight));

    schedule(0, EventKind::kTick);
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      dispatch(ev);
      try_start_service(ev.t_ns);
    }

    RunTrace trace;
    trace.budget = budget_;
    trace.report = build_report();
    trace.packets = std::move(packets_);
    return trace;
  }

 private:
  void schedule(std::int64_t t_ns, EventKind kind, long packet = -1) {
    events_.push(Event{t_ns, next_seq_++, kind, packet});
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::kTick:
        on_tick(ev.t_ns);
        break;
      case EventKind::kMacDone:
        on_mac_done(ev.t_ns, ev.packet);
        break;
      case EventKind::kRto:
        queue_.push_front(ev.packet);
        break;
      case EventKind::kAck:
        --in_flight_;
        break;
    }
  }

  void on_tick(std::int64_t t_ns) {
    const bool room =
        static_cast<long>(queue_.size()) < sc_.queue_capacity_packets;
    if (sc_.mode == TrafficMode::kUdp) {
      const long id = new_packet(t_ns);
      if (room) {
        queue_.push_back(id);
      } else {
        packets_[id].dropped_reason = DropReason::kQueueOverflow;
      }
    } else if (room) {
      queue_.push_back(new_packet(t_ns));
    }
    const std::int64_t next = t_ns + interarrival_ns_;
    if (next < traffic_end_ns_) schedule(next, EventKind::kTick);
  }

  void try_start_service(std::int64_t t_ns) {
    if (server_busy_ || queue_.empty()) return;
    PacketRecord& pkt = packets_[queue_.front()];
    const bool is_retx = pkt.transport_retx > 0;
    if (sc_.mode == TrafficMode::kTcpLite && !is_retx &&
        in_flight_ >= sc_.tcp_window_packets) {
      return;
    }
    queue_.pop_front();
    if (sc_.mode == TrafficMode::kTcpLite && !is_retx) ++in_flight_;
    if (pkt.dequeued_ns < 0) pkt.dequeued_ns = t_ns;
    service_start_ns_ = t_ns;

    const TxOutcome outcome =
        transmit(sc_.packet_bytes, budget_.snr_db, sc_.error_params,
                 sc_.radio.phy_rate_bps, sc_.per_attempt_overhead_s,
                 error_stream_);
    pkt.attempts += outcome.attempts;
    mac_delivered_ = outcome.delivered;
    server_busy_ = true;
    schedule(t_ns + outcome.attempts * attempt_ns_, EventKind::kMacDone,
             pkt.id);
  }

  void on_mac_done(std::int64_t t_ns, long id) {
    server_busy_ = false;
    PacketRecord& pkt = packets_[id];
    if (mac_delivered_) {
      pkt.delivered_ns = t_ns + prop_ns_;
      if (sc_.mode == TrafficMode::kTcpLite)
        schedule(t_ns + 2 * prop_ns_, EventKind::kAck, id);
      return;
    }
    if (sc_.mode == TrafficMode::kUdp) {
      pkt.dropped_reason = DropReason::kRetryExhausted;
      return;
    }
    ++pkt.transport_retx;
    if (pkt.transport_retx > sc_.tcp_max_retransmits) {
      pkt.dropped_reason = DropReason::kRetryExhausted;
      --in_flight_;
      return;
    }
    schedule(std::max(service_start_ns_ + rto_ns_, t_ns), EventKind::kRto, id);
  }

  long new_packet(std::int64_t t_ns) {
    PacketRecord pkt;
    pkt.id = static_cast<long>(packets_.size());
    pkt.created_ns = t_ns;
    packets_.push_back(pkt);
    return pkt.id;
  }

  MetricsReport build_report() const {
    MetricsReport report;
    long delivered_bits = 0;
    std::int64_t delay_sum_ns = 0;

    for (const PacketRecord& pkt : packets_) {
      if (pkt.created_ns < warmup_ns_ || pkt.created_ns >= traffic_end_ns_)
        continue;
      ++report.generated_count;
      if (pkt.delivered()) {
        ++report.delivered_count;
        delivered_bits += 8 * sc_.packet_bytes;
        delay_sum_ns += pkt.delivered_ns - pkt.created_ns;
      } else {
        ++report.dropped_count;
      }
    }

    const double measure_sec =
        static_cast<double>(traffic_end_ns_ - warmup_ns_) / 1e9;
    report.throughput_bps = static_cast<double>(delivered_bits) / measure_sec;
    report.pdr = report.generated_count == 0
                     ? 1.0
                     : static_cast<double>(report.delivered_count) /
                           static_cast<double>(report.generated_count);
    report.loss_ratio = 1.0 - report.pdr;
    report.mean_delay_s =
        report.delivered_count == 0
            ? 0.0
            : static_cast<double>(delay_sum_ns) / 1e9 /
                  static_cast<double>(report.delivered_count);
    report.histogram = build_histogram();
    return report;
  }

  std::vector<HistogramBin> build_histogram() const {
    const std::int64_t window_ns = traffic_end_ns_ - warmup_ns_;
    const long samples =
        static_cast<long>((window_ns + kThroughputSampleNs - 1) /
                          kThroughputSampleNs);
    std::vector<long> bits(samples, 0);
    for (const PacketRecord& pkt : packets_) {
      if (!pkt.delivered()) continue;
      if (pkt.delivered_ns < warmup_ns_ || pkt.delivered_ns >= traffic_end_ns_)
        continue;
      bits[(pkt.delivered_ns - warmup_ns_) / kThroughputSampleNs] +=
          8 * sc_.packet_bytes;
    }

    std::vector<HistogramBin> bins(kHistogramBins);
    const double width = sc_.offered_load_bps / kHistogramBins;
    for (int i = 0; i < kHistogramBins; ++i) {
      bins[i].lower_bps = i * width;
      bins[i].upper_bps = (i + 1) * width;
    }
    for (long j = 0; j < samples; ++j) {
      const std::int64_t start = warmup_ns_ + j * kThroughputSampleNs;
      const std::int64_t span =
          std::min(kThroughputSampleNs, traffic_end_ns_ - start);
      const double sample_bps =
          static_cast<double>(bits[j]) / (static_cast<double>(span) / 1e9);
      int idx = width > 0 ? static_cast<int>(sample_bps / width) : 0;
      idx = std::clamp(idx, 0, kHistogramBins - 1);
      ++bins[idx].count;
    }
    return bins;
  }

  Scenario sc_;
  RngStream shadow_stream_;
  RngStream error_stream_;
  LinkBudget budget_;

  std::int64_t interarrival_ns_ = 0;
  std::int64_t attempt_ns_ = 0;
  std::int64_t prop_ns_ = 0;
  std::int64_t warmup_ns_ = 0;
  std::int64_t traffic_end_ns_ = 0;
  std::int64_t rto_ns_ = 0;

  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  std::uint64_t next_seq_ = 0;
  std::vector<PacketRecord> packets_;
  std::deque<long> queue_;
  bool server_busy_ = false;
  bool mac_delivered_ = false;
  std::int64_t service_start_ns_ = 0;
  int in_flight_ = 0;
};

}  // namespace detail

// One deterministic run. Identical (scenario, seed) pairs produce
// identical reports, bit for bit.
inline MetricsReport run(const Scenario& scenario, std::uint64_t seed) {
  return detail::Engine(scenario, seed).execute().report;
}

// Same run, with the per-packet records and the sampled link budget kept
// for inspection.
inline RunTrace run_traced(const Scenario& scenario, std::uint64_t seed) {
  return detail::Engine(scenario, seed).execute();
}

// Per-metric mean/min/max over a batch, plus count sums and the merged
// throughput histogram.
struct Aggregate {
  double throughput_bps_mean = 0.0, throughput_bps_min = 0.0,
         throughput_bps_max = 0.0;
  double pdr_mean = 0.0, pdr_min = 0.0, pdr_max = 0.0;
  double loss_ratio_mean = 0.0, loss_ratio_min = 0.0, loss_ratio_max = 0.0;
  double mean_delay_s_mean = 0.0, mean_delay_s_min = 0.0,
         mean_delay_s_max = 0.0;
  long delivered_sum = 0;
  long generated_sum = 0;
  long dropped_sum = 0;
  std::vector<HistogramBin> histogram;
};

struct SeededReport {
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct BatchResult {
  std::vector<SeededReport> runs;  // sorted by seed
  Aggregate aggregate;
};

inline Aggregate aggregate_reports(const std::vector<SeededReport>& runs) {
  if (runs.empty()) throw ConfigError("aggregate: no runs");
  Aggregate agg;
  auto fold = [](double v, double& mean_acc, double& mn, double& mx,
                 bool first) {
    mean_acc += v;
    if (first || v < mn) mn = v;
    if (first || v > mx) mx = v;
  };
  bool first = true;
  for (const SeededReport& r : runs) {
    fold(r.report.throughput_bps, agg.throughput_bps_mean,
         agg.throughput_bps_min, agg.throughput_bps_max, first);
    fold(r.report.pdr, agg.pdr_mean, agg.pdr_min, agg.pdr_max, first);
    fold(r.report.loss_ratio, agg.loss_ratio_mean, agg.loss_ratio_min,
         agg.loss_ratio_max, first);
    fold(r.report.mean_delay_s, agg.mean_delay_s_mean, agg.mean_delay_s_min,
         agg.mean_delay_s_max, first);
    agg.delivered_sum += r.report.delivered_count;
    agg.generated_sum += r.report.generated_count;
    agg.dropped_sum += r.report.dropped_count;
    if (agg.histogram.empty()) {
      agg.histogram = r.report.histogram;
    } else {
      for (std::size_t i = 0;
           i < agg.histogram.size() && i < r.report.histogram.size(); ++i)
        agg.histogram[i].count += r.report.histogram[i].count;
    }
    first = false;
  }
  const double n = static_cast<double>(runs.size());
  agg.throughput_bps_mean /= n;
  agg.pdr_mean /= n;
  agg.loss_ratio_mean /= n;
  agg.mean_delay_s_mean /= n;
  return agg;
}

// Runs every seed independently. Reports are sorted by seed before
// aggregation, so the result does not depend on the order of the input
// seed list.
inline BatchResult run_batch(const Scenario& scenario,
                             std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("run_batch: seed list is empty");
  BatchResult batch;
  batch.runs.reserve(seeds.size());
  for (std::uint64_t seed : seeds)
    batch.runs.push_back(SeededReport{seed, run(scenario, seed)});
  std::stable_sort(batch.runs.begin(), batch.runs.end(),
                   [](const SeededReport& a, const SeededReport& b) {
                     return a.seed < b.seed;
                   });
  batch.aggregate = aggregate_reports(batch.runs);
  return batch;
}

}  // namespace agsim
