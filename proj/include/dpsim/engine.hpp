#ifndef DPSIM_ENGINE_HPP
#define DPSIM_ENGINE_HPP

#include "dpsim/cost.hpp"
#include "dpsim/crowds.hpp"
#include "dpsim/dualpath.hpp"
#include "dpsim/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace dpsim::sim {

/**
 * Everything a run needs: unit costs, network size, failure and traffic
 * levels, both protocols' knobs and the harness settings.
 *
 * Traffic intensities are in ms per KB carried: a node with intensity c
 * delays every message it sends by c * payload_kb.
 */
struct SimConfig
{
    int num_nodes = 100;
    double payload_kb = 1.0;
    CostModel costs;

    /// Per-repetition probability that an intermediate node is down, used by
    /// the reliability scenarios.
    double drop_ratio = 0.4;
    /// Apply drop_ratio in the performance scenarios too.
    bool performance_failures = false;

    /// Mean traffic intensity of the static scenarios (ms/KB).
    double base_traffic = 160.0;
    /// Growth of the mean intensity per tick in traffic scenarios (ms/KB).
    double traffic_rate = 10.0;
    /// Intensities are drawn from Uniform(0, traffic_spread * mean).
    double traffic_spread = 2.0;

    crowds::CrowdsConfig crowds;
    dualpath::DualPathConfig dualpath;

    /// Aborted transactions are recorded at timeout_factor times the
    /// zero-traffic Dual-Path cycle cost.
    double timeout_factor = 10.0;

    int reps = 5000;
    int ticks = 100;
    std::uint64_t seed = 42;
    /// Worker threads across ticks; 0 picks the hardware concurrency.
    int threads = 0;
    /// Push real onion layers through the codec on every Dual-Path attempt.
    bool verify_codec = false;

    void validate() const;
};

/// Parameter values in force at one tick.
struct TickParams
{
    int tick = 1;
    double payload_kb = 1.0;
    double traffic_mean = 0.0;
    int num_nodes = 100;
    double drop_ratio = 0.0;
};

enum class Protocol { crowds, dualpath };

std::string_view to_string(Protocol p);

/// One transaction's outcome.
struct DelaySample
{
    Protocol protocol;
    int tick = 0;
    double delay_ms = 0.0;
    bool failed = false;
};

/// Mean over the repetitions of one tick.
struct TickSummary
{
    int tick = 0;
    double mean_ms = 0.0;
    double std_error_ms = 0.0;
    /// Transactions that hit at least one failure (recovered or aborted).
    int failed = 0;
    int aborted = 0;
};

struct PairedSeries
{
    std::vector<TickSummary> crowds;
    std::vector<TickSummary> dualpath;
};

// Node 0 is the requester and node 1 the provider in every simulated network.
inline constexpr PeerId kRequester{0};
inline constexpr PeerId kProvider{1};

/// Marks each non-exempt node down with probability drop_ratio.
void sample_failures(Rng& rng, std::span<NodeState> nodes, double drop_ratio, std::span<const PeerId> exempt);

/// Sets each non-exempt node's extra delay to Uniform(0, spread*mean)*payload_kb.
void sample_traffic(Rng& rng, std::span<NodeState> nodes, double mean, double spread, double payload_kb,
                    std::span<const PeerId> exempt);

/// Cost of one Crowds request/reply over `route` (reply retraces the route).
double crowds_transaction(const crowds::CrowdsRoute& route, PeerId requester, PeerId provider, double payload_kb,
                          const Network& net, bool charge_crypto, CostLedger* ledger = nullptr);

/// Runs both protocols over the schedule with paired randomness: for a given
/// (tick, rep) both see the same failures and traffic. `stream_salt`
/// separates the random streams of different scenarios. When `ledger_out`
/// is set every cost term is written as `tick rep protocol term_kind ms`.
PairedSeries run_paired(std::span<const TickParams> schedule, const SimConfig& cfg, std::uint64_t stream_salt = 0,
                        std::ostream* ledger_out = nullptr);

/// Single-protocol view of run_paired; identical numbers for that protocol.
std::vector<TickSummary> run_timeseries(Protocol protocol, std::span<const TickParams> schedule,
                                        const SimConfig& cfg, std::uint64_t stream_salt = 0);

/// Constant schedule from the config's own values.
std::vector<TickParams> static_schedule(const SimConfig& cfg);

} // namespace dpsim::sim

#endif
