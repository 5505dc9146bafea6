#include "dpsim/cost.hpp"

#include <numeric>

namespace dpsim {

void CostModel::validate() const
{
    if (hop_ms_per_kb < 0 || encrypt_ms_per_kb < 0 || decrypt_ms_per_kb < 0)
        throw ValidationError("cost rates must be nonnegative");
}

double hop_delay(double payload_kb, const NodeState& sender, const CostModel& costs)
{
    if (payload_kb < 0.0)
        throw ValidationError("negative payload");
    return payload_kb * costs.hop_ms_per_kb + sender.extra_delay_ms;
}

double crypto_cost(CryptoOp op, double payload_kb, const CostModel& costs)
{
    return payload_kb * (op == CryptoOp::seal ? costs.encrypt_ms_per_kb : costs.decrypt_ms_per_kb);
}

std::string_view to_string(TermKind kind)
{
    switch (kind) {
    case TermKind::hop: return "hop";
    case TermKind::seal: return "seal";
    case TermKind::open: return "open";
    case TermKind::fetch: return "fetch";
    case TermKind::rewrap: return "rewrap";
    case TermKind::wait: return "wait";
    case TermKind::abort: return "abort";
    }
    return "?";
}

double CostLedger::total() const
{
    return std::accumulate(terms_.begin(), terms_.end(), 0.0,
                           [](double acc, const CostTerm& t) { return acc + t.ms; });
}

Network Network::idle(std::size_t count, const CostModel& costs)
{
    Network net{costs, {}};
    net.nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        net.nodes.push_back({PeerId{static_cast<std::uint32_t>(i)}, true, 0.0});
    return net;
}

} // namespace dpsim
