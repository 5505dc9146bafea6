#include "dpsim/crowds.hpp"

#include <algorithm>
#include <string>

namespace dpsim::crowds {

const std::vector<PeerId>& Blender::register_member(PeerId peer)
{
    if (!index_.insert(peer).second)
        throw ValidationError(to_string(peer) + " is already a crowd member");
    members_.push_back(peer);
    return members_;
}

void CrowdsConfig::validate() const
{
    if (!(forward_probability >= 0.0 && forward_probability < 1.0))
        throw ValidationError("forward_probability must be in [0, 1)");
    if (max_hops < 1)
        throw ValidationError("max_hops must be >= 1");
}

CrowdsRoute route_request(Rng& rng, PeerId requester, PeerId provider, std::span<const PeerId> members,
                          const CrowdsConfig& cfg)
{
    cfg.validate();

    // Fast path: callers in the engine pass lists that already exclude the
    // endpoints, so only copy when filtering is actually needed.
    std::vector<PeerId> filtered;
    std::span<const PeerId> eligible = members;
    const bool has_endpoint = std::any_of(members.begin(), members.end(),
                                          [&](PeerId p) { return p == requester || p == provider; });
    if (has_endpoint) {
        filtered.reserve(members.size());
        for (auto p : members)
            if (p != requester && p != provider)
                filtered.push_back(p);
        eligible = filtered;
    }
    if (eligible.empty())
        throw RoutingError("no jondo available between " + to_string(requester) + " and " + to_string(provider));

    CrowdsRoute route;
    route.hops.push_back(eligible[rng.below(eligible.size())]);
    while (static_cast<int>(route.hops.size()) < cfg.max_hops && rng.bernoulli(cfg.forward_probability))
        route.hops.push_back(eligible[rng.below(eligible.size())]);
    return route;
}

std::vector<PeerId> route_response(const CrowdsRoute& route)
{
    return {route.hops.rbegin(), route.hops.rend()};
}

} // namespace dpsim::crowds
