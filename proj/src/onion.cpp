#include "dpsim/onion.hpp"

#include <set>
#include <sstream>

namespace dpsim::onion {

namespace {

// Layer tags. Fields are little-endian, byte strings are u32 length-prefixed.
constexpr std::uint8_t kRelayLayer = 'R';
constexpr std::uint8_t kDeliveryLayer = 'D';
constexpr std::uint8_t kNextHop = 'N';
constexpr std::uint8_t kTerminator = 'T';

class Writer
{
public:
    Writer& tag(std::uint8_t t)
    {
        out_.push_back(t);
        return *this;
    }
    Writer& u32(std::uint32_t v)
    {
        for (int s = 0; s < 32; s += 8)
            out_.push_back(static_cast<std::uint8_t>(v >> s));
        return *this;
    }
    Writer& peer(PeerId p) { return u32(p.value); }
    Writer& blob(std::span<const std::uint8_t> b)
    {
        u32(static_cast<std::uint32_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
        return *this;
    }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class Reader
{
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t tag()
    {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= std::uint32_t{in_[pos_ + i]} << (8 * i);
        pos_ += 4;
        return v;
    }
    PeerId peer() { return PeerId{u32()}; }
    Bytes blob()
    {
        const std::size_t n = u32();
        need(n);
        Bytes b(in_.begin() + pos_, in_.begin() + pos_ + n);
        pos_ += n;
        return b;
    }
    void finish() const
    {
        if (pos_ != in_.size())
            throw ValidationError("trailing bytes in layer");
    }

private:
    void need(std::size_t n) const
    {
        if (in_.size() - pos_ < n)
            throw ValidationError("truncated layer");
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void require_distinct(std::span<const PeerId> peers, PeerId a, PeerId b, const char* what)
{
    std::set<PeerId> seen;
    for (auto p : peers) {
        if (p == a || p == b)
            throw ValidationError(std::string(what) + " lists an endpoint: " + to_string(p));
        if (!seen.insert(p).second)
            throw ValidationError(std::string(what) + " repeats " + to_string(p));
    }
}

} // namespace

ResponsePathPacket build_response_path(PeerId requester, std::span<const PeerId> response_peers,
                                       const CipherSuite& cipher)
{
    require_distinct(response_peers, requester, requester, "response path");

    // innermost first: the last hop delivers to the requester
    PeerId holder = requester;
    Bytes tail = cipher.seal(requester, Writer().tag(kTerminator).peer(requester).take());
    for (auto it = response_peers.rbegin(); it != response_peers.rend(); ++it) {
        Bytes layer = Writer().tag(kNextHop).peer(holder).blob(tail).take();
        tail = cipher.seal(*it, layer);
        holder = *it;
    }
    return {holder, std::move(tail)};
}

WrappedMessage wrap_request(const Payload& payload, std::span<const PeerId> request_peers, PeerId provider,
                            const ResponsePathPacket& response_packet, const CipherSuite& cipher, int hop_limit)
{
    require_distinct(request_peers, provider, provider, "request path");
    if (hop_limit < static_cast<int>(request_peers.size()) + 1)
        throw ValidationError("hop limit " + std::to_string(hop_limit) + " cannot reach the provider over " +
                              std::to_string(request_peers.size()) + " relays");

    Bytes body = cipher.seal(provider, Writer()
                                           .tag(kDeliveryLayer)
                                           .blob(payload.bytes)
                                           .peer(response_packet.next_peer)
                                           .blob(response_packet.tail)
                                           .take());
    PeerId next = provider;
    for (auto it = request_peers.rbegin(); it != request_peers.rend(); ++it) {
        body = cipher.seal(*it, Writer().tag(kRelayLayer).peer(next).blob(body).take());
        next = *it;
    }
    return {next, std::move(body), hop_limit};
}

PeelResult peel(PeerId at, const WrappedMessage& msg, const CipherSuite& cipher)
{
    if (msg.hop_limit <= 0)
        throw HopLimitError("hop limit exhausted at " + to_string(at));

    const Bytes plain = cipher.open(at, msg.body);
    Reader r(plain);
    const auto kind = r.tag();
    if (kind == kRelayLayer) {
        const PeerId next = r.peer();
        Bytes inner = r.blob();
        r.finish();
        return Relay{next, WrappedMessage{next, std::move(inner), msg.hop_limit - 1}};
    }
    if (kind == kDeliveryLayer) {
        Delivery d;
        d.payload.bytes = r.blob();
        d.response.next_peer = r.peer();
        d.response.tail = r.blob();
        r.finish();
        return d;
    }
    throw ValidationError("unknown request layer tag");
}

ResponseEnvelope start_response(PeerId /*provider*/, const Payload& response_payload,
                                const ResponsePathPacket& response, const CipherSuite& cipher)
{
    if (response.tail.empty())
        throw ValidationError("response packet has no tail");
    return {response.next_peer, cipher.seal(response.next_peer, response_payload.bytes), response.tail};
}

ResponseStep step_response(PeerId at, const ResponseEnvelope& env, const CipherSuite& cipher)
{
    Payload payload{cipher.open(at, env.sealed_payload)};
    const Bytes layer = cipher.open(at, env.tail);
    Reader r(layer);
    const auto kind = r.tag();
    if (kind == kTerminator) {
        if (r.peer() != at)
            throw ValidationError("terminator names a different requester");
        r.finish();
        return ResponseFinal{std::move(payload)};
    }
    if (kind != kNextHop)
        throw ValidationError("unknown response layer tag");
    const PeerId next = r.peer();
    Bytes inner = r.blob();
    r.finish();
    return ResponseRelay{ResponseEnvelope{next, cipher.seal(next, payload.bytes), std::move(inner)}};
}

std::size_t response_depth(const ResponsePathPacket& packet, const CipherSuite& cipher)
{
    std::size_t depth = 0;
    PeerId holder = packet.next_peer;
    Bytes tail = packet.tail;
    for (;;) {
        ++depth;
        const Bytes layer = cipher.open(holder, tail);
        Reader r(layer);
        const auto kind = r.tag();
        if (kind == kTerminator)
            return depth;
        if (kind != kNextHop)
            throw ValidationError("unknown response layer tag");
        holder = r.peer();
        tail = r.blob();
    }
}

std::string dump_layers(const WrappedMessage& msg, const CipherSuite& cipher)
{
    std::ostringstream os;
    WrappedMessage cur = msg;
    std::string indent;
    for (;;) {
        os << indent << "layer for " << to_string(cur.addressed_to) << " (" << cur.body.size()
           << " bytes, hop_limit " << cur.hop_limit << ")\n";
        indent += "  ";
        PeelResult res;
        try {
            res = peel(cur.addressed_to, cur, cipher);
        } catch (const std::exception& e) {
            os << indent << "<" << e.what() << ">\n";
            return os.str();
        }
        if (auto* relay = std::get_if<Relay>(&res)) {
            cur = std::move(relay->inner);
            continue;
        }
        const auto& d = std::get<Delivery>(res);
        os << indent << "payload " << d.payload.bytes.size() << " bytes\n";
        os << indent << "response next_peer " << to_string(d.response.next_peer) << ", tail "
           << d.response.tail.size() << " bytes\n";
        return os.str();
    }
}

} // namespace dpsim::onion
