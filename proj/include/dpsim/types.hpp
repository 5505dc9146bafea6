#ifndef DPSIM_TYPES_HPP
#define DPSIM_TYPES_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpsim {

using Bytes = std::vector<std::uint8_t>;

/// Identifier of a simulated peer. Dense within one network (0..n-1).
struct PeerId
{
    std::uint32_t value = 0;

    constexpr PeerId() = default;
    constexpr explicit PeerId(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(PeerId, PeerId) = default;
};

std::string to_string(PeerId id);

/// Application data carried by a transaction. 1 KB = 1024 bytes.
struct Payload
{
    Bytes bytes;

    double size_kb() const { return static_cast<double>(bytes.size()) / 1024.0; }

    /// Deterministic filler payload of the given size.
    static Payload of_size_kb(double kb, std::uint8_t fill = 0x5a);

    friend bool operator==(const Payload&, const Payload&) = default;
};

class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a peer tries to open data sealed for somebody else.
class CipherError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class HopLimitError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class RoutingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SelectionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace dpsim

template <>
struct std::hash<dpsim::PeerId>
{
    std::size_t operator()(dpsim::PeerId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

#endif
