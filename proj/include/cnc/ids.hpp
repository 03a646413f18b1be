#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace cnc {

/// Typed integer identifier. The tag keeps router, link, node, service and
/// request ids from being mixed up; ordering is the integer order and is
/// used for every deterministic tie-break in the library.
template <class Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    constexpr auto operator<=>(const Id&) const = default;
};

template <class Tag>
std::ostream& operator<<(std::ostream& os, Id<Tag> id) {
    return os << id.value;
}

struct RouterTag {};
struct LinkTag {};
struct CnodeTag {};
struct ServiceTag {};
struct RequestTag {};

using RouterId = Id<RouterTag>;
using LinkId = Id<LinkTag>;
using CnodeId = Id<CnodeTag>;
using ServiceId = Id<ServiceTag>;
using RequestId = Id<RequestTag>;

}  // namespace cnc

template <class Tag>
struct std::hash<cnc::Id<Tag>> {
    std::size_t operator()(cnc::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
