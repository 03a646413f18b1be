#pragma once

#include <span>
#include <vector>

#include "cnc/model.hpp"

namespace cnc {

inline constexpr double kDefaultDeadlineS = 86'400.0;

/// Opaque per-task result; only the task index and size matter here.
struct TaskResult {
    std::uint32_t task_index = 0;
    double size_bytes = 0.0;

    bool operator==(const TaskResult&) const = default;
};

struct MergedResult {
    std::vector<TaskResult> results;  // ordered by task index
    double completed_at_s = 0.0;
};

struct ClientResponse {
    RequestId request;
    Level level = Level::Performance;
    std::vector<TaskResult> payload;
    double completed_at_s = 0.0;
    std::optional<ServiceId> service;       // function / performance requests
    std::optional<ResourceSpec> resources;  // resource requests

    bool operator==(const ClientResponse&) const = default;
};

/// Resolves a resource spec to the pseudo-service of the smallest resource
/// class that covers it (ordered by cpu, gpu, memory, then service id).
/// Throws Error(NoSuchService) when no class covers the spec.
ServiceId resolve_resource_class(const ResourceSpec& spec, std::span<const ServiceDescriptor> catalog);

/// Maps a raw request of any level to (service, deadline):
///   resource    -> resource-class pseudo-service, deadline = usage duration
///   function    -> requested service, deadline = default_deadline_s
///   performance -> requested service, deadline as given
RegularizedRequest regularize(const RawRequest& raw, std::span<const ServiceDescriptor> catalog,
                              double default_deadline_s = kDefaultDeadlineS);

/// Wraps the merged results back into the client's request form.
/// Throws Error(IncompleteResult) unless every task index is present once.
ClientResponse restore(const MergedResult& merged, const RawRequest& raw);

}  // namespace cnc
