#include "cnc/regularizer.hpp"

#include <sstream>
#include <tuple>

#include "cnc/error.hpp"

namespace cnc {

ServiceId resolve_resource_class(const ResourceSpec& spec, std::span<const ServiceDescriptor> catalog) {
    const ServiceDescriptor* best = nullptr;
    auto key = [](const ServiceDescriptor& s) {
        return std::tuple(s.resource_class->cpu, s.resource_class->gpu, s.resource_class->memory_gb, s.id);
    };
    for (const auto& s : catalog) {
        if (!s.resource_class || !s.resource_class->covers(spec)) continue;
        if (!best || key(s) < key(*best)) best = &s;
    }
    if (!best) {
        std::ostringstream os;
        os << "no resource class covers cpu=" << spec.cpu << " gpu=" << spec.gpu << " memory_gb=" << spec.memory_gb;
        throw Error(ErrorCode::NoSuchService, os.str());
    }
    return best->id;
}

RegularizedRequest regularize(const RawRequest& raw, std::span<const ServiceDescriptor> catalog,
                              double default_deadline_s) {
    RegularizedRequest out;
    out.id = raw.id;
    out.task_count = raw.task_count;
    out.ingress = raw.ingress;
    out.submit_time_s = raw.submit_time_s;

    auto need_service = [&] {
        if (!raw.service) {
            std::ostringstream os;
            os << "request " << raw.id << " names no service";
            throw Error(ErrorCode::MissingService, os.str());
        }
        return *raw.service;
    };

    switch (raw.level) {
        case Level::Resource:
            if (!raw.resources) {
                std::ostringstream os;
                os << "resource request " << raw.id << " has no resource spec";
                throw Error(ErrorCode::MissingSpec, os.str());
            }
            if (!raw.usage_duration_s || !(*raw.usage_duration_s > 0.0)) {
                std::ostringstream os;
                os << "resource request " << raw.id << " has no positive usage duration";
                throw Error(ErrorCode::MissingDeadline, os.str());
            }
            out.service = resolve_resource_class(*raw.resources, catalog);
            out.deadline_s = *raw.usage_duration_s;
            break;
        case Level::Function:
            out.service = need_service();
            out.deadline_s = default_deadline_s;
            break;
        case Level::Performance:
            out.service = need_service();
            if (!raw.deadline_s || !(*raw.deadline_s > 0.0)) {
                std::ostringstream os;
                os << "performance request " << raw.id << " has no positive deadline";
                throw Error(ErrorCode::MissingDeadline, os.str());
            }
            out.deadline_s = *raw.deadline_s;
            break;
    }
    return out;
}

ClientResponse restore(const MergedResult& merged, const RawRequest& raw) {
    if (merged.results.size() != raw.task_count) {
        std::ostringstream os;
        os << "request " << raw.id << " has " << merged.results.size() << " of " << raw.task_count << " results";
        throw Error(ErrorCode::IncompleteResult, os.str());
    }
    for (std::uint32_t i = 0; i < raw.task_count; ++i) {
        if (merged.results[i].task_index != i) {
            std::ostringstream os;
            os << "request " << raw.id << " is missing the result of task " << i;
            throw Error(ErrorCode::IncompleteResult, os.str());
        }
    }
    ClientResponse response;
    response.request = raw.id;
    response.level = raw.level;
    response.payload = merged.results;
    response.completed_at_s = merged.completed_at_s;
    if (raw.level == Level::Resource)
        response.resources = raw.resources;
    else
        response.service = raw.service;
    return response;
}

}  // namespace cnc
