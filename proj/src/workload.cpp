#include "cnc/workload.hpp"

#include "cnc/rng.hpp"

namespace cnc {

namespace {
constexpr std::uint64_t kWorkloadStream = 1;
}

ServiceDescriptor image_processing_preset(ServiceId id) {
    ServiceDescriptor d;
    d.id = id;
    d.name = "image-processing";
    d.input_bytes_per_task = 8e6;
    d.output_bytes_per_task = 0.1e6;
    d.work_wu_per_task = 2.0;
    return d;
}

std::vector<RawRequest> generate_workload(const WorkloadSpec& spec, std::uint64_t seed, RequestId first_id) {
    std::vector<RawRequest> out;
    if (!(spec.rate_per_s > 0.0) || spec.ingress.empty()) return out;
    auto rng = make_stream(seed, kWorkloadStream);
    std::uint32_t next_id = first_id.value;
    for (double t = spec.start_s + exponential(rng, spec.rate_per_s); t < spec.end_s;
         t += exponential(rng, spec.rate_per_s)) {
        RawRequest r;
        r.id = RequestId(next_id++);
        r.level = spec.level;
        r.submit_time_s = t;
        r.ingress = spec.ingress[uniform_int(rng, 0, spec.ingress.size() - 1)];
        r.task_count = static_cast<std::uint32_t>(uniform_int(rng, spec.tasks_min, spec.tasks_max));
        if (spec.level == Level::Resource) {
            r.resources = spec.resources;
            r.usage_duration_s = spec.usage_duration_s;
        } else {
            r.service = spec.service;
            r.deadline_s = spec.deadline_s;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace cnc
