#pragma once

#include <cstdint>
#include <vector>

#include "cnc/scenario.hpp"

namespace cnc {

/// Image-processing style service: input heavy, small output.
/// 8 MB in, 0.1 MB out and 2 wu per task.
ServiceDescriptor image_processing_preset(ServiceId id);

/// Seeded, reproducible request stream following `spec`. Request ids start at
/// `first_id` and follow submit order.
std::vector<RawRequest> generate_workload(const WorkloadSpec& spec, std::uint64_t seed, RequestId first_id = RequestId(0));

}  // namespace cnc
