#include "cnc/splitter.hpp"

#include <algorithm>
#include <sstream>

#include "cnc/error.hpp"

namespace cnc {

std::vector<TaskSetPacket> split(const RegularizedRequest& request, const ServiceDescriptor& service,
                                 const RoutingPlan& plan) {
    if (!plan.feasible()) {
        std::ostringstream os;
        os << "request " << request.id << " has no feasible plan to split";
        throw Error(ErrorCode::InfeasiblePlan, os.str());
    }
    std::vector<TaskSetPacket> out;
    out.reserve(plan.assignments.size());
    for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
        const auto& a = plan.assignments[i];
        out.push_back({request.id, i, a.tasks, a.schedule.cnode, a.tasks.size() * service.input_bytes_per_task,
                       a.schedule.forward_path});
    }
    return out;
}

ResultFragment make_fragment(TaskRange tasks, const ServiceDescriptor& service) {
    ResultFragment f;
    f.tasks = tasks;
    for (auto i = tasks.begin; i < tasks.end; ++i) f.results.push_back({i, service.output_bytes_per_task});
    return f;
}

void Merger::add(ResultFragment fragment) {
    const auto& r = fragment.tasks;
    if (r.end > task_count_ || r.begin >= r.end) {
        std::ostringstream os;
        os << "fragment [" << r.begin << "," << r.end << ") is outside [0," << task_count_ << ")";
        throw Error(ErrorCode::DuplicateRange, os.str());
    }
    for (const auto& held : fragments_) {
        if (r.begin < held.tasks.end && held.tasks.begin < r.end) {
            std::ostringstream os;
            os << "fragment [" << r.begin << "," << r.end << ") overlaps [" << held.tasks.begin << ","
               << held.tasks.end << ")";
            throw Error(ErrorCode::DuplicateRange, os.str());
        }
    }
    received_ += r.size();
    fragments_.push_back(std::move(fragment));
}

MergedResult Merger::finalize(double completed_at_s) const {
    if (!complete()) {
        std::ostringstream os;
        os << "only " << received_ << " of " << task_count_ << " task results present";
        throw Error(ErrorCode::GapDetected, os.str());
    }
    std::vector<const ResultFragment*> order;
    for (const auto& f : fragments_) order.push_back(&f);
    std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->tasks.begin < y->tasks.begin; });
    MergedResult m;
    m.completed_at_s = completed_at_s;
    m.results.reserve(task_count_);
    for (const auto* f : order) m.results.insert(m.results.end(), f->results.begin(), f->results.end());
    return m;
}

MergedResult merge(std::span<const ResultFragment> fragments, std::uint32_t task_count) {
    Merger m(task_count);
    for (const auto& f : fragments) m.add(f);
    return m.finalize();
}

}  // namespace cnc
