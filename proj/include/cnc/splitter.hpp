#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cnc/model.hpp"
#include "cnc/regularizer.hpp"

namespace cnc {

struct TaskSetPacket {
    RequestId request;
    std::size_t assignment = 0;
    TaskRange tasks;
    CnodeId cnode;
    double size_bytes = 0.0;
    Path path;  // forward path of the assignment
};

/// One packet per assignment of a feasible plan, sized by its task count.
/// Throws Error(InfeasiblePlan) for an infeasible plan.
std::vector<TaskSetPacket> split(const RegularizedRequest& request, const ServiceDescriptor& service,
                                 const RoutingPlan& plan);

struct ResultFragment {
    TaskRange tasks;
    std::vector<TaskResult> results;  // one per task in `tasks`, in order
};

/// Result fragment produced by executing `tasks` of `service`.
ResultFragment make_fragment(TaskRange tasks, const ServiceDescriptor& service);

/// Reassembles fragments into original task order regardless of arrival order.
class Merger {
public:
    explicit Merger(std::uint32_t task_count) : task_count_(task_count) {}

    /// Throws Error(DuplicateRange) if the fragment overlaps one already held.
    void add(ResultFragment fragment);
    bool complete() const { return received_ == task_count_; }
    std::uint32_t received() const { return received_; }
    /// Throws Error(GapDetected) while incomplete.
    MergedResult finalize(double completed_at_s = 0.0) const;

private:
    std::uint32_t task_count_;
    std::uint32_t received_ = 0;
    std::vector<ResultFragment> fragments_;
};

MergedResult merge(std::span<const ResultFragment> fragments, std::uint32_t task_count);

}  // namespace cnc
