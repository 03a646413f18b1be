#pragma once

#include <vector>

#include "cnc/model.hpp"

namespace cnc {

struct AssignmentExecution {
    CnodeId cnode;
    TierKind tier = TierKind::Weak;
    double executed_wu = 0.0;  // drained from the cnode backlog for this assignment
};

/// What the engine reports about a request once it reaches a terminal state.
struct ExecutionRecord {
    RequestId request;
    Outcome outcome = Outcome::RejectedInfeasible;
    std::vector<AssignmentExecution> assignments;
};

struct MeteredUsage {
    RequestId request;
    Outcome outcome = Outcome::RejectedInfeasible;
    std::vector<std::pair<TierKind, double>> per_assignment_wu;

    double total_wu() const;
};

MeteredUsage meter(const ExecutionRecord& record);

/// cost = sum of metered work times the executing tier's price. Rejected
/// requests bill zero.
BillRecord price(const MeteredUsage& usage, const TierTable& tiers);

/// Append-only bill store.
class Ledger {
public:
    void append(BillRecord bill) { bills_.push_back(bill); }
    const std::vector<BillRecord>& bills() const { return bills_; }
    double total_cost() const;
    double total_metered_wu() const;
    // Counting only requests that met their deadline.
    double successful_cost() const;

private:
    std::vector<BillRecord> bills_;
};

}  // namespace cnc
