#include "cnc/trading.hpp"

namespace cnc {

double MeteredUsage::total_wu() const {
    double total = 0.0;
    for (const auto& [tier, wu] : per_assignment_wu) total += wu;
    return total;
}

MeteredUsage meter(const ExecutionRecord& record) {
    MeteredUsage usage;
    usage.request = record.request;
    usage.outcome = record.outcome;
    if (record.outcome == Outcome::RejectedInfeasible) return usage;
    for (const auto& a : record.assignments) usage.per_assignment_wu.emplace_back(a.tier, a.executed_wu);
    return usage;
}

BillRecord price(const MeteredUsage& usage, const TierTable& tiers) {
    BillRecord bill;
    bill.request = usage.request;
    bill.outcome = usage.outcome;
    if (usage.outcome == Outcome::RejectedInfeasible) return bill;
    for (const auto& [tier, wu] : usage.per_assignment_wu) {
        bill.metered_wu += wu;
        bill.cost += wu * tiers[tier].price_per_wu;
    }
    return bill;
}

double Ledger::total_cost() const {
    double total = 0.0;
    for (const auto& b : bills_) total += b.cost;
    return total;
}

double Ledger::total_metered_wu() const {
    double total = 0.0;
    for (const auto& b : bills_) total += b.metered_wu;
    return total;
}

double Ledger::successful_cost() const {
    double total = 0.0;
    for (const auto& b : bills_)
        if (b.outcome == Outcome::Completed) total += b.cost;
    return total;
}

}  // namespace cnc
