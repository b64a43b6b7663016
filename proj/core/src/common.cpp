#include "vttn/common.hpp"

#include <atomic>
#include <cstdlib>

namespace vttn {
namespace {

constexpr std::size_t kDefaultBudget = 100'000'000;  // 1e8 elements

std::size_t initial_budget() {
    if (const char* env = std::getenv("VTTN_ELEMENT_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultBudget;
}

std::atomic<std::size_t>& budget_storage() {
    static std::atomic<std::size_t> budget{initial_budget()};
    return budget;
}

}  // namespace

std::size_t element_budget() { return budget_storage().load(std::memory_order_relaxed); }

void set_element_budget(std::size_t elements) {
    budget_storage().store(elements == 0 ? initial_budget() : elements,
                           std::memory_order_relaxed);
}

void check_element_budget(std::uint64_t elements, const char* context) {
    const std::uint64_t budget = element_budget();
    if (elements > budget) {
        throw BudgetError(std::string(context) + ": would materialize " +
                          std::to_string(elements) + " dense elements, budget is " +
                          std::to_string(budget) +
                          " (override with VTTN_ELEMENT_BUDGET)");
    }
}

}  // namespace vttn
