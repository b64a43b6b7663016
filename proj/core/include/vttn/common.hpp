#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vttn {

using Index = Eigen::Index;

/// Machine precision for IEEE double, 2^-52. Used as the base unit for all
/// numerical-rank and least-squares cutoffs.
inline constexpr double kMachineEpsilon = 2.220446049250313e-16;

/// Thrown when an operation would materialize more dense scalars than the
/// configured element budget allows.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Current dense element budget. Defaults to 1e8 elements; the environment
/// variable VTTN_ELEMENT_BUDGET overrides the default at first use.
std::size_t element_budget();

/// Override the budget for the rest of the process. Passing 0 restores the
/// default/environment value.
void set_element_budget(std::size_t elements);

/// Throws BudgetError if `elements` exceeds the budget. `context` names the
/// offending operation in the message.
void check_element_budget(std::uint64_t elements, const char* context);

}  // namespace vttn
