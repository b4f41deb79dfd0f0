#pragma once

// Clause-removal minimization of a failing contract's ensures list.

#include <cstddef>
#include <functional>
#include <stdexcept>

#include "compver/contract.hpp"

namespace compver {

/// Even the contract without ensures clauses fails its check.
class IrreducibleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// true = the check passes.
using ContractCheck = std::function<bool(const Contract&)>;

struct DeltaDebugStats {
  std::size_t checks = 0;
};

/// Returns `c` with a subset of its ensures clauses (original order kept,
/// requires/assigns untouched, origin delta_reduced) that passes `check`.
/// The subset is maximal for monotone checks: adding back any removed clause
/// fails. Uses at most 2*|ensures|+2 checks. Throws std::invalid_argument if
/// `c` passes, IrreducibleFailure if the empty ensures list fails.
Contract delta_debug(const Contract& c, const ContractCheck& check, DeltaDebugStats* stats = nullptr);

}  // namespace compver
