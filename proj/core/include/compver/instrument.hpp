#pragma once

// Source instrumentation: contract annotations spliced into function bodies
// for the backend's enforce (check one implementation) and replace (use
// contracts as call summaries) modes. Every injection is recorded so the
// original text can be recovered exactly.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "compver/contract.hpp"
#include "compver/program_model.hpp"

namespace compver {

enum class RenderMode { enforce, replace };

std::string_view to_string(RenderMode m);

struct Injection {
  std::size_t offset = 0;   // insertion point in the original source
  std::string text;         // bytes inserted there
  std::string function;     // function whose contract produced it
  std::string clause;       // originating clause text; empty for brace padding
};

struct InstrumentedSource {
  std::string text;
  RenderMode mode = RenderMode::replace;
  std::string target;                  // enforce mode: the checked function
  std::vector<std::string> replaced;   // replace mode: functions summarized by contracts
  std::vector<Injection> injections;   // ascending offsets
};

class InstrumentError : public std::runtime_error {
 public:
  enum class Kind { unknown_function, loop_ordinal_out_of_range };
  InstrumentError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Annotates `c.function_name` with its requires, assigns and ensures lines
/// (in that order) at the top of the body and each loop invariant as the
/// first statement of its loop. Other functions are untouched.
InstrumentedSource render_enforce(const ProgramModel& model, const Contract& c);

/// Annotates each contracted function so the backend can substitute its
/// calls by the contract. Functions without a contract stay concrete.
/// Loop invariants are not emitted in this mode.
InstrumentedSource render_replace(const ProgramModel& model, const ContractSet& contracts);

/// Plain source with no annotations, in replace mode (the concrete program).
InstrumentedSource render_plain(const ProgramModel& model);

/// Removes every recorded injection, giving back the original source.
std::string strip(const InstrumentedSource& src);

}  // namespace compver
