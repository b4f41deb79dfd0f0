#pragma once

// Nondeterministic-index encoding of bounded universal properties:
//   \forall i; 0 <= i < len ==> body(i)
// becomes a fresh unconstrained index, an assumption bounding it, and the
// body asserted at that index. A model checker exploring every index value
// checks every element.

#include <stdexcept>
#include <string>
#include <string_view>

namespace compver {

class UnsupportedQuantifierShape : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UniversalEncoding {
  std::string index_decl;    // "u32 idx;"
  std::string assumption;    // "__ESBMC_assume(idx < len);"
  std::string assertion;     // "[if (guard) ]assert(body[idx]);"
  std::string index_name;    // "idx"
  std::string body;          // body with the bound variable renamed
  std::string guard;         // may be empty

  /// The three statements joined by newlines.
  std::string fragment() const;
};

/// `property_text` is either a quantified formula
/// (`[guard ==>] \forall [type] i; [0 <= ]i < len ==> body`) or the bare body
/// written over `bound_var`, optionally guarded (`guard ==> body`).
/// `bound_expr` is the exclusive upper bound. Existential, nested or
/// otherwise shaped quantifiers throw UnsupportedQuantifierShape.
UniversalEncoding encode_universal_property(std::string_view property_text, std::string_view bound_var,
                                            std::string_view bound_expr, std::string_view index_type = "u32");

}  // namespace compver
