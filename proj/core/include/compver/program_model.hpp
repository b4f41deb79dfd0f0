#pragma once

// Lexical model of a single-translation-unit C program: the function
// inventory (minus main), the system assertion located in main, file-scope
// names, and per-function complexity metrics.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace compver {

/// Half-open byte range [begin, end) into ProgramModel::source_text.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(const ByteSpan& o) const { return begin <= o.begin && o.end <= end; }
  bool overlaps(const ByteSpan& o) const { return begin < o.end && o.begin < end; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

enum class Tier { minimal = 0, low = 1, medium = 2, high = 3 };

std::string_view to_string(Tier t);

/// Per-occurrence weights (flat penalties for recursion and unbounded loops).
struct WeightTable {
  double loop = 5.0;
  double nesting = 1.0;
  double recursion = 20.0;
  double unbounded_loop = 20.0;
  double dynamic_alloc = 3.0;
  double branch = 0.5;
  double pointer_op = 0.5;

  /// Parses `key = value` lines; `#` starts a comment. Unknown keys and
  /// non-positive weights throw std::invalid_argument.
  static WeightTable parse(std::string_view text);
  static WeightTable load(const std::filesystem::path& file);
};

struct ComplexityMetrics {
  std::size_t loop_count = 0;
  std::size_t max_nesting_depth = 0;
  bool has_recursion = false;
  bool has_unbounded_loop = false;
  std::size_t dynamic_alloc_count = 0;
  std::size_t branch_count = 0;
  std::size_t pointer_op_count = 0;
  double score = 0.0;
  Tier tier = Tier::minimal;
};

struct Param {
  std::string name;
  std::string type;
};

/// A loop inside a function body. Ordinals follow the textual order of the
/// loop keywords (the trailing `while` of a do-while is not a loop of its own).
struct LoopSite {
  std::size_t ordinal = 0;
  std::size_t keyword_offset = 0;
  ByteSpan body;   // the statement governed by the loop
  bool braced = false;
  std::size_t depth = 1;
  bool unbounded = false;
};

/// A call to a program function made from main, with its argument texts and
/// the variable receiving the result, if any (`r = f(1);`, `int r = f(1);`).
struct CallSite {
  std::string callee;
  std::vector<std::string> args;
  std::optional<std::string> assigned_to;
  std::size_t offset = 0;
};

struct FunctionInfo {
  std::string name;
  std::string return_type;
  std::string signature_text;
  ByteSpan span;        // signature start to closing brace
  ByteSpan body_span;   // '{' .. '}' inclusive
  std::vector<Param> params;
  bool is_static = false;
  bool is_recursive = false;
  std::vector<std::string> callees;
  std::vector<std::string> locals;
  std::vector<LoopSite> loops;
  ComplexityMetrics metrics;

  bool returns_value() const;
  bool has_param(std::string_view n) const;
};

enum class PropertyKind { assert_call, esbmc_assert };

struct SystemProperty {
  std::string assertion_text;
  std::size_t location = 0;
  PropertyKind kind = PropertyKind::assert_call;
};

struct ProgramModel {
  std::string source_text;
  std::vector<FunctionInfo> functions;   // excludes main, in source order
  ByteSpan main_span;
  ByteSpan main_body_span;
  SystemProperty property;
  std::vector<std::string> globals;
  std::vector<std::string> file_scope_names;   // globals, typedefs, tags, enumerators, macros
  std::vector<CallSite> main_calls;

  const FunctionInfo* find(std::string_view name) const;
  const FunctionInfo& at(std::string_view name) const;
  bool is_global(std::string_view name) const;
  std::vector<std::string> function_names() const;
  /// Functions reachable from main through the lexical call graph.
  std::vector<std::string> reachable_from_main() const;
};

class ProgramParseError : public std::runtime_error {
 public:
  enum class Kind { no_main, no_property, multiple_properties, unbalanced_source };
  ProgramParseError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ProgramParseError::Kind k);

/// Builds the model. Throws ProgramParseError.
ProgramModel parse_program(std::string source, const WeightTable& weights = {});

/// Recomputes score and tier from the metric counts of `f`.
ComplexityMetrics score_complexity(const FunctionInfo& f, const WeightTable& weights = {});

/// Half-open tier intervals: [0,5) minimal, [5,10) low, [10,20) medium, [20,inf) high.
Tier tier_for_score(double score);

struct FunctionPartition {
  std::vector<std::string> low;    // score < tau
  std::vector<std::string> high;   // score >= tau
};

FunctionPartition partition_functions(const ProgramModel& model, double tau);

/// Globals and pointer-parameter targets written in f's body, as assigns
/// target texts (`g`, `*out`, `p->len`). Locals are excluded.
std::vector<std::string> scan_write_targets(const ProgramModel& model, const FunctionInfo& f);

}  // namespace compver
