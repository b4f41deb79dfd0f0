#pragma once

// Counterexample handling: classification of failed checks, the example
// database (E+ / E- / implications with conflict log), weakest-link
// localization for system failures, and diagnostics rendering for prompts.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "compver/contract.hpp"
#include "compver/program_model.hpp"
#include "compver/verifier.hpp"

namespace compver {

enum class ClassLevel { tool_level, semantic_level };
enum class Category { syntax_error, unparsed, tool_error, unconstrained_init, semantic };

std::string_view to_string(ClassLevel l);
std::string_view to_string(Category c);

struct Classification {
  ClassLevel level = ClassLevel::semantic_level;
  Category category = Category::semantic;

  /// Only unconstrained-init and semantic failures may enter E-.
  bool admissible() const {
    return level == ClassLevel::semantic_level &&
           (category == Category::unconstrained_init || category == Category::semantic);
  }
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// `context_source` is the checked (instrumented) text; it is searched for
/// assumptions constraining the variables of the violated property.
/// Throws std::invalid_argument for passing results.
Classification classify(const VerificationResult& r, std::string_view context_source = {});

using ValuationText = std::map<std::string, std::string>;

struct StateExample {
  std::string function;
  ValuationText valuation;   // normalized values
  std::string provenance;
  friend bool operator==(const StateExample&, const StateExample&) = default;
};

/// Canonical form: unqualified names, normalized values.
StateExample make_example(std::string function, const std::map<std::string, std::string>& raw,
                          std::string provenance = {});

struct ImplicationExample {
  std::string function;
  ValuationText pre;
  ValuationText post;
  std::string provenance;
  friend bool operator==(const ImplicationExample&, const ImplicationExample&) = default;
};

enum class Polarity { positive, negative };

struct Conflict {
  Polarity attempted;   // the polarity that was refused
  StateExample candidate;
  StateExample clashing;
};

enum class AdmitOutcome { added, duplicate, conflict, rejected };

std::string_view to_string(AdmitOutcome o);

class IceDatabase {
 public:
  /// Adds `ex` to E- when `c` is admissible and no identical E+ state exists
  /// for the same function (that case is logged as a conflict instead).
  AdmitOutcome admit(const Classification& c, StateExample ex);
  /// Adds `ex` to E+ unless already present or clashing with E-.
  AdmitOutcome record_positive(StateExample ex);
  AdmitOutcome add_implication(ImplicationExample imp);
  /// Copies every example and conflict of `other` through the same rules.
  void merge(const IceDatabase& other);

  const std::vector<StateExample>& positives() const { return positives_; }
  const std::vector<StateExample>& negatives() const { return negatives_; }
  const std::vector<ImplicationExample>& implications() const { return implications_; }
  const std::vector<Conflict>& conflicts() const { return conflicts_; }

  std::vector<StateExample> positives_for(std::string_view f) const;
  std::vector<StateExample> negatives_for(std::string_view f) const;
  std::vector<ImplicationExample> implications_for(std::string_view f) const;
  std::vector<std::string> functions() const;
  bool empty() const;

  /// Line format: `pos <f> [@prov] k=v ...`, `neg ...`,
  /// `imp <f> [@prov] k=v ... => k=v ...`, `conflict <pos|neg> <f> k=v ...`.
  std::string serialize() const;
  static IceDatabase deserialize(std::string_view text);

 private:
  std::vector<StateExample> positives_;
  std::vector<StateExample> negatives_;
  std::vector<ImplicationExample> implications_;
  std::vector<Conflict> conflicts_;
};

/// Loop-carried state pairs from the trace steps inside `f`. Empty for
/// loop-free functions or fewer than two steps in `f`.
std::vector<ImplicationExample> extract_implications(const ParsedCounterexample& cx, const FunctionInfo& f,
                                                     std::string_view provenance = {});

/// State to exclude for `f` after a failure: the last values the trace gives
/// to f's parameters, globals and return value, or every key variable when
/// none of those appear.
StateExample negative_example(const ParsedCounterexample& cx, const FunctionInfo& f, const ProgramModel& model,
                              std::string provenance = {});

/// States that a verified `f` must admit: integer-literal arguments of its
/// calls in main, one example per call site.
std::vector<StateExample> call_site_positives(const ProgramModel& model, const FunctionInfo& f,
                                              std::string provenance = {});

class NoResponsibleFunction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GapScore {
  std::string function;
  std::size_t mapped = 0;
  std::size_t covering_ensures = 0;
  double gap = 0.0;
};

/// Gap scores of all candidate functions, highest first (ties by name).
std::vector<GapScore> gap_scores(const ParsedCounterexample& cx, const ContractSet& contracts,
                                 const ProgramModel& model);

/// Function most responsible for a system failure. Throws
/// NoResponsibleFunction when no key variable maps to any function.
std::string weakest_link(const ParsedCounterexample& cx, const ContractSet& contracts, const ProgramModel& model);

struct DiagnosticOptions {
  std::size_t limit = 10;                 // most recent examples per polarity per function
  std::optional<std::string> function;   // restrict example sections to one function
};

namespace markers {
inline constexpr std::string_view positives = "== E+ (must be admitted) ==";
inline constexpr std::string_view negatives = "== E- (must be excluded) ==";
inline constexpr std::string_view implications = "== Implications (pre => post) ==";
inline constexpr std::string_view conflicts = "== Conflicts ==";
inline constexpr std::string_view raw = "== Counterexample (raw) ==";
}  // namespace markers

/// Structured block: classification, violated property, trace, then the
/// example sections. Pure function of its arguments.
std::string render_diagnostics(const IceDatabase& db, const ParsedCounterexample* cx, const Classification& c,
                               const DiagnosticOptions& opts = {});

/// Just the E+, E-, implication and conflict sections.
std::string render_example_sections(const IceDatabase& db, const DiagnosticOptions& opts = {});

/// Ablation form: the backend output verbatim, no example sections.
std::string render_raw_diagnostics(const VerificationResult& r);

std::string render_valuation(const ValuationText& v);

}  // namespace compver
