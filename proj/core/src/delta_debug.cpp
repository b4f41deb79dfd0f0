#include "compver/delta_debug.hpp"

#include <vector>

namespace compver {

namespace {

class Reducer {
 public:
  Reducer(const Contract& c, const ContractCheck& check) : base_(c), check_(check) {}

  bool passes(const std::vector<std::size_t>& idx) {
    ++checks;
    Contract t = base_;
    t.postconditions.clear();
    for (auto i : idx) t.postconditions.push_back(base_.postconditions[i]);
    return check_(t);
  }

  // Tries to add `chunk` to `kept`; on failure splits it and recurses.
  // `known_failing` skips the check when the caller already knows the answer.
  void add(std::vector<std::size_t>& kept, const std::vector<std::size_t>& chunk, bool known_failing) {
    if (chunk.empty()) return;
    if (!known_failing) {
      auto trial = merged(kept, chunk);
      if (passes(trial)) {
        kept = std::move(trial);
        return;
      }
    }
    if (chunk.size() == 1) return;
    auto mid = chunk.begin() + static_cast<std::ptrdiff_t>(chunk.size() / 2);
    add(kept, {chunk.begin(), mid}, false);
    add(kept, {mid, chunk.end()}, false);
  }

  std::size_t checks = 0;

 private:
  static std::vector<std::size_t> merged(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i] < b[j])) out.push_back(a[i++]);
      else out.push_back(b[j++]);
    }
    return out;
  }

  const Contract& base_;
  const ContractCheck& check_;
};

}  // namespace

Contract delta_debug(const Contract& c, const ContractCheck& check, DeltaDebugStats* stats) {
  Reducer r(c, check);
  std::vector<std::size_t> all(c.postconditions.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto finish = [&] {
    if (stats) stats->checks = r.checks;
  };

  if (r.passes(all)) {
    finish();
    throw std::invalid_argument("delta_debug needs a failing contract");
  }
  if (all.empty() || !r.passes({})) {
    finish();
    throw IrreducibleFailure(c.function_name + " fails with no ensures clauses");
  }
  std::vector<std::size_t> kept;
  r.add(kept, all, true);
  finish();

  Contract out = c;
  out.postconditions.clear();
  for (auto i : kept) out.postconditions.push_back(c.postconditions[i]);
  out.origin = ContractOrigin::delta_reduced;
  return out;
}

}  // namespace compver
