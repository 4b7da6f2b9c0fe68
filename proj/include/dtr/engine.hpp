#pragma once

// Partial module transformations: operator dispatch (a datatype operator
// fused with its program lift), sequential composition, scripts, sessions
// with undo, and the operator catalogue for a focus.
//
// Script lines look like
//
//   rename-type ConsList SnocList
//   permute-cons Snoc 2,1
//   introduce "type Block = ([Dec], [Stat])"
//   fold-alias alias:Block at cons:Prog.Prog/2
//   swap-data unifier(Maybe=Maybe'; Nothing=Nothing', Just=Just') at alias:TransRel/rhs/path:2

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtr/error.hpp"
#include "dtr/selector.hpp"
#include "dtr/syntax.hpp"

namespace dtr {

struct OpInvocation {
  std::string op;
  std::vector<std::string> args;

  /// The script line, with arguments quoted where needed.
  std::string toString() const;
  bool operator==(const OpInvocation&) const = default;
};

using Script = std::vector<OpInvocation>;

/// Throws BadArguments.
OpInvocation parseInvocation(std::string_view line);
/// Blank lines and `#` comments are skipped. Throws BadArguments with the
/// line number in the detail.
Script parseScript(std::string_view text);
std::string printScript(const Script& s);

/// The verbs understood by applyOp, in catalogue order.
const std::vector<std::string>& opNames();
/// Argument synopsis of a verb, e.g. "<old:Type> <new:Type>".
std::string opUsage(const std::string& op);

struct StepSummary {
  OpInvocation inv;
  std::vector<std::string> changed;
  std::vector<TodoMarker> todos;
};

struct TrafoResult {
  bool ok = false;
  /// The transformed module, or the unchanged input on refusal.
  Module module;
  std::vector<TodoMarker> todos;
  std::vector<std::string> changed;
  std::vector<StepSummary> steps;

  ErrorCode code = ErrorCode::BadArguments;
  std::string detail;
  std::vector<std::string> locations;
  std::size_t failedStep = 0;  // 1-based; 0 when not part of a sequence

  static TrafoResult success(Module m);
  static TrafoResult refusal(const Module& input, const Error& e);
  /// The plain partial-function view.
  std::optional<Module> asOptional() const;
};

using Trafo = std::function<TrafoResult(const Module&)>;

TrafoResult applyOp(const Module& m, const OpInvocation& inv);
Trafo opTrafo(OpInvocation inv);
Trafo identityTrafo();
/// `t2` after `t1`; a refusal short-circuits with its step index.
Trafo seqTrafo(Trafo t1, Trafo t2);
TrafoResult runScript(const Module& m, const Script& s);

/// Declarations whose text differs between the modules, as `type:T`,
/// `sig:f/type` and `f/i` coordinates.
std::vector<std::string> changedLocations(const Module& before, const Module& after);

enum class FoldKind { Alias, Newtype, Data };

struct FoldRequest {
  CompRangeSel range;
  Name typeName;
  FoldKind kind = FoldKind::Data;
  Name consName;  // defaults to typeName
  /// Declare the alias first. Unset means: iff typeName is not declared.
  std::optional<bool> introduce;
};

/// The constituent steps of the fold dialogue. Throws like the operators.
Script expandCompoundFold(const Module& m, const FoldRequest& req);
TrafoResult compoundFold(const Module& m, const FoldRequest& req);

/// Operator templates that succeed at the focus, with arguments filled in.
/// Without a focus only `introduce` is offered.
std::vector<OpInvocation> applicableOps(const Module& m,
                                        const std::optional<FocusTarget>& focus);

class Session {
 public:
  struct Entry {
    Module before;
    OpInvocation inv;
  };

  explicit Session(Module initial);

  const Module& current() const { return current_; }
  const Module& initial() const { return initial_; }
  const std::vector<Entry>& history() const { return history_; }
  const std::optional<FocusTarget>& focus() const { return focus_; }
  /// Throws like resolve / resolveRange when the target does not exist.
  void setFocus(std::optional<FocusTarget> f);

  /// Records the step on success; a refusal leaves the session untouched.
  TrafoResult apply(const OpInvocation& inv);
  /// All steps or none; each step becomes its own history entry.
  TrafoResult applyScript(const Script& s);
  TrafoResult fold(const FoldRequest& req);
  /// Throws EmptyHistory.
  void undo();
  /// Re-runs the recorded invocations from the initial module.
  Module replay() const;
  std::vector<TodoMarker> todos() const;

 private:
  Module initial_;
  Module current_;
  std::vector<Entry> history_;
  std::optional<FocusTarget> focus_;
};

}  // namespace dtr
