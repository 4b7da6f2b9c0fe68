#pragma once

// Call-by-name reference interpreter for closed expressions over a module.
// Results are forced completely. MiniFun has no operators, so arithmetic,
// comparison and list functions come as built-ins:
//
//   primAdd primSub primMul primEq primLt
//   primMap primFoldl primFoldr primCons primHead primTail primNull
//
// primEq and primLt answer with the constructors True and False.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dtr/syntax.hpp"

namespace dtr {

struct Value {
  enum class Kind { Con, Tuple, List, Lit, Closure };

  Kind kind = Kind::Tuple;
  Name name;  // Con: constructor. Closure: a short description.
  std::vector<Value> items;
  Literal lit;

  static Value con(Name c, std::vector<Value> args = {});
  static Value tuple(std::vector<Value> es);
  static Value list(std::vector<Value> es);
  static Value integer(long long n);
  static Value string(std::string s);

  bool operator==(const Value&) const = default;
};

std::string printValue(const Value& v);

inline constexpr std::size_t kDefaultFuel = 100000;

bool isBuiltinFunction(const Name& n);

/// Throws HitBottom, PatternMatchFailure, Unbound or FuelExhausted.
Value eval(const Module& m, const Expr& e, std::size_t fuel = kDefaultFuel);
Value eval(const Module& m, std::string_view expr, std::size_t fuel = kDefaultFuel);

}  // namespace dtr
