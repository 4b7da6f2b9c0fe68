#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtr {

/// Machine-readable reason codes shared by the parser, the operators, the
/// program lifts, the engine and the evaluator.
enum class ErrorCode {
  SyntaxError,
  DuplicateName,
  ArityMismatch,
  IllFormed,
  UnknownType,
  UnknownName,
  KindMismatch,
  BadPath,
  BadIndex,
  NoFocus,
  MultipleFoci,
  AlreadyFocused,
  NameClash,
  BadPermutation,
  StillReferenced,
  NotAnAlias,
  RhsMismatch,
  BadArgMap,
  NotAliasApplication,
  BadRange,
  NotATuple,
  NotANewtype,
  NotConvertibleToNewtype,
  NotEquivalent,
  NotAnApplicationOfOld,
  UnifierInvalid,
  NotAData,
  UnboundTypeVar,
  LastConstructor,
  NotADataOrNewtypeCons,
  NotANewtypeTarget,
  UnsaturatedUntuplable,
  UnsignedFunctionUsesType,
  NestedOccurrenceUnsupported,
  WouldEmptyFunction,
  BadArguments,
  EmptyHistory,
  HitBottom,
  PatternMatchFailure,
  Unbound,
  FuelExhausted,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::SyntaxError,
    ErrorCode::DuplicateName,
    ErrorCode::ArityMismatch,
    ErrorCode::IllFormed,
    ErrorCode::UnknownType,
    ErrorCode::UnknownName,
    ErrorCode::KindMismatch,
    ErrorCode::BadPath,
    ErrorCode::BadIndex,
    ErrorCode::NoFocus,
    ErrorCode::MultipleFoci,
    ErrorCode::AlreadyFocused,
    ErrorCode::NameClash,
    ErrorCode::BadPermutation,
    ErrorCode::StillReferenced,
    ErrorCode::NotAnAlias,
    ErrorCode::RhsMismatch,
    ErrorCode::BadArgMap,
    ErrorCode::NotAliasApplication,
    ErrorCode::BadRange,
    ErrorCode::NotATuple,
    ErrorCode::NotANewtype,
    ErrorCode::NotConvertibleToNewtype,
    ErrorCode::NotEquivalent,
    ErrorCode::NotAnApplicationOfOld,
    ErrorCode::UnifierInvalid,
    ErrorCode::NotAData,
    ErrorCode::UnboundTypeVar,
    ErrorCode::LastConstructor,
    ErrorCode::NotADataOrNewtypeCons,
    ErrorCode::NotANewtypeTarget,
    ErrorCode::UnsaturatedUntuplable,
    ErrorCode::UnsignedFunctionUsesType,
    ErrorCode::NestedOccurrenceUnsupported,
    ErrorCode::WouldEmptyFunction,
    ErrorCode::BadArguments,
    ErrorCode::EmptyHistory,
    ErrorCode::HitBottom,
    ErrorCode::PatternMatchFailure,
    ErrorCode::Unbound,
    ErrorCode::FuelExhausted,
};

std::string_view codeName(ErrorCode code);

/// Thrown by every checked operation. `locations` holds selectors or
/// `fun/equation` coordinates of the offending fragments.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail,
        std::vector<std::string> locations = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<std::string>& locations() const noexcept {
    return locations_;
  }

 private:
  ErrorCode code_;
  std::string detail_;
  std::vector<std::string> locations_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::string message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

[[noreturn]] void fail(ErrorCode code, std::string detail,
                       std::vector<std::string> locations = {});

}  // namespace dtr
