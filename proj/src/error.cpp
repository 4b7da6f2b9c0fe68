#include "dtr/error.hpp"

namespace dtr {

std::string_view codeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::IllFormed: return "IllFormed";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::NoFocus: return "NoFocus";
    case ErrorCode::MultipleFoci: return "MultipleFoci";
    case ErrorCode::AlreadyFocused: return "AlreadyFocused";
    case ErrorCode::NameClash: return "NameClash";
    case ErrorCode::BadPermutation: return "BadPermutation";
    case ErrorCode::StillReferenced: return "StillReferenced";
    case ErrorCode::NotAnAlias: return "NotAnAlias";
    case ErrorCode::RhsMismatch: return "RhsMismatch";
    case ErrorCode::BadArgMap: return "BadArgMap";
    case ErrorCode::NotAliasApplication: return "NotAliasApplication";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::NotATuple: return "NotATuple";
    case ErrorCode::NotANewtype: return "NotANewtype";
    case ErrorCode::NotConvertibleToNewtype: return "NotConvertibleToNewtype";
    case ErrorCode::NotEquivalent: return "NotEquivalent";
    case ErrorCode::NotAnApplicationOfOld: return "NotAnApplicationOfOld";
    case ErrorCode::UnifierInvalid: return "UnifierInvalid";
    case ErrorCode::NotAData: return "NotAData";
    case ErrorCode::UnboundTypeVar: return "UnboundTypeVar";
    case ErrorCode::LastConstructor: return "LastConstructor";
    case ErrorCode::NotADataOrNewtypeCons: return "NotADataOrNewtypeCons";
    case ErrorCode::NotANewtypeTarget: return "NotANewtypeTarget";
    case ErrorCode::UnsaturatedUntuplable: return "UnsaturatedUntuplable";
    case ErrorCode::UnsignedFunctionUsesType: return "UnsignedFunctionUsesType";
    case ErrorCode::NestedOccurrenceUnsupported:
      return "NestedOccurrenceUnsupported";
    case ErrorCode::WouldEmptyFunction: return "WouldEmptyFunction";
    case ErrorCode::BadArguments: return "BadArguments";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::HitBottom: return "HitBottom";
    case ErrorCode::PatternMatchFailure: return "PatternMatchFailure";
    case ErrorCode::Unbound: return "Unbound";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail,
             std::vector<std::string> locations)
    : std::runtime_error(std::string(codeName(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)),
      locations_(std::move(locations)) {}

SyntaxError::SyntaxError(int line, int column, std::string message)
    : Error(ErrorCode::SyntaxError, std::move(message),
            {std::to_string(line) + ":" + std::to_string(column)}),
      line_(line),
      column_(column) {}

void fail(ErrorCode code, std::string detail,
          std::vector<std::string> locations) {
  throw Error(code, std::move(detail), std::move(locations));
}

}  // namespace dtr
