#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spatial {

enum class Errc {
  // codec
  LengthNotByteAligned,
  EmptyKey,
  OddBitLength,
  BadAlphabet,
  // fragmentation
  PlanLengthMismatch,
  BadPlan,
  IncompleteTree,
  DuplicatePath,
  PrefixConflict,
  PathTooDeep,
  ZeroDigitAfterPadding,
  BadWidth,
  BadPath,
  SizeOverflow,
  TruncatedStream,
  // alignment
  TooFewCarriers,
  TooManyCarriers,
  BadScoring,
  // stego
  CapacityExceeded,
  LengthMismatch,
  UnknownCarrier,
  AmbiguousTemplate,
  // auth
  KeyTooShort,
  // pipeline
  BadConfig,
  MacFailure,
  SeqMismatch,
  WrongCount,
  TotalSizeMismatch,
  // wire format
  BadVersion,
  BadTagLength,
  MissingLine,
  // files
  BadFasta,
  BadSessionFile,
  IoFailure,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::LengthNotByteAligned: return "LengthNotByteAligned";
    case Errc::EmptyKey: return "EmptyKey";
    case Errc::OddBitLength: return "OddBitLength";
    case Errc::BadAlphabet: return "BadAlphabet";
    case Errc::PlanLengthMismatch: return "PlanLengthMismatch";
    case Errc::BadPlan: return "BadPlan";
    case Errc::IncompleteTree: return "IncompleteTree";
    case Errc::DuplicatePath: return "DuplicatePath";
    case Errc::PrefixConflict: return "PrefixConflict";
    case Errc::PathTooDeep: return "PathTooDeep";
    case Errc::ZeroDigitAfterPadding: return "ZeroDigitAfterPadding";
    case Errc::BadWidth: return "BadWidth";
    case Errc::BadPath: return "BadPath";
    case Errc::SizeOverflow: return "SizeOverflow";
    case Errc::TruncatedStream: return "TruncatedStream";
    case Errc::TooFewCarriers: return "TooFewCarriers";
    case Errc::TooManyCarriers: return "TooManyCarriers";
    case Errc::BadScoring: return "BadScoring";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::UnknownCarrier: return "UnknownCarrier";
    case Errc::AmbiguousTemplate: return "AmbiguousTemplate";
    case Errc::KeyTooShort: return "KeyTooShort";
    case Errc::BadConfig: return "BadConfig";
    case Errc::MacFailure: return "MacFailure";
    case Errc::SeqMismatch: return "SeqMismatch";
    case Errc::WrongCount: return "WrongCount";
    case Errc::TotalSizeMismatch: return "TotalSizeMismatch";
    case Errc::BadVersion: return "BadVersion";
    case Errc::BadTagLength: return "BadTagLength";
    case Errc::MissingLine: return "MissingLine";
    case Errc::BadFasta: return "BadFasta";
    case Errc::BadSessionFile: return "BadSessionFile";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
/// `subject()` names the offending item where one exists (for MacFailure it
/// is the packet's seq_bits).
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string subject = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        subject_(std::move(subject)) {}

  Errc code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::string subject_;
};

}  // namespace spatial
