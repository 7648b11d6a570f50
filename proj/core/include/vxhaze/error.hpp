#pragma once

#include <stdexcept>
#include <string>

namespace vxhaze {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidSamplePoint,
  kPixelOutOfBounds,
  kCorruptGrid,
  kBadMagic,
  kTruncated,
  kDimsMismatch,
  kMissingFile,
  kIo,
  kSeriesDiverges,
  kSceneTooDense,
  kInsufficientViews,
  kDivergence,
  kSweepTooCoarse,
  kUnsupportedProfile,
};

const char* to_string(ErrorCode code);

// Every failure surfaced by the library is a vxhaze::Error carrying one of the
// codes above, so callers (and the CLI exit-code mapping) can branch on kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace vxhaze
