#include "vxhaze/error.hpp"

namespace vxhaze {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidSamplePoint: return "invalid sample point";
    case ErrorCode::kPixelOutOfBounds: return "pixel out of bounds";
    case ErrorCode::kCorruptGrid: return "corrupt grid";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kDimsMismatch: return "dims mismatch";
    case ErrorCode::kMissingFile: return "missing file";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kSeriesDiverges: return "series diverges";
    case ErrorCode::kSceneTooDense: return "scene too dense";
    case ErrorCode::kInsufficientViews: return "insufficient views";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kSweepTooCoarse: return "sweep too coarse";
    case ErrorCode::kUnsupportedProfile: return "unsupported profile";
  }
  return "unknown";
}

}  // namespace vxhaze
