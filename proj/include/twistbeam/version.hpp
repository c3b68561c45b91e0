#pragma once

namespace twistbeam {

inline constexpr const char* kVersion = "1.0.0";

// Release stamp written into output headers. Kept as a constant (not the wall
// clock) so that identical configurations produce byte-identical files.
inline constexpr const char* kReleaseDate = "2026-08-10";

}  // namespace twistbeam
