#pragma once

namespace ldg {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace ldg
