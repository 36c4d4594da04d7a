#ifndef DRI_VERSION_HPP
#define DRI_VERSION_HPP

namespace dri {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // DRI_VERSION_HPP
