#ifndef QMELAB_VERSION_HPP
#define QMELAB_VERSION_HPP

namespace qmelab {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
