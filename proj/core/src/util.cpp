#include "licl/util.hpp"

#include <fmt/core.h>

namespace licl {

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

}  // namespace licl
