#pragma once

#include "gsdp/analysis.hpp"
#include "gsdp/descriptor.hpp"
#include "gsdp/error.hpp"
#include "gsdp/interchange.hpp"
#include "gsdp/persistence.hpp"
#include "gsdp/prototype.hpp"
#include "gsdp/synth.hpp"
#include "gsdp/verify.hpp"

namespace gsdp {
inline constexpr const char* kVersion = "0.1.0";
}
