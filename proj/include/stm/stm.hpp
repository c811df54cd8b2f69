#pragma once

#include "stm/errors.hpp"
#include "stm/quad.hpp"
#include "stm/specfun.hpp"
#include "stm/ffunc.hpp"
#include "stm/criticality.hpp"
#include "stm/charge.hpp"
#include "stm/gamma0.hpp"
#include "stm/forms.hpp"
#include "stm/montecarlo.hpp"

namespace stm {
inline constexpr const char* kVersion = "1.0.0";
}
