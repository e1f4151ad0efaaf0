#pragma once

#include "hpdesign/anneal.hpp"
#include "hpdesign/design.hpp"
#include "hpdesign/enumeration.hpp"
#include "hpdesign/error.hpp"
#include "hpdesign/io.hpp"
#include "hpdesign/ising.hpp"
#include "hpdesign/lattice.hpp"
#include "hpdesign/min_ehp.hpp"
#include "hpdesign/noise.hpp"
#include "hpdesign/parallel.hpp"
#include "hpdesign/random.hpp"
#include "hpdesign/rational.hpp"

namespace hpdesign {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hpdesign
