#pragma once
#include <eivsparse/cv.hpp>
#include <eivsparse/dantzig.hpp>
#include <eivsparse/data_model.hpp>
#include <eivsparse/error.hpp>
#include <eivsparse/export.hpp>
#include <eivsparse/lp.hpp>
#include <eivsparse/pursuit.hpp>
#include <eivsparse/ridge.hpp>
#include <eivsparse/rng.hpp>
#include <eivsparse/synth.hpp>
#include <eivsparse/variance.hpp>

namespace eivsparse {

inline constexpr const char* version = "0.1.0";

} // namespace eivsparse
