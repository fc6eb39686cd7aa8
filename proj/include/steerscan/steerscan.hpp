#pragma once

// Core library. Serialization lives in steerscan/io.hpp (needs nlohmann/json).

#include "steerscan/basis.hpp"
#include "steerscan/bloch.hpp"
#include "steerscan/criterion.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/families.hpp"
#include "steerscan/optimize.hpp"
#include "steerscan/simplex.hpp"
