#pragma once
// Umbrella header.

#include "klest/dist.hpp"
#include "klest/divergences.hpp"
#include "klest/estimators.hpp"
#include "klest/adversarial.hpp"
#include "klest/harness.hpp"
#include "klest/enumerate.hpp"
