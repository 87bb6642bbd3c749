// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_CEDONUT_HPP
#define CEDONUT_CEDONUT_HPP

#include "cedonut/alphabets.hpp"
#include "cedonut/capacity.hpp"
#include "cedonut/csv.hpp"
#include "cedonut/doughnut.hpp"
#include "cedonut/error.hpp"
#include "cedonut/experiments.hpp"
#include "cedonut/fading.hpp"
#include "cedonut/numeric.hpp"
#include "cedonut/parallel.hpp"
#include "cedonut/phases.hpp"
#include "cedonut/precoder.hpp"
#include "cedonut/rng.hpp"

#endif // CEDONUT_CEDONUT_HPP
