#pragma once

#include "biphoton/detection.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/linalg.hpp"
#include "biphoton/mimicry.hpp"
#include "biphoton/modes.hpp"
#include "biphoton/objects.hpp"
#include "biphoton/random.hpp"
#include "biphoton/scenario.hpp"
#include "biphoton/states.hpp"
#include "biphoton/verify.hpp"
