#pragma once

#include "modval/error.hpp"
#include "modval/linalg.hpp"
#include "modval/phases.hpp"
#include "modval/pointer.hpp"
#include "modval/rng.hpp"
#include "modval/stokes.hpp"
#include "modval/values.hpp"
