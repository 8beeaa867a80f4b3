#pragma once

// umbrella header

#include "lrinorm/profile.hpp"
#include "lrinorm/norms.hpp"
#include "lrinorm/candidates.hpp"
#include "lrinorm/vec_prox.hpp"
#include "lrinorm/mat_prox.hpp"
#include "lrinorm/oracle.hpp"
#include "lrinorm/solvers.hpp"
#include "lrinorm/rng.hpp"
#include "lrinorm/io.hpp"
#include "lrinorm/selftest.hpp"
