#pragma once

#include "zdet/bounds.hpp"
#include "zdet/cra.hpp"
#include "zdet/determinant.hpp"
#include "zdet/dixon.hpp"
#include "zdet/generators.hpp"
#include "zdet/int_matrix.hpp"
#include "zdet/lif.hpp"
#include "zdet/mcverify.hpp"
#include "zdet/modfield.hpp"
#include "zdet/oracles.hpp"
#include "zdet/rng.hpp"
#include "zdet/stopwatch.hpp"
#include "zdet/trailing.hpp"
