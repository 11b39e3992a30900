#pragma once

#include "polyvol/analytics.hpp"
#include "polyvol/core.hpp"
#include "polyvol/exact.hpp"
#include "polyvol/expression.hpp"
#include "polyvol/generators.hpp"
#include "polyvol/inner_ball.hpp"
#include "polyvol/io.hpp"
#include "polyvol/lp.hpp"
#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/transforms.hpp"
#include "polyvol/truncated.hpp"
#include "polyvol/volume.hpp"
#include "polyvol/walks.hpp"
