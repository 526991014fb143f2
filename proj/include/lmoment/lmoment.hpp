#pragma once

#include "lmoment/arith.hpp"
#include "lmoment/characters.hpp"
#include "lmoment/coefficients.hpp"
#include "lmoment/contour.hpp"
#include "lmoment/identity_lab.hpp"
#include "lmoment/io.hpp"
#include "lmoment/lvalues.hpp"
#include "lmoment/moments.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/special_functions.hpp"
#include "lmoment/voronoi.hpp"
