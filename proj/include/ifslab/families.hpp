#pragma once

#include "ifslab/ifs.hpp"

namespace ifslab {

/// Canned systems used throughout the test suite and the shipped configs.

/// Two maps x/3 and x/3 + 2/3 on [0,1]; attractor is the middle-thirds set.
IfsFamily make_cantor();

/// Three half-scale maps toward (0,0), (1,0), (1/2, sqrt(3)/2) on the
/// bounding box of that triangle.
IfsFamily make_sierpinski();

/// Single map x/2 on [0,1].
IfsFamily make_halving();

/// Single map x/(1+x) on [0,1]; contracts but with derivative 1 at 0.
IfsFamily make_edalat();

/// Box-parameter family w_lambda(x) = (x + lambda)/2, lambda in [0,1].
IfsFamily make_blend(double net_spacing = 1.0 / 64.0);

/// Single identity map on [0,1]^dim; every diameter stays put. Control case.
IfsFamily make_identity(int dim);

}  // namespace ifslab
