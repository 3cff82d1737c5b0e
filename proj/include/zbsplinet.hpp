#pragma once

#include "zbsplinet/bayes_clr.hpp"
#include "zbsplinet/bspline.hpp"
#include "zbsplinet/error.hpp"
#include "zbsplinet/inner_product.hpp"
#include "zbsplinet/knots.hpp"
#include "zbsplinet/orthogonalize.hpp"
#include "zbsplinet/quadrature.hpp"
#include "zbsplinet/sfpca.hpp"
#include "zbsplinet/smoothing.hpp"
#include "zbsplinet/spline.hpp"
#include "zbsplinet/zb_basis.hpp"
