#ifndef LCE_LCE_HPP
#define LCE_LCE_HPP

#include "lce/error.hpp"
#include "lce/numeric.hpp"
#include "lce/lattice.hpp"
#include "lce/fft.hpp"
#include "lce/convolution.hpp"
#include "lce/simplex.hpp"
#include "lce/convexity.hpp"
#include "lce/moments.hpp"
#include "lce/density.hpp"
#include "lce/geometry.hpp"
#include "lce/bridge.hpp"
#include "lce/smoothing.hpp"
#include "lce/io.hpp"
#include "lce/harness.hpp"

#endif // LCE_LCE_HPP
