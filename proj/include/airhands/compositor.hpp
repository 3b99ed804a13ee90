#pragma once

#include "airhands/frame.hpp"
#include "airhands/skinseg.hpp"

namespace airhands {

/// Hard binary overlay: hand pixel where the mask is set, scene pixel
/// elsewhere. The result is a COMPOSITE frame carrying the scene's seq and
/// capture timestamp. Throws DimensionError unless all three shapes agree.
RawFrame composite(const RawFrame& scene, const RawFrame& hand, const skin::Mask& mask);

}  // namespace airhands
