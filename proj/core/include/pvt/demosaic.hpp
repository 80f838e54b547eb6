#pragma once

#include <string_view>

#include "pvt/dofp.hpp"

namespace pvt {

inline constexpr std::string_view kInitMethodTag = "stride2-bilinear-bayer";
inline constexpr std::string_view kDemosaicFullMethodTag = "catmull-rom-pseudo-inverse";

/// Half-resolution initialization: every direction's stride-2 sub-lattice forms a Bayer
/// mosaic of size H/2 x W/2, which is demosaicked bilinearly (normalized convolution, so
/// borders stay unbiased). Output is 4 x 3 x H/2 x W/2; direction planes never mix.
/// Throws DomainError for layouts whose directions do not form stride-2 lattices.
PolarFrame initialize_lr(const MosaicFrame& y);

/// Full-resolution classical baseline; identical to pseudo_inverse.
PolarFrame demosaic_full(const MosaicFrame& y);

}  // namespace pvt
