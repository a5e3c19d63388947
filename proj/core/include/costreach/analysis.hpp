#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "costreach/grid.hpp"

namespace costreach {

/// Dimensions held fixed when slicing, as {dimension index -> value}.
using SliceSpec = std::map<int, double>;

/// Sub-level-set boundary at one threshold on a 2-D slice.
struct LevelSetContour {
  double threshold = 0.0;
  SliceSpec slice;
  std::vector<std::vector<std::array<double, 2>>> polylines;
};

/// Sub-level membership: interpolated value <= threshold (closed sets).
bool member(const ValueField& field, const Vec& s, double threshold,
            OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

/// 2-D field sampled from the full field on the plane where `fixed` pins all
/// but two dimensions. Fixing zero dimensions of a 2-D field copies it.
ValueField slice(const ValueField& field, const SliceSpec& fixed,
                 OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

/// Marching-squares isocontour of a 2-D field. Crossing positions are linear
/// along cell edges; saddle cells are resolved by comparing the cell-center
/// average against the threshold. Returns an empty polyline list when the
/// threshold misses the field's value range.
LevelSetContour extract_contours(const ValueField& slice_field, double threshold,
                                 SliceSpec slice_desc = {});

/// Node-wise sub-level mask (value <= threshold), same node order as the field.
MaskField mask(const ValueField& field, double threshold);

std::string to_json(const LevelSetContour& contour);
std::string to_csv(const LevelSetContour& contour);  // x,y,polyline_id

}  // namespace costreach
