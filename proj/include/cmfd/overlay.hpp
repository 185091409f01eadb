#pragma once

#include <string>
#include <vector>

#include "cmfd/gray_image.hpp"
#include "cmfd/image_io.hpp"
#include "cmfd/matcher.hpp"

namespace cmfd {

// Renders the image with a line per match pair and distinct endpoint
// colors for the two sides.
RgbImage render_match_overlay(const GrayImage& img, const std::vector<MatchPair>& pairs);

void write_match_overlay(const GrayImage& img, const std::vector<MatchPair>& pairs,
                         const std::string& path);

}  // namespace cmfd
