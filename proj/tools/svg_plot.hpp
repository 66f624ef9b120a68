#pragma once

#include <string>
#include <utility>
#include <vector>

namespace parvar::cli {

/// Static scatter plot of 2-D points with labelled axes. Metadata lines go
/// into a leading XML comment.
std::string scatter_svg(const std::vector<std::pair<double, double>>& points, const std::string& x_label,
                        const std::string& y_label, const std::vector<std::string>& metadata);

} // namespace parvar::cli
