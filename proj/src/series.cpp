#include "polichange/series.hpp"

#include <cmath>

#include "polichange/errors.hpp"

namespace polichange {

void CategoryMatrix::validate() const {
  if (values.size() != categories.size())
    throw ArgumentError("matrix: one value row required per category");
  if (values.empty() || values.front().empty()) throw ArgumentError("matrix: no data");
  const std::size_t t = values.front().size();
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c].size() != t) throw ArgumentError("matrix: ragged rows");
    for (const double v : values[c]) {
      if (!std::isfinite(v)) throw ArgumentError("matrix: non-finite entry");
      if (kind == MatrixKind::counts && (v < 0.0 || v != std::floor(v)))
        throw ArgumentError("matrix: count entries must be nonnegative integers");
      if (kind == MatrixKind::shares && (v < 0.0 || v > 100.0))
        throw ArgumentError("matrix: share entries must lie in [0, 100]");
    }
  }
}

}  // namespace polichange
