#include "nipocpec/types.hpp"

#include <cmath>

#include "nipocpec/scholtes.hpp"

namespace nipocpec {

void Dimensions::validate() const {
  if (nx < 0 || ntau < 0 || np < 0 || nw < 0 || nsigma < 0 || neta < 0 || ngamma < 0) {
    throw DimensionError("dimensions: counts must be nonnegative");
  }
  if (nw != np) throw DimensionError("dimensions: nw must equal np");
  if (N < 1) throw DimensionError("dimensions: N must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DimensionError("dimensions: dt must be positive");
}

void BoundData::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("bounds: l and u differ in length");
  for (int i = 0; i < size(); ++i) {
    if (std::isnan(lower(i)) || std::isnan(upper(i)) || lower(i) == kInf || upper(i) == -kInf) {
      throw std::invalid_argument("bounds: invalid entry at component " + std::to_string(i));
    }
    if (!(lower(i) < upper(i))) {
      throw std::invalid_argument("bounds: l < u violated at component " + std::to_string(i));
    }
  }
}

}  // namespace nipocpec
