#include "nipocpec/iterate.hpp"

namespace nipocpec {

StageVector::StageVector(const Dimensions& dims, Vec data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.total()) throw DimensionError("stage vector: length mismatch");
}

StageVector& StageVector::operator+=(const StageVector& other) {
  if (other.data_.size() != data_.size()) throw DimensionError("stage vector: length mismatch");
  data_ += other.data_;
  return *this;
}

Iterate step(const Iterate& y, const StageVector& direction, double alpha) {
  if (direction.data().size() != y.data().size()) {
    throw DimensionError("step: direction length mismatch");
  }
  return Iterate(y.dims(), y.data() + alpha * direction.data());
}

}  // namespace nipocpec
