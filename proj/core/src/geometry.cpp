#include "macsort/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "macsort/errors.hpp"

namespace macsort {

Xysr bbox_to_xysr(const BBox& b) { return {b.u, b.v, b.w * b.h, b.w / b.h}; }

BBox xysr_to_bbox(const Xysr& z) {
  if (!(z.s > 0.0) || !(z.r > 0.0)) {
    throw Error(ErrorCode::InvalidState,
                "non-physical box state s=" + std::to_string(z.s) + " r=" + std::to_string(z.r));
  }
  return {z.u, z.v, std::sqrt(z.s * z.r), std::sqrt(z.s / z.r)};
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a.right() - a.left()) * (a.bottom() - a.top());
  const double area_b = (b.right() - b.left()) * (b.bottom() - b.top());
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double Embedding::norm() const { return std::sqrt(dot(values_, values_)); }

bool Embedding::degenerate() const { return norm() < kDegenerateNorm; }

Embedding Embedding::normalized() const {
  const double n = norm();
  if (n < kDegenerateNorm) return *this;
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [n](double x) { return x / n; });
  return Embedding(std::move(out));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding dimensions " + std::to_string(a.dim()) +
                                                  " and " + std::to_string(b.dim()) + " differ");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDegenerateNorm || nb < kDegenerateNorm) {
    throw Error(ErrorCode::DegenerateEmbedding, "zero-norm embedding in cosine similarity");
  }
  return std::clamp(dot(a.values(), b.values()) / (na * nb), -1.0, 1.0);
}

double cosine_or_zero(const Embedding& a, const Embedding& b) {
  try {
    return cosine_similarity(a, b);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateEmbedding) return 0.0;
    throw;
  }
}

}  // namespace macsort
