#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace macsort {

/// Axis-aligned box in center form. Width and height are strictly positive.
struct BBox {
  double u = 0.0;  ///< horizontal center
  double v = 0.0;  ///< vertical center
  double w = 1.0;
  double h = 1.0;

  static BBox from_ltwh(double left, double top, double width, double height) {
    return {left + width / 2.0, top + height / 2.0, width, height};
  }

  double left() const { return u - w / 2.0; }
  double top() const { return v - h / 2.0; }
  double right() const { return u + w / 2.0; }
  double bottom() const { return v + h / 2.0; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Scale/aspect form used by the Kalman state: s = w*h, r = w/h.
struct Xysr {
  double u = 0.0;
  double v = 0.0;
  double s = 1.0;
  double r = 1.0;
};

Xysr bbox_to_xysr(const BBox& b);

/// Throws InvalidState when s or r is not strictly positive.
BBox xysr_to_bbox(const Xysr& z);

/// Intersection over union; 0 for touching or disjoint boxes.
double iou(const BBox& a, const BBox& b);

/// Appearance feature vector. All embeddings within one run share a dimension.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
  Embedding(std::initializer_list<double> values) : values_(values) {}

  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double norm() const;
  /// Below this norm an embedding is degenerate.
  bool degenerate() const;
  /// Unit-length copy; degenerate embeddings are returned unchanged.
  Embedding normalized() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

inline constexpr double kDegenerateNorm = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);

/// Cosine of the angle between two embeddings.
/// Throws DimensionMismatch on unequal dimensions and DegenerateEmbedding when
/// either norm is below kDegenerateNorm.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// cosine_similarity with degenerate inputs mapped to 0.
double cosine_or_zero(const Embedding& a, const Embedding& b);

struct Detection {
  int frame = 0;
  BBox bbox;
  double confidence = 1.0;
  Embedding embedding;
};

}  // namespace macsort
