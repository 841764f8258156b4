#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pfwi/grid.hpp"

namespace pfwi {

/// Fixed field slots; memory fields follow at kThetaBase.
enum Field : std::size_t { kV1 = 0, kV3, kQ1, kQ3, kTau11, kTau33, kTau13, kNegP, kThetaBase };

inline constexpr std::size_t kTransportFields = 8;

NodeSet field_nodes(std::size_t field, std::size_t n1);
std::string field_name(std::size_t field, std::size_t n1);

/// Augmented state W = (v1, v3, q1, q3, tau11, tau33, tau13, -p, Theta^1, Theta^3),
/// field-major, each field nx*nz with node (i, j) at j*nx + i.
class Wavefield {
 public:
  Wavefield() = default;
  Wavefield(const Grid2D& g, std::size_t n1, std::size_t n3)
      : grid_(g), n1_(n1), n3_(n3), data_((kThetaBase + n1 + n3) * g.size(), 0.0) {}

  const Grid2D& grid() const { return grid_; }
  std::size_t n1() const { return n1_; }
  std::size_t n3() const { return n3_; }
  std::size_t n_fields() const { return kThetaBase + n1_ + n3_; }
  std::size_t nodes() const { return grid_.size(); }

  std::size_t theta1(std::size_t k) const { return kThetaBase + k; }
  std::size_t theta3(std::size_t k) const { return kThetaBase + n1_ + k; }

  std::span<double> field(std::size_t f) { return {data_.data() + f * nodes(), nodes()}; }
  std::span<const double> field(std::size_t f) const { return {data_.data() + f * nodes(), nodes()}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  double* ptr() { return data_.data(); }
  const double* ptr() const { return data_.data(); }

  double time = 0.0;

 private:
  Grid2D grid_;
  std::size_t n1_ = 0;
  std::size_t n3_ = 0;
  std::vector<double> data_;
};

}  // namespace pfwi
