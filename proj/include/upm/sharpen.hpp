#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "upm/contrast.hpp"
#include "upm/density.hpp"

namespace upm {

struct SharpenResult {
  std::vector<double> samples;
  std::size_t proposals = 0;
  double acceptance_rate = 0.0;
  double envelope = 0.0;
};

// Accept/reject refinement of weak samples: draw y* uniformly from the weak set
// and keep it when d(F(y*)) > U * M, with F the weak mid-distribution.
class Sharpener {
 public:
  static constexpr int kGridPoints = 2001;
  static constexpr double kEnvelopeInflation = 1.01;

  Sharpener(std::span<const double> weak, std::function<double(double)> contrast, std::uint64_t seed);
  Sharpener(std::span<const double> weak, const UnitContrast& contrast, std::uint64_t seed);

  double envelope() const noexcept { return envelope_; }
  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t proposed() const noexcept { return proposed_; }
  double acceptance_rate() const noexcept;
  // Mid-distribution value of the weak sample at y (step lookup).
  double weak_mid(double y) const;
  const std::vector<double>& weak() const noexcept { return weak_; }

  SharpenResult draw(std::size_t s);

 private:
  std::vector<double> weak_;
  std::vector<double> mid_;  // per weak observation
  std::function<double(double)> contrast_;
  double envelope_ = 0.0;
  std::mt19937_64 rng_;
  std::size_t accepted_ = 0;
  std::size_t proposed_ = 0;
};

SharpenResult d_sharpen(std::span<const double> weak, const std::function<double(double)>& contrast,
                        std::size_t s, std::uint64_t seed);

// LP coefficients of a fitted conditional law relative to the weak sample:
// c_j = E_f[T_j(Y; F_weak)], exact for the weak step basis.
std::vector<double> contrast_relative_to_weak(const ConditionalDensity& target, std::span<const double> weak, int m);

}  // namespace upm
