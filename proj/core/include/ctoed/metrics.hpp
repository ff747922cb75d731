#pragma once

#include "ctoed/grid.hpp"

namespace ctoed {

/// PSNR cap returned when the estimate matches the reference exactly
/// (mse = 0 would otherwise be a division by zero).
constexpr double kPsnrCap = 300.0;

struct QualityScore {
    double psnr = 0.0;  // decibels
    double mse = 0.0;
    double peak = 0.0;  // max of the reference
};

/// psnr = 10 log10(peak^2 / mse) with peak = max(reference).
QualityScore psnr(const Image& estimate, const Image& reference);

}  // namespace ctoed
