#include "deltagreen/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "deltagreen/errors.hpp"

namespace deltagreen {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ContinuumEvaluation: return "ContinuumEvaluation";
    case ErrorCode::PoleWindow: return "PoleWindow";
    case ErrorCode::TailEstimate: return "TailEstimate";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::NearEigenvalue: return "NearEigenvalue";
    case ErrorCode::ImpurityOutsideDomain: return "ImpurityOutsideDomain";
  }
  return "Unknown";
}

double KernelOptions::pole_half_width(double pole) const {
  return std::max(pole_window_rel * std::abs(pole), pole_window_abs);
}

BaseSystem::BaseSystem(BaseKind kind, KernelOptions options)
    : kind_(std::move(kind)), options_(options) {
  if (const auto* box = std::get_if<Box>(&kind_))
    require(std::isfinite(box->length) && box->length > 0.0, "box length must be positive");
  if (const auto* ho = std::get_if<HarmonicOscillator>(&kind_))
    require(ho->nmax >= 1, "oscillator nmax must be >= 1");
  require(options_.pole_window_rel >= 0.0 && options_.pole_window_abs > 0.0,
          "pole window must be positive");
  require(options_.ho_subtractions >= 0 && options_.ho_subtractions <= 8,
          "ho_subtractions must be in [0, 8]");
  require(options_.ho_reference_energy <= 0.9, "oscillator reference energy must lie below 0.9");
  require(options_.ho_window > 0.0, "oscillator window must be positive");
}

BaseSystem BaseSystem::free_line(KernelOptions options) { return BaseSystem(FreeLine{}, options); }

BaseSystem BaseSystem::box(double length, KernelOptions options) {
  return BaseSystem(Box{length}, options);
}

BaseSystem BaseSystem::harmonic_oscillator(int nmax, KernelOptions options) {
  return BaseSystem(HarmonicOscillator{nmax}, options);
}

bool BaseSystem::contains(double x) const {
  if (!std::isfinite(x)) return false;
  if (const auto* box = std::get_if<Box>(&kind_)) return x >= 0.0 && x <= box->length;
  if (is_oscillator()) return std::abs(x) <= options_.ho_window;
  return true;
}

bool BaseSystem::contains_impurity(double x) const {
  if (const auto* box = std::get_if<Box>(&kind_)) return x > 0.0 && x < box->length;
  return contains(x);
}

std::string BaseSystem::name() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* box = std::get_if<Box>(&kind_))
    os << "box(L=" << box->length << ")";
  else if (const auto* ho = std::get_if<HarmonicOscillator>(&kind_))
    os << "harmonic_oscillator(nmax=" << ho->nmax << ")";
  else
    os << "free_line";
  return os.str();
}

void DecoratedSystem::validate() const {
  for (std::size_t j = 0; j < impurities.size(); ++j) {
    const Impurity& imp = impurities[j];
    require(std::isfinite(imp.strength), "impurity " + std::to_string(j) + ": strength not finite");
    if (!base.contains_impurity(imp.position))
      fail(ErrorCode::ImpurityOutsideDomain,
           "impurity " + std::to_string(j) + " at " + std::to_string(imp.position) +
               " lies outside the domain of " + base.name());
  }
}

}  // namespace deltagreen
