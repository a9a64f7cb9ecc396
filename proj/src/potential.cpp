#include "kgl/potential.hpp"

#include <cmath>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {

namespace {

void require(bool ok, const char *field, const char *msg) {
  if (!ok) throw ConfigError(field, msg);
}

// Upper bound on how many points can sit within distance R of a point while
// keeping mutual distances >= core: balls of radius core/2 packed in a ball
// of radius R + core/2.
double packing_neighbours(int dim, double R, double core) {
  return std::pow(2.0 * R / core + 1.0, dim) - 1.0;
}

} // namespace

PairPotential PairPotential::zero() { return {}; }

PairPotential PairPotential::square_well(double J, double R) {
  require(J >= 0.0 && std::isfinite(J), "potential.J", "square_well requires finite J >= 0");
  require(R > 0.0 && std::isfinite(R), "potential.R", "range must be positive");
  PairPotential p;
  p.kind_ = PotentialKind::square_well;
  p.J_ = J;
  p.range_ = R;
  return p;
}

PairPotential PairPotential::triangle(double J, double R) {
  require(J >= 0.0 && std::isfinite(J), "potential.J", "triangle requires finite J >= 0");
  require(R > 0.0 && std::isfinite(R), "potential.R", "range must be positive");
  PairPotential p;
  p.kind_ = PotentialKind::triangle;
  p.J_ = J;
  p.range_ = R;
  return p;
}

PairPotential PairPotential::hardcore_square_well(double r_hc, double J, double R) {
  require(r_hc > 0.0, "potential.r_hc", "hard-core diameter must be positive");
  require(R >= r_hc && std::isfinite(R), "potential.R", "range must be >= hard-core diameter");
  require(std::isfinite(J), "potential.J", "J must be finite");
  PairPotential p;
  p.kind_ = PotentialKind::hardcore_square_well;
  p.J_ = J;
  p.range_ = R;
  p.r_hc_ = r_hc;
  return p;
}

PairPotential PairPotential::lennard_jones(double sigma, double eps_lj, double R) {
  require(sigma > 0.0, "potential.sigma", "sigma must be positive");
  require(eps_lj > 0.0 && std::isfinite(eps_lj), "potential.eps_lj", "eps_lj must be positive");
  require(R > sigma && std::isfinite(R), "potential.R", "cutoff must exceed sigma");
  PairPotential p;
  p.kind_ = PotentialKind::lennard_jones;
  p.J_ = eps_lj;
  p.range_ = R;
  p.sigma_ = sigma;
  return p;
}

double PairPotential::at(double r) const {
  switch (kind_) {
  case PotentialKind::zero:
    return 0.0;
  case PotentialKind::square_well:
    return r < range_ ? J_ : 0.0;
  case PotentialKind::triangle:
    return r < range_ ? J_ * (1.0 - r / range_) : 0.0;
  case PotentialKind::hardcore_square_well:
    if (r < r_hc_) return kInfiniteEnergy;
    return r < range_ ? J_ : 0.0;
  case PotentialKind::lennard_jones: {
    if (r >= range_) return 0.0;
    if (r <= 0.0) return kInfiniteEnergy;
    double s6 = std::pow(sigma_ / r, 6);
    double v = 4.0 * J_ * (s6 * s6 - s6);
    return std::isfinite(v) ? v : kInfiniteEnergy;
  }
  }
  return 0.0;
}

bool PairPotential::positive() const {
  switch (kind_) {
  case PotentialKind::zero:
  case PotentialKind::square_well:
  case PotentialKind::triangle:
    return true;
  case PotentialKind::hardcore_square_well:
    return J_ >= 0.0;
  case PotentialKind::lennard_jones:
    return false;
  }
  return false;
}

double PairPotential::stability_constant(int dim) const {
  switch (kind_) {
  case PotentialKind::hardcore_square_well:
    if (J_ >= 0.0) return 0.0;
    return 0.5 * (-J_) * packing_neighbours(dim, range_, r_hc_);
  case PotentialKind::lennard_jones:
    return 0.5 * J_ * packing_neighbours(dim, range_, sigma_);
  default:
    return 0.0;
  }
}

std::vector<double> PairPotential::breakpoints() const {
  switch (kind_) {
  case PotentialKind::zero:
    return {};
  case PotentialKind::square_well:
    return {range_};
  case PotentialKind::triangle:
    return {0.0, range_};
  case PotentialKind::hardcore_square_well:
    return {r_hc_, range_};
  case PotentialKind::lennard_jones:
    return {0.0, sigma_, range_};
  }
  return {};
}

std::string PairPotential::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
  case PotentialKind::zero:
    os << "zero";
    break;
  case PotentialKind::square_well:
    os << "square_well{J=" << J_ << ",R=" << range_ << "}";
    break;
  case PotentialKind::triangle:
    os << "triangle{J=" << J_ << ",R=" << range_ << "}";
    break;
  case PotentialKind::hardcore_square_well:
    os << "hardcore_square_well{r_hc=" << r_hc_ << ",J=" << J_ << ",R=" << range_ << "}";
    break;
  case PotentialKind::lennard_jones:
    os << "lennard_jones{sigma=" << sigma_ << ",eps_lj=" << J_ << ",R=" << range_ << "}";
    break;
  }
  return os.str();
}

} // namespace kgl
