#include "cdnet/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cdnet {
namespace {

// Absorbs representation error when the bound lands on an exact integer.
constexpr double kFloorSlack = 1e-9;

double werner(double f) { return (4.0 * f - 1.0) / 3.0; }

}  // namespace

double decay(double fidelity, double dt, double coherence_time) {
  return 0.25 + (fidelity - 0.25) * std::exp(-dt / coherence_time);
}

double swap_fidelity(double f1, double f2) {
  return f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0;
}

double link_fidelity(double f_new, int segments, double birth_sum, double now,
                     double coherence_time) {
  const double log_x = segments * std::log(werner(f_new)) -
                       (segments * now - birth_sum) / coherence_time;
  return 0.25 + 0.75 * std::exp(log_x);
}

double cutoff_log_argument(double f_new, double f_min, int max_swap_distance) {
  // ln(3/(4F_new-1)) + ln((4F_min-1)/3)/M
  return -std::log(werner(f_new)) + std::log(werner(f_min)) / max_swap_distance;
}

bool feasible(double f_new, double f_min, int max_swap_distance) {
  return cutoff_log_argument(f_new, f_min, max_swap_distance) < 0.0;
}

double cutoff_bound(double coherence_time, double f_new, double f_min,
                    int max_swap_distance) {
  return -coherence_time * cutoff_log_argument(f_new, f_min, max_swap_distance);
}

bool satisfies_cutoff_relation(double coherence_time, int cutoff, double f_new,
                               double f_min, int max_swap_distance) {
  return cutoff <= cutoff_bound(coherence_time, f_new, f_min, max_swap_distance) + kFloorSlack;
}

int max_cutoff(double coherence_time, double f_new, double f_min,
               int max_swap_distance) {
  if (!feasible(f_new, f_min, max_swap_distance)) {
    throw std::domain_error(
        "no positive cutoff: (3/(4F_new-1))*((4F_min-1)/3)^(1/M) >= 1");
  }
  const double bound = cutoff_bound(coherence_time, f_new, f_min, max_swap_distance);
  const double t_cut = std::floor(bound + kFloorSlack);
  if (t_cut < 1.0) {
    throw std::domain_error("cutoff bound " + std::to_string(bound) +
                            " is below one time step");
  }
  return static_cast<int>(std::min<double>(t_cut, std::numeric_limits<int>::max()));
}

int max_swap_distance(double coherence_time, int cutoff, double f_new, double f_min) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  // t_cut <= -T (ln(1/x_new) + ln(x_min)/M)  <=>  ln(x_min)/M <= c
  const double c = std::log(werner(f_new)) - cutoff / coherence_time;
  const double log_min = std::log(werner(f_min));
  if (!(c < 0.0) || !(log_min < 0.0)) {
    throw std::domain_error("maximum swap distance is unbounded for these parameters");
  }
  const double m = std::floor(log_min / c + kFloorSlack);
  if (m < 1.0) {
    throw std::domain_error("cutoff relation fails even for M = 1");
  }
  return static_cast<int>(std::min<double>(m, std::numeric_limits<int>::max()));
}

void validate(const HardwareParams& hw) {
  if (!(hw.p_gen >= 0.0 && hw.p_gen <= 1.0)) throw std::invalid_argument("p_gen must be in [0, 1]");
  if (!(hw.p_swap >= 0.0 && hw.p_swap <= 1.0)) throw std::invalid_argument("p_swap must be in [0, 1]");
  if (!(hw.coherence_time > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(hw.f_new > 0.25 && hw.f_new <= 1.0)) throw std::invalid_argument("F_new must be in (1/4, 1]");
}

void validate(const PolicyParams& policy) {
  if (policy.cutoff < 1) throw std::invalid_argument("t_cut must be >= 1");
  if (policy.max_swap_distance < 1) throw std::invalid_argument("M must be >= 1");
  if (!(policy.f_min >= 0.5 && policy.f_min < 1.0)) throw std::invalid_argument("F_min must be in [1/2, 1)");
  if (!(policy.q >= 0.0 && policy.q <= 1.0)) throw std::invalid_argument("q must be in [0, 1]");
}

}  // namespace cdnet
