#pragma once

namespace cdnet {

/// Fidelity of a Werner state with respect to |phi+>, in [1/4, 1].
/// Stored as the Werner parameter x = (4F - 1) / 3, which multiplies under
/// swaps and decays exponentially in time.
class WernerFidelity {
 public:
  static WernerFidelity from_fidelity(double f) noexcept { return WernerFidelity((4.0 * f - 1.0) / 3.0); }
  static WernerFidelity from_parameter(double x) noexcept { return WernerFidelity(x); }

  double fidelity() const noexcept { return 0.25 + 0.75 * x_; }
  double parameter() const noexcept { return x_; }

 private:
  explicit WernerFidelity(double x) noexcept : x_(x) {}
  double x_;
};

struct HardwareParams {
  double p_gen = 1.0;
  double p_swap = 1.0;
  double coherence_time = 50.0;  // T, in time steps
  double f_new = 0.9;
};

struct PolicyParams {
  int cutoff = 11;         // t_cut
  int max_swap_distance = 3;  // M
  double f_min = 0.5;
  double q = 0.0;          // swap attempt probability
};

/// Fidelity after dt time steps of depolarizing decay with coherence time T.
double decay(double fidelity, double dt, double coherence_time);

/// Fidelity of the link produced by swapping two Werner links.
double swap_fidelity(double f1, double f2);

/// Closed-form fidelity of a link made of `segments` elementary links with
/// summed birth times `birth_sum`, observed at time `now`.
double link_fidelity(double f_new, int segments, double birth_sum, double now,
                     double coherence_time);

/// Argument of the logarithm in the cutoff relation,
/// (3 / (4 F_new - 1)) * ((4 F_min - 1) / 3)^(1/M), evaluated in log space.
double cutoff_log_argument(double f_new, double f_min, int max_swap_distance);

/// True iff a positive cutoff exists for (F_new, F_min, M).
bool feasible(double f_new, double f_min, int max_swap_distance);

/// Right-hand side of the cutoff relation, -T ln(argument), before flooring.
double cutoff_bound(double coherence_time, double f_new, double f_min,
                    int max_swap_distance);

/// True iff (T, t_cut, F_new, F_min, M) satisfy the cutoff relation.
bool satisfies_cutoff_relation(double coherence_time, int cutoff, double f_new,
                               double f_min, int max_swap_distance);

/// Largest integer cutoff allowed by the relation. Throws
/// std::domain_error when infeasible or when the result would be < 1.
int max_cutoff(double coherence_time, double f_new, double f_min,
               int max_swap_distance);

/// Largest M >= 1 allowed by the relation at the given cutoff. Throws
/// std::domain_error when even M = 1 violates it.
int max_swap_distance(double coherence_time, int cutoff, double f_new, double f_min);

/// Throws std::invalid_argument when a field is outside its range.
void validate(const HardwareParams& hw);
void validate(const PolicyParams& policy);

}  // namespace cdnet
