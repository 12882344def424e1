#pragma once

#include <optional>
#include <vector>

#include "biholder/logdomain.hpp"

namespace biholder {

struct ScheduleParams {
  int n = 0;           // target capacity-dimension bound
  double q = 1.0;      // measure exponent, q > n
  double sigma = 0.5;  // Lebesgue fraction, in (0,1)
  int N = 2;           // doubling constant
  bool relaxed = false;
};

// Derived quantities shared by every scale recurrence. Scales live in log2;
// linear twins are present only when representable.
struct ScheduleConstants {
  double L = 0.0;
  double logB1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;
  double Q = 0.0;
  double logC = 0.0;
  double logLambda = 0.0;
  std::optional<double> B1, C, lambda;
};

struct ScaleSchedule {
  ScheduleParams params;
  ScheduleConstants constants;
  int stages = 0;
  std::vector<double> logEps;    // indices 0..stages+1
  std::vector<double> logDelta;  // indices 0..stages
  std::vector<double> logEta;    // indices 0..stages
  std::optional<double> userL;   // relaxed mode inputs
  std::optional<double> ratio;

  std::optional<double> eps(int i) const { return linear_of_log2(logEps.at(i)); }
  std::optional<double> delta(int i) const { return linear_of_log2(logDelta.at(i)); }
  std::optional<double> eta(int i) const { return linear_of_log2(logEta.at(i)); }
};

// Worst deviations over all stages; relative errors for equalities, most
// negative slack for inequalities (0 when satisfied everywhere).
struct ScheduleIdentityReport {
  double closedVsDirect = 0.0;   // recurrence vs direct form of the next scale
  double telescoped = 0.0;       // delta_i vs L^{-i} eps_i
  double unitProductGap = 0.0;   // |eps_1 * C - 1|
  double ratioLSlack = 0.0;      // eps_{i+1}/eps_i <= 1/L
  double ratioRootSlack = 0.0;   // eps_{i+1}/eps_i <= 1/(8 sqrt(2(n+1)))
  double growthSlack = 0.0;      // eps_i <= L^{-i}
  double couplingSlack = 0.0;    // eps_i <= (C eps_{i+1})^{1/(2Q)}
  double etaCoupling = 0.0;      // eta_i vs 8 eps_{i+1}
  bool pass(double tol = 1e-12) const;
};

ScheduleConstants compute_constants(const ScheduleParams& params);

// Smallest doubling power N_floor * 2^j meeting the feasibility conditions.
int choose_N(int n, double q, double sigma, int N_floor);

double next_epsilon(const ScheduleConstants& c, int i, double logEpsI);
double next_epsilon_direct(const ScheduleParams& params, double logDeltaI);
double next_delta(const ScheduleConstants& c, double logDeltaI, double logEpsI,
                  double logEpsNext);

ScaleSchedule exact_schedule(ScheduleParams params, int stages);
ScaleSchedule relaxed_schedule(ScheduleParams params, double userL, double ratio,
                               int stages, double deltaMax = 1.0);

ScheduleIdentityReport check_schedule_identities(const ScaleSchedule& s);

}  // namespace biholder
