#include "biholder/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biholder {

namespace {

void validate(const ScheduleParams& p) {
  if (p.n < 0) throw std::invalid_argument("n must be >= 0");
  if (!(p.q > p.n)) throw std::invalid_argument("q must exceed n");
  if (!(p.sigma > 0.0 && p.sigma < 1.0))
    throw std::invalid_argument("sigma must lie in (0,1)");
  if (p.N < 2) throw std::invalid_argument("N must be >= 2");
}

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool ScheduleIdentityReport::pass(double tol) const {
  return closedVsDirect <= tol && telescoped <= tol && unitProductGap <= tol &&
         ratioLSlack >= -tol && ratioRootSlack >= -tol && growthSlack >= -tol &&
         couplingSlack >= -tol && etaCoupling <= tol;
}

ScheduleConstants compute_constants(const ScheduleParams& p) {
  validate(p);
  ScheduleConstants c;
  double np1 = static_cast<double>(p.n + 1);
  c.L = 128.0 * np1 * np1 / (p.sigma * p.sigma);
  double gap = p.q - p.n;
  c.logB1 = p.n == 0 ? 0.0 : (p.n / gap) * std::log2(8.0 * std::sqrt(p.n));
  c.B2 = ((p.n + 2) / gap) * std::log2(2.0 / p.sigma);
  c.B3 = ((p.n + 2) / gap) * std::log2(c.L);
  double logN = std::log2(static_cast<double>(p.N));
  c.Q = ((p.n + 2) / gap) * logN;
  c.logC = 3.0 + c.logB1 + c.B2 * logN;
  c.logLambda = std::max(std::log2(4.5) + c.logC / (2.0 * c.Q),
                         0.5 * std::log2(8.0 * np1) + c.logC);
  c.B1 = linear_of_log2(c.logB1);
  c.C = linear_of_log2(c.logC);
  c.lambda = linear_of_log2(c.logLambda);
  return c;
}

int choose_N(int n, double q, double sigma, int N_floor) {
  if (N_floor < 2) N_floor = 2;
  ScheduleParams p;
  p.n = n;
  p.q = q;
  p.sigma = sigma;
  for (long long N = N_floor; N <= (1LL << 40); N *= 2) {
    p.N = static_cast<int>(N);
    ScheduleConstants c = compute_constants(p);
    double logN = std::log2(static_cast<double>(N));
    bool ok = c.logC >= 0.0 && c.Q >= 1.0 &&
              c.logB1 + c.B2 * logN >= std::log2(c.L) &&
              ((n + 2) / (q - n)) * logN >= 1.0;
    if (ok) return p.N;
  }
  throw std::invalid_argument("no feasible doubling constant below 2^40");
}

double next_epsilon(const ScheduleConstants& c, int i, double logEpsI) {
  // B3 log2(N) == Q log2(L), so the closed recurrence needs only the stored
  // constants; the i = 0 step reduces bitwise to -logC, making eps_1 * C == 1
  // exact whenever logC is an integer.
  return -c.logC - i * (c.Q * std::log2(c.L)) + c.Q * logEpsI;
}

double next_epsilon_direct(const ScheduleParams& p, double logDeltaI) {
  validate(p);
  double gap = p.q - p.n;
  double logN = std::log2(static_cast<double>(p.N));
  double nTerm = p.n == 0 ? 0.0 : p.n * std::log2(8.0 * std::sqrt(p.n));
  return -3.0 - (1.0 / gap) *
                    (nTerm + (p.n + 2) * logN * (1.0 - std::log2(p.sigma) - logDeltaI));
}

double next_delta(const ScheduleConstants& c, double logDeltaI, double logEpsI,
                  double logEpsNext) {
  return -std::log2(c.L) + logDeltaI - logEpsI + logEpsNext;
}

ScaleSchedule exact_schedule(ScheduleParams params, int stages) {
  validate(params);
  if (stages < 0 || stages > 400) throw std::invalid_argument("stage count out of range");
  params.relaxed = false;
  ScaleSchedule s;
  s.params = params;
  s.constants = compute_constants(params);
  s.stages = stages;
  s.logEps.resize(static_cast<std::size_t>(stages) + 2);
  s.logDelta.resize(static_cast<std::size_t>(stages) + 1);
  s.logEps[0] = 0.0;
  s.logDelta[0] = 0.0;
  for (int i = 0; i <= stages; ++i) {
    double next = next_epsilon(s.constants, i, s.logEps[static_cast<std::size_t>(i)]);
    s.logEps[static_cast<std::size_t>(i) + 1] = next;
    if (i < stages)
      s.logDelta[static_cast<std::size_t>(i) + 1] =
          next_delta(s.constants, s.logDelta[static_cast<std::size_t>(i)],
                     s.logEps[static_cast<std::size_t>(i)], next);
  }
  s.logEta.resize(static_cast<std::size_t>(stages) + 1);
  for (int i = 0; i <= stages; ++i)
    s.logEta[static_cast<std::size_t>(i)] = 3.0 + s.logEps[static_cast<std::size_t>(i) + 1];
  return s;
}

ScaleSchedule relaxed_schedule(ScheduleParams params, double userL, double ratio,
                               int stages, double deltaMax) {
  validate(params);
  if (stages < 0 || stages > 4000) throw std::invalid_argument("stage count out of range");
  params.relaxed = true;
  ScheduleConstants c = compute_constants(params);
  if (!(userL >= c.L))
    throw std::invalid_argument("relaxed L must be at least the derived constant " +
                                std::to_string(c.L));
  if (!(ratio > 0.0 && ratio <= 1.0 / userL))
    throw std::invalid_argument("stage ratio must satisfy ratio <= 1/L");
  double rootBound = 1.0 / (8.0 * std::sqrt(2.0 * (params.n + 1)));
  if (!(ratio <= rootBound))
    throw std::invalid_argument("stage ratio must satisfy ratio <= 1/(8 sqrt(2(n+1)))");

  ScaleSchedule s;
  s.params = params;
  s.constants = c;
  s.stages = stages;
  s.userL = userL;
  s.ratio = ratio;
  double logRatio = std::log2(ratio);
  s.logEps.resize(static_cast<std::size_t>(stages) + 2);
  s.logDelta.resize(static_cast<std::size_t>(stages) + 1);
  s.logEps[0] = 0.0;
  s.logDelta[0] = 0.0;
  for (int i = 0; i <= stages; ++i) {
    s.logEps[static_cast<std::size_t>(i) + 1] = (i + 1) * logRatio;
    if (i < stages) {
      double d = next_delta(c, s.logDelta[static_cast<std::size_t>(i)],
                            s.logEps[static_cast<std::size_t>(i)],
                            s.logEps[static_cast<std::size_t>(i) + 1]);
      if (i + 1 >= 1 && d > std::log2(deltaMax) + 1e-12)
        throw std::invalid_argument("relaxed schedule exceeds the delta threshold at stage " +
                                    std::to_string(i + 1));
      s.logDelta[static_cast<std::size_t>(i) + 1] = d;
    }
  }
  s.logEta.resize(static_cast<std::size_t>(stages) + 1);
  for (int i = 0; i <= stages; ++i)
    s.logEta[static_cast<std::size_t>(i)] = 3.0 + s.logEps[static_cast<std::size_t>(i) + 1];
  return s;
}

ScheduleIdentityReport check_schedule_identities(const ScaleSchedule& s) {
  ScheduleIdentityReport r;
  const ScheduleConstants& c = s.constants;
  double logL = std::log2(c.L);
  double rootBoundLog = -std::log2(8.0 * std::sqrt(2.0 * (s.params.n + 1)));

  if (!s.params.relaxed) {
    // Closed recurrence vs the direct form driven by delta_i.
    for (int i = 0; i < s.stages; ++i) {
      double direct = next_epsilon_direct(s.params, s.logDelta[static_cast<std::size_t>(i)]);
      r.closedVsDirect = std::max(
          r.closedVsDirect, rel_gap(direct, s.logEps[static_cast<std::size_t>(i) + 1]));
    }
    if (auto eps1 = s.eps(1); eps1 && c.C)
      r.unitProductGap = std::abs(*eps1 * *c.C - 1.0);
  }

  for (int i = 0; i <= s.stages; ++i) {
    double logEpsI = s.logEps[static_cast<std::size_t>(i)];
    double logEpsNext = s.logEps[static_cast<std::size_t>(i) + 1];
    r.telescoped = std::max(
        r.telescoped,
        rel_gap(s.logDelta[static_cast<std::size_t>(i)], -i * logL + logEpsI));
    double ratioLog = logEpsNext - logEpsI;
    r.ratioLSlack = std::min(r.ratioLSlack, -logL - ratioLog);
    r.ratioRootSlack = std::min(r.ratioRootSlack, rootBoundLog - ratioLog);
    r.growthSlack = std::min(r.growthSlack, -i * logL - logEpsI);
    r.couplingSlack = std::min(
        r.couplingSlack, (c.logC + logEpsNext) / (2.0 * c.Q) - logEpsI);
    r.etaCoupling = std::max(
        r.etaCoupling,
        rel_gap(s.logEta[static_cast<std::size_t>(i)], 3.0 + logEpsNext));
  }
  return r;
}

}  // namespace biholder
