#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bt4/eigenfunction.hpp"
#include "bt4/hecke.hpp"
#include "bt4/spectral.hpp"

namespace bt4 {

enum class Status { Pass, Fail, Flagged };
const char* status_name(Status s);

struct VerificationReport {
  std::string check;
  std::string anchor;  // the statement the check exercises, in words
  nlohmann::json inputs = nlohmann::json::object();
  Status status = Status::Pass;
  double max_residual = 0;
  double bound = 0;
  std::string witness;  // vertex, ray or monomial; never empty on failure
  nlohmann::json evidence = nlohmann::json::object();

  void fail(const std::string& w);
  void flag(const std::string& w);
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const ZTuple& z);
nlohmann::json to_json(cplx x);

// max over interior(L), i = 1..3 of |A_i f - lambda_i f| / (1 + max local |f|)
VerificationReport eigen_residual(const XTuple& z, int q, int L, double tol = 1e-9);

// a_l = f(v_{l,0,0}) / q^l satisfies the five-term relation with sigma_k(z)
VerificationReport char_recurrence_check(const XTuple& z, int q, int Lmax, double tol = 1e-9);
// a_{l,m} = f(v_{l,m,0}) / q^{l+m} satisfies the six-term face relation, l > m >= 1
VerificationReport face_recurrence_check(const XTuple& z, int q, int Lmax, double tol = 1e-9);

// growth of the three normalized ray sequences: slope of log_q of the running
// maximum over the last half of the range must stay below c/4
VerificationReport condition_B_check(const XTuple& z, int q, int L, double c);

// direct A_i f^eps - lambda_i f^eps on interior(L) against the defect rebuilt
// from the stencil levels; the printed i = 1 list is compared and flagged
VerificationReport weyl_identity_check(const XTuple& z, int q, double eps, int L, double tol = 1e-9);

// ||A_i f^eps - lambda_i f^eps|| / ||f^eps|| on interior(L), grown from L0 until
// the ratios at L and L - 5 agree to 1e-4 (or the evaluation cap is reached)
VerificationReport weyl_ratio(const XTuple& z, int q, double eps, int L0 = 60);

struct SequenceTriple {
  // index n = 0..N; entries below n = 1 are zero
  std::vector<cplx> alpha, beta, gamma;
  std::vector<cplx> alpha_closed, beta_closed, gamma_closed;  // empty when skipped
  bool closed_form = false;
  double max_rel_diff = 0;  // recurrence vs closed form, relative to the closed-form scale
};
SequenceTriple appendixB_sequences(const XTuple& z, int q, int N);
SequenceTriple appendixB_sequences(const EigTriple& lam, int q, int N);

// a = perturbation (h = f + a), delta_i = A_i a - lambda_i a; the three ray
// convolution identities are checked for 1 <= l <= L - 2
VerificationReport appendixB_convolution(const XTuple& z, int q, const BallFunction& perturbation, int L,
                                         double tol = 1e-8);

struct Decision {
  FamilyTag tag;
  bool in_building_spectrum = false;
  VerificationReport report;
};
Decision spectrum_decision(const EigTriple& lam, int q, double tol = kDefaultTol);
Decision spectrum_decision(const XTuple& z, int q, double tol = kDefaultTol);

VerificationReport weakly_ramanujan_report(int q, int grid, double eps = 0.1);

// moduli pattern of each family and its partition of 4
nlohmann::json partition_table(int q);

// parameter grid of roughly `count` points, offset away from collisions
std::vector<FamilyTag> family_grid(Family f, int count);

}  // namespace bt4
