#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bt4/eigenfunction.hpp"
#include "bt4/spectral_types.hpp"

namespace bt4 {

ZTuple canonical(const ZTuple& z, double tol = 1e-9);
std::array<cplx, 3> sigma(const ZTuple& z);

EigTriple eig_from_z(const ZTuple& z, int q, double tol = kDefaultTol);
EigTriple eig_from_z(const XTuple& z, int q, double tol = kDefaultTol);

struct RootSolve {
  ZTuple z;                    // canonical order, clustered roots replaced by their mean
  std::vector<int> multiplicities;  // sizes of root clusters, descending
  bool ill_conditioned = false;     // a cluster of three or more roots was found
};
RootSolve z_from_eig(const EigTriple& lam, int q);

bool in_S(const ZTuple& z, double tol = kDefaultTol);

enum class Family { Trivial, Family2, Family3, Family4, Tempered, NotInSpectrum };
const char* family_name(Family f);

struct FamilyTag {
  Family family = Family::NotInSpectrum;
  std::vector<double> params;  // Trivial: {k}; Family2: {theta}; Family3: {theta1, sign};
                               // Family4: {theta1, theta2}; Tempered: {theta1, theta2, theta3}
  bool degenerate = false;
};

FamilyTag classify(const ZTuple& z, int q, double tol = kDefaultTol);
ZTuple sample_family(const FamilyTag& tag, int q);
// the same point in extended precision, as the eigenfunction engine prefers
XTuple sample_family_ext(const FamilyTag& tag, int q);
FamilyTag random_tag(Family f, std::mt19937_64& rng);
// same family and the same point of it (compared through sample_family)
bool same_point(const FamilyTag& a, const FamilyTag& b, int q, double tol = 1e-7);

bool in_building_spectrum(const EigTriple& lam, int q, double tol = kDefaultTol);

struct ConditionD {
  bool holds = true;
  std::array<int, 3> witness{};  // 1-based indices of the offending monomial
  std::string ray;               // (1,0,0), (1,1,0) or (1,1,1)
  double modulus = 0;
};
ConditionD condition_D(const ZTuple& z, int q, const CoefficientTable& coeffs, double tol = kDefaultTol);

}  // namespace bt4
