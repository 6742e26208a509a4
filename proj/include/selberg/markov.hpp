#pragma once

// Markov partition of I_q generated by the orbit of -lambda/2 under F_q, and
// the digit sets N_ij of inverse branches S T^n carrying I_i into I_j.

#include <string>
#include <vector>

#include <json.hpp>

#include "selberg/hecke.hpp"

namespace selberg::markov {

using hecke::GroupParams;
using mp::Real;

/// Interval labels run over J = {+-1, ..., +-kappa}. Dense positions order
/// them as 1..kappa, -1..-kappa.
int position(int label, int kappa);
int label_at(int position, int kappa);
std::vector<int> labels(int kappa);

struct Partition {
  int kappa;
  std::vector<Real> phi;  // phi_0 = -lambda/2 < ... < phi_kappa = 0

  /// I_j = [phi_{j-1}, phi_j) for j > 0 and I_{-j} = -I_j.
  Real left(int j) const;
  Real right(int j) const;
  /// Label of the interval containing x, or 0 (x = 0 or outside I_q).
  int locate(const Real& x) const;
};

/// Throws std::logic_error if the orbit does not reach 0 after kappa steps.
Partition build_partition(const GroupParams& g);

enum class SetKind { Empty, Single, Ray, NegSingle, NegRay };

struct TransitionSet {
  SetKind kind = SetKind::Empty;
  long n0 = 0;  // magnitude of the singleton, or first element of the ray

  bool empty() const { return kind == SetKind::Empty; }
  bool negative() const { return kind == SetKind::NegSingle || kind == SetKind::NegRay; }
  bool ray() const { return kind == SetKind::Ray || kind == SetKind::NegRay; }
  bool contains(long n) const;
  TransitionSet negated() const;
  std::string to_string() const;

  friend bool operator==(const TransitionSet&, const TransitionSet&) = default;

  static TransitionSet single(long n) { return n > 0 ? TransitionSet{SetKind::Single, n} : TransitionSet{SetKind::NegSingle, -n}; }
  static TransitionSet ray_from(long n0) { return {SetKind::Ray, n0}; }
};

class NijTable {
 public:
  explicit NijTable(int kappa);

  int kappa() const { return kappa_; }
  const TransitionSet& at(int i, int j) const;
  void set(int i, int j, TransitionSet s);

  /// Sets N_{i,j} for j > 0 and the mirrored N_{-i,-j} = -N_{i,j}.
  void set_mirrored(int i, int j, TransitionSet s);

  friend bool operator==(const NijTable&, const NijTable&) = default;

 private:
  int kappa_;
  std::vector<TransitionSet> sets_;
};

/// The case formulas for odd and even q.
NijTable build_nij(const GroupParams& g);

struct Violation {
  int i;
  int j;
  long n;
  std::string what;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t containment_checks = 0;
  std::size_t completeness_checks = 0;
  bool ok() const { return violations.empty(); }
};

/// Containment: S T^n maps I_i into the closure of I_j for every n in N_ij
/// with |n| <= n_max. Completeness: every inverse branch of a grid point of
/// I_i with |n| <= n_max landing in I_q is listed in the matching N_ij.
/// Markov property: F_q maps partition endpoints onto endpoints or +-lambda/2.
ValidationReport validate(const GroupParams& g, const Partition& p, const NijTable& t, long n_max);

/// Digit sets read off numerically from containment for |n| <= n_max; an
/// n_max-long run of admissible digits is recorded as a ray.
NijTable derive_nij(const GroupParams& g, const Partition& p, long n_max);

nlohmann::json to_json(const GroupParams& g, const Partition& p, const NijTable& t, int digits);

}  // namespace selberg::markov
